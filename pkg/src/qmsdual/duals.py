"""s-dual generators with respect to a faithful invariant state.

The s-dual of ``L`` is defined through

    tr(rho^{1-s} Lt(a) rho^s b) = tr(rho^{1-s} a rho^s L(b)),

i.e. ``Lt(a) = rho^{-(1-s)} L_*(rho^{1-s} a rho^s) rho^{-s}``. For ``s = 1/2``
this is always a QMS generator; for other ``s`` it is one exactly when ``L``
commutes with the modular map, and then every s-dual coincides with the
0-dual.
"""
from dataclasses import dataclass, field

import numpy as np

from . import matrices as mx
from .errors import PreconditionError
from .gksl import (
    GkslRep,
    Superoperator,
    as_generator,
    build_generator,
    compute_G,
    generator_diagnostics,
    special_rep_from_superoperator,
)
from .modular import commutes_with_modular, privileged_diagnostics, PrivilegedRep
from .settings import resolve
from .stationary import powers, require_faithful, require_invariant


@dataclass(frozen=True, eq=False)
class DualResult:
    s: float
    dual_gen: Superoperator
    is_star_map: bool
    is_qms: bool
    residuals: dict = field(default_factory=dict)


def _dual_matrix(S, rho, s):
    P = as_generator(S).mat.conj().T
    a, b = powers(rho, 1 - s), powers(rho, s)
    ai, bi = powers(rho, -(1 - s)), powers(rho, -s)
    return mx.sandwich(ai, bi) @ P @ mx.sandwich(a, b)


def duality_residual(S, dual, rho, s):
    """Max over matrix-unit pairs of ``|tr(rho^{1-s} Lt(a) rho^s b) - tr(rho^{1-s} a rho^s L(b))|``."""
    S = as_generator(S)
    d = S.dim
    a, b = powers(rho, 1 - s), powers(rho, s)
    units = mx.matrix_units(d)
    lhs_ops = a @ mx.superop_outputs(dual.mat) @ b
    rhs_ops = a @ units @ b
    lhs = np.einsum("nij,mji->nm", lhs_ops, units)
    rhs = np.einsum("nij,mji->nm", rhs_ops, mx.superop_outputs(S.mat))
    return float(np.abs(lhs - rhs).max())


def s_dual_generator(S, rho, s, settings=None):
    st = resolve(settings)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    S = as_generator(S)
    require_faithful(rho)
    inv = require_invariant(S, rho, st)
    dual = Superoperator(_dual_matrix(S, rho, s))
    diag = generator_diagnostics(dual, st)
    star = diag["hermiticity"] <= st.gen_tol * dual.norm() + 1e-14
    residuals = {
        "invariance": inv,
        "duality": duality_residual(S, dual, rho, s),
        "unitality": diag["unitality"],
        "hermiticity": diag["hermiticity"],
        "ccp_min_eig": diag["ccp_min_eig"],
        "dual_invariance": float(np.linalg.norm(dual.mat.conj().T @ mx.vectorize(rho.rho))),
    }
    return DualResult(float(s), dual, bool(star), diag["is_generator"], residuals)


def dual_is_qms(S, rho, s, settings=None):
    res = s_dual_generator(S, rho, s, settings)
    return res.is_qms, dict(res.residuals, is_star_map=res.is_star_map)


@dataclass(frozen=True, eq=False)
class DualPrivilegedReport:
    rep: GkslRep
    lambdas: np.ndarray
    generator_residual: float
    kraus_sum_residual: float
    privileged: dict

    @property
    def holds(self):
        return self.generator_residual <= 1e-9 and self.kraus_sum_residual <= 1e-10


def dual_privileged_relations(p, rho, settings=None):
    """Privileged representation ``(-H, lambda_k^{-1/2} L_k^H)`` of the 0-dual and its checks."""
    st = resolve(settings)
    S = build_generator(p.rep)
    dual = s_dual_generator(S, rho, 0.0, st)
    if not dual.is_qms:
        raise PreconditionError("the 0-dual is not a QMS; no dual privileged representation")
    lam = np.asarray(p.lambdas, dtype=float)
    Lt = tuple(L.conj().T / np.sqrt(l) for L, l in zip(p.Ls, lam))
    rep = GkslRep(-p.H, Lt)
    gen_res = float(np.linalg.norm(build_generator(rep).mat - dual.dual_gen.mat))
    d = p.rep.dim
    lhs = sum((L.conj().T @ L for L in p.Ls), np.zeros((d, d), dtype=complex))
    rhs = sum((L @ L.conj().T / l for L, l in zip(p.Ls, lam)), np.zeros((d, d), dtype=complex))
    priv = privileged_diagnostics(PrivilegedRep(rep, 1.0 / lam if lam.size else lam), rho)
    return DualPrivilegedReport(
        rep=rep,
        lambdas=1.0 / lam if lam.size else lam,
        generator_residual=gen_res,
        kraus_sum_residual=float(np.linalg.norm(lhs - rhs)),
        privileged=priv,
    )


@dataclass(frozen=True, eq=False)
class SymmetricDualResult:
    result: DualResult
    rep: GkslRep
    mixing: np.ndarray
    c: float
    relations: dict

    @property
    def is_qms(self):
        return self.result.is_qms

    @property
    def dual_gen(self):
        return self.result.dual_gen


def symmetric_dual(S, rho, settings=None):
    """The symmetric (s = 1/2) dual together with the intertwining relations.

    With ``(G, L_k)`` the special representation of ``L`` and ``(G', L'_k)`` that
    of the dual, one has ``L'_k = sum_j u_kj rho^{1/2} L_j^H rho^{-1/2}`` for a
    unitary ``u`` and ``G' - rho^{1/2} G^H rho^{-1/2} = i c`` for a real ``c``.
    """
    st = resolve(settings)
    S = as_generator(S)
    res = s_dual_generator(S, rho, 0.5, st)
    rep = special_rep_from_superoperator(S, rho, st)
    rep_p = special_rep_from_superoperator(res.dual_gen, rho, st)
    half, mhalf = powers(rho, 0.5), powers(rho, -0.5)
    targets = [half @ L.conj().T @ mhalf for L in rep.Ls]
    if rep.m != rep_p.m:
        u, k_res = np.zeros((rep_p.m, rep.m), dtype=complex), float("inf")
    elif rep.m == 0:
        u, k_res = np.zeros((0, 0), dtype=complex), 0.0
    else:
        A = np.array([mx.vectorize(T) for T in targets]).T
        B = np.array([mx.vectorize(L) for L in rep_p.Ls]).T
        ut, k_res = mx.lstsq(A, B)
        u = ut.T
    G = compute_G(rep).G
    Gp = compute_G(rep_p).G
    D = Gp - half @ G.conj().T @ mhalf
    d = rep.dim
    c = float(np.imag(np.trace(D))) / d
    g_res = float(np.linalg.norm(D - 1j * c * np.eye(d)))
    relations = {
        "kraus_expansion": float(k_res),
        "mixing_unitarity": mx.unitarity_residual(u) if u.shape[0] == u.shape[1] else float("inf"),
        "G_relation": g_res,
    }
    return SymmetricDualResult(res, rep_p, u, c, relations)


@dataclass(frozen=True)
class CoincidenceReport:
    s: float
    qms_s: bool
    qms_0: bool
    verdicts_agree: bool
    difference: float
    commutes_with_modular: bool
    zero_equals_symmetric: bool
    zero_symmetric_difference: float

    @property
    def consistent(self):
        ok = self.verdicts_agree and self.zero_equals_symmetric == self.commutes_with_modular
        if self.qms_s and self.qms_0:
            ok = ok and self.difference <= 1e-9
        return ok


def s_duals_coincide(S, rho, s, settings=None):
    """Compare the s-dual with the 0-dual and the 0-dual with the symmetric dual."""
    if not (0.0 < s < 1.0) or s == 0.5:
        raise ValueError("s must lie in (0, 1/2) or (1/2, 1)")
    st = resolve(settings)
    S = as_generator(S)
    ds = s_dual_generator(S, rho, s, st)
    d0 = s_dual_generator(S, rho, 0.0, st)
    dh = s_dual_generator(S, rho, 0.5, st)
    comm, _ = commutes_with_modular(S, rho, st)
    diff = float(np.linalg.norm(ds.dual_gen.mat - d0.dual_gen.mat))
    zh = float(np.linalg.norm(d0.dual_gen.mat - dh.dual_gen.mat))
    return CoincidenceReport(
        s=float(s),
        qms_s=ds.is_qms,
        qms_0=d0.is_qms,
        verdicts_agree=ds.is_qms == d0.is_qms,
        difference=diff,
        commutes_with_modular=comm,
        zero_equals_symmetric=zh <= st.comm_tol * (1.0 + S.norm()),
        zero_symmetric_difference=zh,
    )
