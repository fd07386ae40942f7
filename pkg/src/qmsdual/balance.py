"""Quantum detailed balance: ``L - Lt = 2i[K, .]`` with ``K`` self-adjoint.

``Lt`` is the s-dual generator. The checks here solve for ``K`` by least
squares, verify ``[K, rho] = 0`` and expose the structural criteria in terms
of GKSL operators (intertwining unitaries, the relation between ``H`` and
``K``). The classical special case, reversibility of a Markov chain, is
included for comparison.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matrices as mx
from .duals import s_dual_generator
from .errors import NoPrivilegedRepError, ShapeError
from .gksl import Superoperator, as_generator, compute_G, special_rep_from_superoperator
from .modular import privileged_rep
from .settings import resolve
from .stationary import powers


@dataclass(frozen=True, eq=False)
class BalanceReport:
    s: float
    holds: bool
    K: Optional[np.ndarray]
    K_residual: float
    K_commutes_rho: bool
    intertwiner: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)
    reason: str = ""


def _commutator_design(d):
    basis = mx.traceless_hermitian_basis(d)
    cols = []
    for B in basis:
        cols.append((2j * mx.commutator_superop(B)).reshape(-1))
    return basis, np.array(cols).T


def solve_commutator_K(delta, settings=None):
    """Least-squares traceless Hermitian ``K`` minimizing ``||delta - 2i ad_K||_F``.

    ``delta`` is a superoperator (or its matrix). Returns ``(K, residual)`` with
    the absolute Frobenius residual.
    """
    mat = delta.mat if isinstance(delta, Superoperator) else mx.as_cmat(delta)
    d = int(round(np.sqrt(mat.shape[0])))
    if d == 1:
        return np.zeros((1, 1), dtype=complex), float(np.linalg.norm(mat))
    basis, A = _commutator_design(d)
    target = mat.reshape(-1)
    # K has real coordinates in the Hermitian basis: solve the real system
    A_r = np.vstack([A.real, A.imag])
    b_r = np.concatenate([target.real, target.imag])
    coef, _ = mx.lstsq(A_r, b_r)
    K = sum(c * B for c, B in zip(coef, basis))
    K = 0.5 * (K + K.conj().T)
    res = float(np.linalg.norm(mat - 2j * mx.commutator_superop(K)))
    return K, res


def _k_commutes(K, rho, st):
    res = float(np.linalg.norm(K @ rho.rho - rho.rho @ K))
    return res <= st.op_tol * (1.0 + np.linalg.norm(K)), res


def _db_threshold(S, st):
    return st.db_tol * S.norm() + 1e-13


@dataclass(frozen=True, eq=False)
class UnitaryCriterion:
    u: np.ndarray
    expansion_residual: float
    unitarity_residual: float

    @property
    def residual(self):
        return max(self.expansion_residual, self.unitarity_residual)

    def __iter__(self):
        return iter((self.u, self.residual))


def db_unitary_criterion(p):
    """Coefficients ``u`` with ``lambda_k^{-1/2} L_k^H = sum_j u[k, j] L_j``.

    The expansion residual is relative to the size of the jump operators.
    """
    m = p.rep.m
    if m == 0:
        return UnitaryCriterion(np.zeros((0, 0), dtype=complex), 0.0, 0.0)
    V = np.array([mx.vectorize(L) for L in p.Ls]).T
    T = np.array([mx.vectorize(L.conj().T / np.sqrt(l)) for L, l in zip(p.Ls, p.lambdas)]).T
    ut, res = mx.lstsq(V, T)
    u = ut.T
    return UnitaryCriterion(u, res / max(np.linalg.norm(T), 1e-300), mx.unitarity_residual(u))


def detailed_balance_check(S, rho, s, settings=None):
    """Decide the quantum s-detailed balance condition for ``S`` with respect to ``rho``."""
    st = resolve(settings)
    S = as_generator(S)
    dual = s_dual_generator(S, rho, s, st)
    details = {"dual_is_qms": dual.is_qms, "dual_is_star_map": dual.is_star_map}
    details.update({f"dual_{k}": v for k, v in dual.residuals.items()})
    if s == 0 and not dual.is_qms:
        return BalanceReport(
            s=float(s), holds=False, K=None, K_residual=float("nan"), K_commutes_rho=False,
            details=details, reason="0-dual is not a QMS",
        )
    delta = S.mat - dual.dual_gen.mat
    K, res = solve_commutator_K(delta, st)
    comm, comm_res = _k_commutes(K, rho, st)
    details["K_rho_commutator"] = comm_res
    fits = res <= _db_threshold(S, st)
    reason = ""
    if not fits:
        reason = "L - Lt is not of the form 2i[K, .]"
    elif not comm:
        reason = "K does not commute with rho"
    holds = fits and comm
    intertwiner = None
    if s == 0:
        rep = special_rep_from_superoperator(S, rho, st)
        H = rep.H
        adH = 1j * mx.commutator_superop(H)
        details["L0_residual"] = float(np.linalg.norm((S.mat - adH) - (dual.dual_gen.mat + adH)))
        diff = H - K
        d = S.dim
        details["H_minus_K_nonscalar"] = float(np.linalg.norm(diff - np.trace(diff) / d * np.eye(d)))
        try:
            p = privileged_rep(rep, rho, st)
        except NoPrivilegedRepError as exc:
            details["privileged_error"] = str(exc)
        else:
            crit = db_unitary_criterion(p)
            intertwiner = crit.u
            details["intertwiner_expansion"] = crit.expansion_residual
            details["intertwiner_unitarity"] = crit.unitarity_residual
            details["lambdas"] = [float(x) for x in p.lambdas]
    return BalanceReport(
        s=float(s), holds=bool(holds), K=K, K_residual=res,
        K_commutes_rho=bool(comm), intertwiner=intertwiner, details=details, reason=reason,
    )


@dataclass(frozen=True, eq=False)
class SymmetricStructure:
    holds: bool
    u: np.ndarray
    K: np.ndarray
    c: float
    residuals: dict


def symmetric_db_structure(rep, rho, settings=None):
    """Test the GKSL form of symmetric detailed balance for a special representation.

    Requires ``rho^{1/2} L_k^H rho^{-1/2} = sum_l u_kl L_l`` with ``u`` unitary
    and ``rho^{1/2} G^H rho^{-1/2} - G = 2iK + ic`` with ``K`` self-adjoint,
    traceless and commuting with ``rho``.
    """
    st = resolve(settings)
    d = rep.dim
    half, mhalf = powers(rho, 0.5), powers(rho, -0.5)
    if rep.m:
        V = np.array([mx.vectorize(L) for L in rep.Ls]).T
        T = np.array([mx.vectorize(half @ L.conj().T @ mhalf) for L in rep.Ls]).T
        ut, e_res = mx.lstsq(V, T)
        u = ut.T
        e_res /= max(np.linalg.norm(T), 1e-300)
    else:
        u, e_res = np.zeros((0, 0), dtype=complex), 0.0
    G = compute_G(rep).G
    X = half @ G.conj().T @ mhalf - G
    c = float(np.imag(np.trace(X))) / d
    K = 0.5 * (-1j * X - c * np.eye(d))
    herm_defect = float(np.linalg.norm(K - K.conj().T))
    K = 0.5 * (K + K.conj().T)
    comm, comm_res = _k_commutes(K, rho, st)
    scale = 1.0 + np.linalg.norm(G)
    residuals = {
        "kraus_expansion": float(e_res),
        "unitarity": mx.unitarity_residual(u),
        "K_hermiticity": herm_defect,
        "K_rho_commutator": comm_res,
    }
    holds = (
        e_res <= st.span_tol
        and residuals["unitarity"] <= st.unitary_tol
        and herm_defect <= st.db_tol * scale
        and comm
    )
    return SymmetricStructure(bool(holds), u, K, c, residuals)


def classical_reversibility(Q, pi, settings=None):
    """``(reversible, max_violation)`` for a rate matrix and a strictly positive distribution."""
    st = resolve(settings)
    Q = np.asarray(Q, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or pi.shape != (Q.shape[0],):
        raise ShapeError("rate matrix must be n x n and pi of length n")
    scale = float(np.abs(Q).max()) if Q.size else 0.0
    off = Q - np.diag(np.diag(Q))
    if np.any(off < 0):
        raise ValueError("rate matrix has negative off-diagonal entries")
    if np.abs(Q.sum(axis=1)).max() > 1e-12 * max(scale, 1.0):
        raise ValueError("rate matrix rows must sum to zero")
    if np.any(pi <= 0) or abs(pi.sum() - 1.0) > 1e-12:
        raise ValueError("pi must be strictly positive and sum to one")
    flux = pi[:, None] * Q
    viol = float(np.abs(flux - flux.T).max())
    return viol <= st.rev_tol * max(scale, 1e-300), viol
