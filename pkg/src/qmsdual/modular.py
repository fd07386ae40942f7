"""Modular structure of a faithful state and privileged GKSL representations.

For a faithful ``rho`` the map ``sigma_{-i}(a) = rho a rho^{-1}`` is positive
and self-adjoint for the scalar product ``tr(rho a^H b)``; its eigenvalues are
the ratios ``rho_j / rho_m``.

A special representation is *privileged* when ``[H, rho] = 0`` and every jump
operator is an eigenvector of ``sigma_{-i}``: ``rho L_k = lambda_k L_k rho``.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import matrices as mx
from .errors import InternalInconsistencyError, NoPrivilegedRepError, PreconditionError
from .gksl import GkslRep, as_generator, build_generator, mix, special_rep_from_superoperator
from .settings import resolve
from .stationary import powers, require_faithful


def sigma_minus_i(rho, a):
    require_faithful(rho)
    return rho.rho @ np.asarray(a) @ powers(rho, -1)


def modular_group(rho, t, a):
    """``sigma_t(a) = rho^{it} a rho^{-it}``."""
    if t == 0:
        return np.asarray(a, dtype=complex)
    require_faithful(rho)
    u, w = rho.eigenvectors, rho.eigenvalues
    phase = np.exp(1j * t * np.log(w))
    rit = (u * phase) @ u.conj().T
    return rit @ np.asarray(a) @ rit.conj().T


def s_inner(rho, s, a, b):
    """``<a, b>_s = tr(rho^{1-s} a^H rho^s b)``."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    require_faithful(rho)
    a, b = np.asarray(a), np.asarray(b)
    return complex(np.trace(powers(rho, 1 - s) @ a.conj().T @ powers(rho, s) @ b))


def modular_superop(rho):
    """Superoperator of ``a -> rho a rho^{-1}``."""
    require_faithful(rho)
    return mx.sandwich(rho.rho, powers(rho, -1))


def commutes_with_modular(S, rho, settings=None):
    """``(verdict, residual)`` with residual ``||Sigma S - S Sigma||_F / ||S||_F``."""
    st = resolve(settings)
    S = as_generator(S)
    sig = modular_superop(rho)
    scale = S.norm()
    if scale == 0.0:
        return True, 0.0
    res = float(np.linalg.norm(sig @ S.mat - S.mat @ sig) / scale)
    return res <= st.comm_tol, res


@dataclass(frozen=True, eq=False)
class PrivilegedRep:
    rep: GkslRep
    lambdas: np.ndarray
    # L'_k = sum_j u[k, j] L_j relative to the special representation it came from
    u: np.ndarray = field(default=None, repr=False)

    @property
    def H(self):
        return self.rep.H

    @property
    def Ls(self):
        return self.rep.Ls

    @property
    def D(self):
        return np.diag(self.lambdas)


def privileged_diagnostics(p, rho):
    """Worst relative residuals of the privileged-representation identities."""
    r = rho.rho
    eig, eig_adj = 0.0, 0.0
    for L, lam in zip(p.Ls, p.lambdas):
        n = max(np.linalg.norm(L), 1e-300)
        eig = max(eig, np.linalg.norm(r @ L - lam * L @ r) / n)
        Ld = L.conj().T
        eig_adj = max(eig_adj, np.linalg.norm(r @ Ld - Ld @ r / lam) / n)
    return {
        "eigen_relation": float(eig),
        "adjoint_relation": float(eig_adj),
        "H_rho_commutator": float(np.linalg.norm(p.H @ r - r @ p.H)),
        "min_lambda": float(min(p.lambdas, default=1.0)),
    }


def _span_matrix(Ls):
    return np.array([mx.vectorize(L) for L in Ls]).T


def modular_coefficients(rep, rho, settings=None):
    """Matrix ``X`` with ``rho L_k rho^{-1} = sum_j X[j, k] L_j`` and the expansion residual."""
    st = resolve(settings)
    V = _span_matrix(rep.Ls)
    sig = modular_superop(rho)
    X, res = mx.lstsq(V, sig @ V)
    return X, res / max(np.linalg.norm(V), 1e-300)


def _align_degenerate(lam, Z, tol):
    """Replace the eigensolver's arbitrary basis of each degenerate eigenspace.

    Within a cluster the new basis is Gram-Schmidt applied to the projections of
    the standard basis vectors, so an eigenspace spanned by original jump
    operators keeps them unmixed.
    """
    Z = Z.copy()
    for group in lambda_clusters(lam, tol):
        if len(group) < 2:
            continue
        block = Z[:, group]
        P = block @ block.conj().T
        basis = []
        for col in P.T:
            v = col - sum((np.vdot(b, col) * b for b in basis), np.zeros_like(col))
            n = np.linalg.norm(v)
            if n > 1e-6:
                basis.append(v / n)
            if len(basis) == len(group):
                break
        if len(basis) == len(group):
            Z[:, group] = np.array(basis).T
    return Z


def privileged_rep(rep, rho, settings=None):
    """Rotate a special representation into a privileged one.

    The span of the jump operators must be invariant under ``sigma_{-i}``; the
    coefficient matrix of ``sigma_{-i}`` in the jump-operator basis is then
    Hermitian and its eigenvectors give the unitary mixing.
    """
    st = resolve(settings)
    require_faithful(rho)
    d, m = rep.dim, rep.m
    r = rho.rho
    h_comm = float(np.linalg.norm(rep.H @ r - r @ rep.H))
    if h_comm > st.op_tol * (1.0 + np.linalg.norm(rep.H)):
        raise NoPrivilegedRepError(f"[H, rho] != 0 (residual {h_comm:.3e})", residual=h_comm)
    if m == 0:
        return PrivilegedRep(rep, np.zeros(0), np.zeros((0, 0), dtype=complex))
    X, res = modular_coefficients(rep, rho, st)
    if res > st.span_tol:
        raise NoPrivilegedRepError(
            f"span of the jump operators is not invariant under rho . rho^-1 (residual {res:.3e})",
            residual=res,
        )
    herm = float(np.linalg.norm(X - X.conj().T))
    if herm > st.y_herm_tol * np.linalg.norm(X):
        raise NoPrivilegedRepError(
            f"modular coefficient matrix is not Hermitian (defect {herm:.3e})", residual=herm
        )
    lam, Z = mx.herm_eig(X)
    if lam[0] <= 0:
        raise InternalInconsistencyError(f"non-positive modular eigenvalue {lam[0]:.3e}")
    order = np.argsort(-lam, kind="stable")
    lam, Z = lam[order], Z[:, order]
    Z = _align_degenerate(lam, Z, st.cluster_tol)
    u = Z.T
    new = mix(rep, u)
    Ls = []
    phases = []
    for L in new.Ls:
        L2, ph = mx.normalize_phase(L)
        Ls.append(L2)
        phases.append(ph)
    u = np.diag(phases) @ u
    out = PrivilegedRep(GkslRep(rep.H, tuple(Ls)), lam, u)
    if mx.unitarity_residual(u) > st.unitary_tol:
        raise InternalInconsistencyError("privileged mixing matrix is not unitary")
    diag = privileged_diagnostics(out, rho)
    if diag["eigen_relation"] > 1e-6 or diag["adjoint_relation"] > 1e-6 * max(1.0, 1.0 / lam[-1]):
        raise InternalInconsistencyError(f"privileged relations fail: {diag}")
    return out


def privileged_rep_from_generator(S, rho, settings=None):
    rep = special_rep_from_superoperator(as_generator(S), rho, settings)
    return privileged_rep(rep, rho, settings)


def lambda_clusters(lambdas, tol=1e-8):
    """Group indices of (descending) eigenvalues that agree within ``tol`` relative."""
    groups = []
    for k, lam in enumerate(lambdas):
        if groups and abs(lambdas[groups[-1][0]] - lam) <= tol * max(abs(lam), 1.0):
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


@dataclass(frozen=True)
class UniquenessReport:
    V: np.ndarray
    alpha: float
    residuals: dict
    clusters: Tuple[Tuple[int, ...], ...]
    is_phase_permutation: bool
    permutation: Tuple[int, ...] = None


def privileged_uniqueness_check(p1, p2, settings=None):
    """Relate two privileged representations of the same generator.

    Finds ``V`` unitary and real ``alpha`` with ``H2 = H1 + alpha`` and
    ``L2_k = sum_j V[k, j] L1_j``; then ``V D1 V^H = D2``.
    """
    st = resolve(settings)
    g1 = build_generator(p1.rep).mat
    g2 = build_generator(p2.rep).mat
    gerr = np.linalg.norm(g1 - g2)
    if gerr > 1e-9 * (1 + np.linalg.norm(g1)) or p1.rep.m != p2.rep.m:
        raise PreconditionError(
            f"representations generate different semigroups (difference {gerr:.3e})", residual=gerr
        )
    d, m = p1.rep.dim, p1.rep.m
    dH = p2.H - p1.H
    alpha = float(np.real(np.trace(dH))) / d
    h_res = float(np.linalg.norm(dH - alpha * np.eye(d)))
    if m:
        Vt, l_res = mx.lstsq(_span_matrix(p1.Ls), _span_matrix(p2.Ls))
        V = Vt.T
    else:
        V, l_res = np.zeros((0, 0), dtype=complex), 0.0
    d_res = float(np.linalg.norm(V @ p1.D @ V.conj().T - p2.D)) if m else 0.0
    mags = np.abs(V)
    perm = None
    is_pp = False
    if m:
        rows = mags.argmax(axis=1)
        dominant = mags[np.arange(m), rows]
        rest = np.sqrt(np.maximum((mags ** 2).sum(axis=1) - dominant ** 2, 0.0))
        is_pp = bool(
            len(set(rows.tolist())) == m
            and np.all(np.abs(dominant - 1) <= st.unitary_tol)
            and np.all(rest <= st.unitary_tol)
        )
        if is_pp:
            perm = tuple(int(j) for j in rows)
    return UniquenessReport(
        V=V,
        alpha=alpha,
        residuals={
            "H_shift": h_res,
            "expansion": float(l_res),
            "unitarity": mx.unitarity_residual(V),
            "D_conjugation": d_res,
        },
        clusters=tuple(tuple(g) for g in lambda_clusters(p1.lambdas, st.cluster_tol)),
        is_phase_permutation=is_pp,
        permutation=perm,
    )
