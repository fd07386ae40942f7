"""Density matrices and invariant states of a QMS."""
from dataclasses import dataclass, field

import numpy as np

from . import matrices as mx
from .errors import KernelError, PreconditionError, ShapeError
from .gksl import as_predual
from .settings import resolve


@dataclass(frozen=True, eq=False)
class DensityState:
    """A density matrix together with its spectral decomposition.

    Eigenvalues are stored in descending order, ``eigenvectors[:, k]`` is the
    eigenvector for ``eigenvalues[k]``.
    """

    rho: np.ndarray
    faithful_tol: float = 1e-10
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = mx.as_herm(self.rho)
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > 1e-12 * max(1, rho.shape[0]) * 10:
            raise ValueError(f"density matrix must have unit trace, got {tr:.15g}")
        w, u = mx.herm_eig(rho)
        if w[0] < -max(self.faithful_tol, 1e-12):
            raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "eigenvalues", w[::-1].copy())
        object.__setattr__(self, "eigenvectors", u[:, ::-1].copy())

    @classmethod
    def from_matrix(cls, rho, settings=None, normalize=False):
        rho = mx.as_cmat(rho)
        if normalize:
            rho = rho / np.trace(rho)
        return cls(rho, faithful_tol=resolve(settings).faithful_tol)

    @classmethod
    def maximally_mixed(cls, d):
        return cls(np.eye(d, dtype=complex) / d)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues[-1])

    @property
    def faithful(self):
        return self.min_eigenvalue >= self.faithful_tol

    def power(self, s):
        return powers(self, s)


def faithfulness_check(rho):
    """``(faithful, min_eig)``."""
    return rho.faithful, rho.min_eigenvalue


def require_faithful(rho):
    if not rho.faithful:
        raise PreconditionError(
            f"state is not faithful (min eigenvalue {rho.min_eigenvalue:.3e})",
            residual=rho.min_eigenvalue,
        )


def powers(rho, s):
    """Spectral power ``rho^s``; ``s = 0`` is the identity even for singular ``rho``."""
    s = float(s)
    if s == 0.0:
        return np.eye(rho.dim, dtype=complex)
    w = rho.eigenvalues
    if s < 0:
        require_faithful(rho)
    ws = np.where(w > 0, np.abs(w) ** s, 0.0)
    u = rho.eigenvectors
    return (u * ws) @ u.conj().T


def invariance_residual(S, rho):
    """``||L_*(rho)||_F``."""
    P = as_predual(S)
    return float(np.linalg.norm(P(rho.rho)))


def require_invariant(S, rho, settings=None):
    st = resolve(settings)
    res = invariance_residual(S, rho)
    if res > st.inv_tol * (1.0 + S.norm()):
        raise PreconditionError(f"state is not invariant: ||L_*(rho)||_F = {res:.3e}", residual=res)
    return res


def stationary_projector(S, settings=None):
    """Spectral projector onto the kernel of the predual generator.

    With right null vectors ``X`` and left null vectors ``Y`` of ``L_*``, the
    projector is ``X (Y^H X)^{-1} Y^H``. For a QMS the zero eigenvalue is
    semisimple, so this equals ``lim_t exp(t L_*)`` averaged (the ergodic
    projection) and maps states to invariant states.
    """
    st = resolve(settings)
    P = as_predual(S).mat
    n = P.shape[0]
    u, sv, vh = np.linalg.svd(P)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    null = sv <= st.kernel_tol * scale
    X = vh.conj().T[:, null]
    Y = u[:, null]
    if X.shape[1] == 0:
        raise KernelError("predual generator has trivial kernel (trace preservation fails)")
    if sv[0] == 0:
        return np.eye(n, dtype=complex), n
    gram = Y.conj().T @ X
    try:
        proj = X @ np.linalg.solve(gram, Y.conj().T)
    except np.linalg.LinAlgError as exc:
        raise KernelError(f"zero eigenvalue of the predual generator is not semisimple: {exc}") from exc
    return proj, X.shape[1]


def _state_from_vec(v, settings):
    m = mx.devectorize(v)
    m = 0.5 * (m + m.conj().T)
    m = m / np.real(np.trace(m))
    w, u = mx.herm_eig(m)
    # clip eigenvalues at round-off level
    w = np.where(w < 0, 0.0, w)
    m = (u * w) @ u.conj().T
    return DensityState.from_matrix(m / np.real(np.trace(m)), settings)


def invariant_states(S, settings=None):
    """A basis of the invariant-state cone's linear span, made of density matrices.

    The first state returned is the image of ``1/d`` under the stationary
    projector, which has maximal support among invariant states; the remaining
    ones are images of rank-one projectors, kept while they are linearly
    independent.
    """
    st = resolve(settings)
    d = S.dim
    proj, k = stationary_projector(S, st)
    candidates = [np.eye(d) / d]
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        candidates.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            for phase in (1.0, 1j):
                v = np.zeros(d, dtype=complex)
                v[i], v[j] = 1.0, phase
                candidates.append(np.outer(v, v.conj()) / 2.0)
    chosen, vecs = [], []
    for c in candidates:
        if len(chosen) == k:
            break
        v = proj @ mx.vectorize(c)
        tr = np.real(np.sum(v[:: d + 1]))
        if tr <= 1e-12:
            continue
        trial = np.array(vecs + [v / tr]).T
        if np.linalg.matrix_rank(trial, tol=1e-8) == len(vecs) + 1:
            vecs.append(v / tr)
            chosen.append(_state_from_vec(v, st))
    # the candidates span M_d, so their images span the whole kernel
    return chosen


def unique_faithful_invariant_state(S, settings=None):
    """The invariant state of maximal support; raises if it is not faithful."""
    states = invariant_states(S, settings)
    rho = states[0]
    require_faithful(rho)
    return rho
