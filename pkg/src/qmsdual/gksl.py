"""GKSL representations of generators of uniformly continuous QMSs.

A representation ``(H, L_1..L_m)`` defines

    L(a) = i[H, a] - 1/2 sum_k (L_k^H L_k a - 2 L_k^H a L_k + a L_k^H L_k)
         = G^H a + a G + sum_k L_k^H a L_k,      G = -iH - 1/2 sum_k L_k^H L_k.

It is *special* with respect to a state rho when ``tr(rho L_k) = 0`` for every
``k`` and ``{1, L_1, ..., L_m}`` is linearly independent; such a representation
is unique up to ``H -> H + alpha`` and a unitary mixing of the ``L_k``. We fix
the first freedom by ``tr(H) = 0``.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import matrices as mx
from .errors import InternalInconsistencyError, NotQMSGeneratorError, ShapeError
from .settings import resolve

GENERATOR = "generator"
PREDUAL = "predual_generator"
MAP = "map"
_KINDS = (GENERATOR, PREDUAL, MAP)


@dataclass(frozen=True, eq=False)
class GkslRep:
    H: np.ndarray
    Ls: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        H = mx.as_herm(self.H)
        d = H.shape[0]
        Ls = tuple(mx.as_cmat(L) for L in self.Ls)
        for L in Ls:
            if L.shape != (d, d):
                raise ShapeError(f"jump operator of shape {L.shape} does not match H ({d}x{d})")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "Ls", Ls)

    @property
    def dim(self):
        return self.H.shape[0]

    @property
    def m(self):
        return len(self.Ls)

    @classmethod
    def dissipative(cls, Ls, d=None):
        """Representation with ``H = 0``."""
        Ls = [np.asarray(L, dtype=complex) for L in Ls]
        d = Ls[0].shape[0] if d is None else d
        return cls(np.zeros((d, d), dtype=complex), tuple(Ls))


@dataclass(frozen=True, eq=False)
class Superoperator:
    """A ``d^2 x d^2`` matrix acting on column-stacked ``d x d`` matrices."""

    mat: np.ndarray
    kind: str = GENERATOR
    dim: int = field(init=False)

    def __post_init__(self):
        mat = mx.as_cmat(self.mat)
        d = int(round(np.sqrt(mat.shape[0])))
        if d * d != mat.shape[0]:
            raise ShapeError(f"superoperator size {mat.shape[0]} is not a square")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown superoperator kind {self.kind!r}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dim", d)

    def __call__(self, a):
        return mx.apply_superop(self.mat, a)

    def adjoint(self):
        """Hilbert-Schmidt adjoint; swaps generator and predual generator."""
        kind = {GENERATOR: PREDUAL, PREDUAL: GENERATOR}.get(self.kind, MAP)
        return Superoperator(self.mat.conj().T, kind)

    def norm(self):
        return float(np.linalg.norm(self.mat))


@dataclass(frozen=True, eq=False)
class GOperator:
    """``G = -iH - 1/2 sum_k L_k^H L_k``."""

    G: np.ndarray

    @property
    def hamiltonian(self):
        return 0.5j * (self.G - self.G.conj().T)

    @property
    def dissipative_part(self):
        """Hermitian part of ``G``, equal to ``-1/2 sum_k L_k^H L_k``."""
        return 0.5 * (self.G + self.G.conj().T)


def build_generator(rep):
    """Superoperator of the Heisenberg-picture generator of ``rep``."""
    d = rep.dim
    eye = np.eye(d)
    mat = 1j * mx.commutator_superop(rep.H)
    for L in rep.Ls:
        Ld = L.conj().T
        LdL = Ld @ L
        mat = mat - 0.5 * (np.kron(eye, LdL) + np.kron(LdL.T, eye)) + np.kron(L.T, Ld)
    return Superoperator(mat, GENERATOR)


def build_predual(rep):
    """Superoperator of the Schroedinger-picture (predual) generator of ``rep``."""
    d = rep.dim
    eye = np.eye(d)
    mat = -1j * mx.commutator_superop(rep.H)
    for L in rep.Ls:
        Ld = L.conj().T
        LdL = Ld @ L
        mat = mat - 0.5 * (np.kron(eye, LdL) + np.kron(LdL.T, eye)) + np.kron(Ld.T, L)
    return Superoperator(mat, PREDUAL)


def as_generator(S):
    """The Heisenberg-picture generator behind ``S`` (a generator or predual)."""
    if S.kind == GENERATOR:
        return S
    if S.kind == PREDUAL:
        return S.adjoint()
    raise ValueError("expected a generator or predual generator, got a plain map")


def as_predual(S):
    return as_generator(S).adjoint()


def compute_G(rep):
    G = -1j * rep.H
    for L in rep.Ls:
        G = G - 0.5 * L.conj().T @ L
    return GOperator(G)


def generator_from_G(G, Ls):
    """Superoperator of ``a -> G^H a + a G + sum_k L_k^H a L_k``."""
    G = np.asarray(G)
    mat = mx.left(G.conj().T) + mx.right(G)
    for L in Ls:
        mat = mat + np.kron(L.T, L.conj().T)
    return Superoperator(mat, GENERATOR)


# --- structural checks -------------------------------------------------------------


def unitality_residual(S):
    """``||L(1)||_F`` for a generator."""
    d = S.dim
    return float(np.linalg.norm(S.mat @ mx.vectorize(np.eye(d))))


def trace_preservation_residual(S):
    """``max_x |tr(L_*(x))|`` over matrix units, for a predual generator."""
    d = S.dim
    trace_row = mx.vectorize(np.eye(d)).conj() @ S.mat
    return float(np.abs(trace_row).max())


def hermiticity_preservation_residual(S):
    """``max_n ||S(E_n^H) - S(E_n)^H||_F`` over matrix units."""
    d = S.dim
    out = mx.superop_outputs(S.mat)
    perm = np.array([(n // d) + d * (n % d) for n in range(d * d)])
    diff = out[perm] - out.conj().transpose(0, 2, 1)
    return float(np.sqrt((np.abs(diff) ** 2).sum(axis=(1, 2))).max())


def ccp_spectrum(S):
    """Spectrum of ``P C(L) P`` with ``P`` the projection orthogonal to the maximally entangled vector."""
    d = S.dim
    c = mx.choi(S.mat)
    omega = mx.vectorize(np.eye(d)).reshape(-1) / np.sqrt(d)
    # |omega> = sum_i e_i (x) e_i / sqrt(d) is the flattened identity in either ordering
    P = np.eye(d * d) - np.outer(omega, omega.conj())
    w, _ = mx.herm_eig(P @ c @ P)
    return w, float(np.abs(np.linalg.eigvalsh(0.5 * (c + c.conj().T))).max()) if c.size else 0.0


def generator_diagnostics(S, settings=None):
    """Residuals for the three defining properties of a QMS generator.

    Returns a dict with ``unitality``, ``hermiticity``, ``ccp_min_eig`` and the
    boolean ``is_generator``; the thresholds are relative to ``||S||_F``.
    """
    st = resolve(settings)
    scale = S.norm()
    unit = unitality_residual(S)
    herm = hermiticity_preservation_residual(S)
    w, cnorm = ccp_spectrum(S)
    min_eig = float(w[0]) if w.size else 0.0
    ok = (
        unit <= st.gen_tol * scale + 1e-14
        and herm <= st.gen_tol * scale + 1e-14
        and min_eig >= -st.ccp_tol * max(cnorm, 1e-300)
    )
    return {
        "unitality": unit,
        "hermiticity": herm,
        "ccp_min_eig": min_eig,
        "is_generator": bool(ok),
    }


def validate_generator(S, settings=None):
    diag = generator_diagnostics(S, settings)
    if not diag["is_generator"]:
        raise NotQMSGeneratorError(
            "not a QMS generator: "
            f"||L(1)|| = {diag['unitality']:.3e}, "
            f"*-map defect = {diag['hermiticity']:.3e}, "
            f"min eigenvalue of P C(L) P = {diag['ccp_min_eig']:.3e}",
            min_eigenvalue=diag["ccp_min_eig"],
        )
    return diag


# --- recovering the special representation -----------------------------------------


def _raw_G(S, rho):
    """``M`` with ``M u = sum_k rho_k L(|u><e_k|) e_k``; equals ``G^H + tr(rho G) 1``."""
    d = S.dim
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        e = rho.eigenvectors[:, k]
        for j in range(d):
            u = np.zeros(d, dtype=complex)
            u[j] = 1.0
            out[:, j] += rho.eigenvalues[k] * (S(np.outer(u, e.conj())) @ e)
    return out


def _fix_hamiltonian_gauge(G):
    """Remove ``i * Im(tr G)/d`` so the Hamiltonian ``i(G - G^H)/2`` is traceless."""
    d = G.shape[0]
    return G - 1j * np.imag(np.trace(G)) / d * np.eye(d)


def recover_G_from_generator(S, rho, settings=None):
    """The ``G`` of the special representation of ``S`` w.r.t. ``rho`` (``tr H = 0`` gauge).

    ``M = sum_k rho_k L(|.><e_k|) e_k`` gives ``G`` up to the scalar ``tr(rho G)``.
    Its imaginary part is the Hamiltonian gauge; its real part equals
    ``-1/2 sum_k tr(rho L_k^H L_k)``, which is read off from the Choi matrix of
    the completely positive remainder as ``<r|C|r>/2``, ``r`` the vector of the
    functional ``x -> tr(rho x)``.
    """
    S = as_generator(S)
    if unitality_residual(S) > resolve(settings).gen_tol * S.norm() + 1e-14:
        raise NotQMSGeneratorError("L(1) != 0: not a generator of a Markov semigroup")
    d = S.dim
    G_hat = _raw_G(S, rho).conj().T
    phi = S.mat - mx.left(G_hat.conj().T) - mx.right(G_hat)
    c = mx.choi(phi)
    r = mx.choi_vector(rho.rho.T).conj()
    gamma = 0.5 * float(np.real(np.vdot(r, c @ r)))
    G = _fix_hamiltonian_gauge(G_hat + gamma * np.eye(d))
    return GOperator(G)


def _kraus_sort_key(k):
    flat = k.reshape(-1)
    return tuple(np.round(np.concatenate([flat.real, flat.imag]), 12))


def _orthogonal_kraus(vectors, d, tol):
    """HS-orthogonal Kraus operators spanning the same CP map as the given Choi vectors.

    ``vectors`` has the Choi vectors as columns. Returned operators are ordered by
    descending Choi eigenvalue, ties broken lexicographically on the entries,
    with a deterministic global phase.
    """
    if vectors.shape[1] == 0:
        return []
    u, sv, _ = np.linalg.svd(vectors, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return []
    keep = sv > np.sqrt(tol) * sv[0]
    ops = []
    for col, s in zip(u.T[keep], sv[keep]):
        K = mx.kraus_from_choi_vector(col * s, d)
        ops.append((s * s, mx.normalize_phase(K)[0]))
    top = ops[0][0]
    ops.sort(key=lambda p: (-round(p[0] / top, 9), _kraus_sort_key(p[1])))
    return [K for _, K in ops]


def special_rep_from_superoperator(S, rho, settings=None, check=True):
    """Special GKSL representation of ``S`` with respect to the faithful state ``rho``.

    Steps: split off ``G^H a + a G`` using the ``G`` read off from ``S`` and
    ``rho``; diagonalize the Choi matrix of the completely positive remainder;
    shift each Kraus operator by ``tr(rho K) 1`` (compensating in ``G``);
    re-orthogonalize, dropping null directions; fix ``tr H = 0``.
    """
    st = resolve(settings)
    S = as_generator(S)
    validate_generator(S, st)
    d = S.dim
    G = _raw_G(S, rho).conj().T
    phi = S.mat - mx.left(G.conj().T) - mx.right(G)
    w, v = mx.herm_eig(mx.choi(phi))
    top = max(abs(w[-1]), abs(w[0])) if w.size else 0.0
    if top > 0 and w[0] < -st.ccp_tol * top:
        raise NotQMSGeneratorError(
            f"completely positive part has a negative Choi eigenvalue {w[0]:.3e}",
            min_eigenvalue=float(w[0]),
        )
    keep = w > st.choi_tol * top if top > 0 else np.zeros(w.shape, bool)
    kraus = [mx.kraus_from_choi_vector(v[:, i] * np.sqrt(w[i]), d) for i in np.flatnonzero(keep)]

    shifted = []
    for K in kraus:
        c = np.trace(rho.rho @ K)
        L = K - c * np.eye(d)
        G = G + np.conj(c) * L + 0.5 * abs(c) ** 2 * np.eye(d)
        shifted.append(L)
    vectors = np.array([mx.choi_vector(L) for L in shifted]).T if shifted else np.zeros((d * d, 0))
    Ls = _orthogonal_kraus(vectors, d, st.choi_tol)
    G = _fix_hamiltonian_gauge(G)
    H = 0.5j * (G - G.conj().T)
    rep = GkslRep(0.5 * (H + H.conj().T), tuple(Ls))
    if check:
        err = np.linalg.norm(build_generator(rep).mat - S.mat)
        if err > 1e-7 * (1.0 + S.norm()):
            raise InternalInconsistencyError(
                f"recovered representation does not reproduce the generator (error {err:.3e})"
            )
    return rep


def special_diagnostics(rep, rho, settings=None):
    """Residuals of the special-representation conditions w.r.t. ``rho``."""
    st = resolve(settings)
    d = rep.dim
    traces = [abs(np.trace(rho.rho @ L)) for L in rep.Ls]
    gram_vecs = [np.eye(d) / np.sqrt(d)] + [L / max(np.linalg.norm(L), 1e-300) for L in rep.Ls]
    A = np.array([mx.vectorize(x) for x in gram_vecs]).T
    sv = np.linalg.svd(A, compute_uv=False)
    min_sv = float(sv[-1]) if sv.size else 1.0
    max_trace = max(traces, default=0.0)
    return {
        "max_abs_tr_rho_L": float(max_trace),
        "min_singular_value": min_sv,
        "is_special": bool(max_trace <= st.op_tol * (1 + max((np.linalg.norm(L) for L in rep.Ls), default=0))
                           and min_sv >= st.op_tol),
    }


def mix(rep, u, alpha=0.0):
    """The representation ``(H + alpha, sum_j u_kj L_j)``; generates the same semigroup for unitary ``u``."""
    u = np.asarray(u)
    Ls = [sum(u[k, j] * rep.Ls[j] for j in range(rep.m)) for k in range(u.shape[0])]
    return GkslRep(rep.H + alpha * np.eye(rep.dim), tuple(Ls))


def semigroup_map(S, t):
    """``T_t = exp(t L)`` as a superoperator of kind ``map``."""
    return Superoperator(mx.expm(S.mat, t), MAP)
