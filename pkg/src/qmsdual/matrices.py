"""Dense complex matrix kernel.

Conventions
-----------
Vectorization stacks columns, so that ``vec(A X B) = (B^T kron A) vec(X)``.
With this choice the superoperators of left and right multiplication are a
single Kronecker product each, see :func:`left`, :func:`right` and
:func:`sandwich`.

The Choi matrix of a map ``Phi`` on ``M_d`` is
``C(Phi) = sum_ij |e_i><e_j| kron Phi(|e_i><e_j|)``.
"""
import numpy as np
import scipy.linalg

from .errors import KernelError, ShapeError
from .settings import resolve


def as_cmat(a, square=True):
    """Return ``a`` as a finite complex 2-d array (copy-free when possible)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def is_hermitian(m, tol=None, settings=None):
    m = np.asarray(m)
    tol = resolve(settings).herm_tol if tol is None else tol
    return np.linalg.norm(m - m.conj().T) <= tol * (1.0 + np.linalg.norm(m))


def as_herm(m, settings=None):
    """Validate Hermiticity and return the exactly Hermitian part of ``m``."""
    m = as_cmat(m)
    if not is_hermitian(m, settings=settings):
        dev = np.linalg.norm(m - m.conj().T)
        raise ValueError(f"matrix is not Hermitian (||M - M^H||_F = {dev:.3e})")
    return 0.5 * (m + m.conj().T)


def herm_eig(m):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Returns ``(w, u)`` with ``m = u @ diag(w) @ u^H`` and ``u`` unitary.
    """
    m = as_cmat(m)
    try:
        w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    except np.linalg.LinAlgError as exc:
        raise KernelError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return w, u


def herm_func(m, f):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, u = herm_eig(m)
    return (u * f(w)) @ u.conj().T


def vectorize(a):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    return a.reshape(-1, order="F")


def devectorize(v, shape=None):
    v = np.asarray(v).reshape(-1)
    if shape is None:
        d = int(round(np.sqrt(v.size)))
        if d * d != v.size:
            raise ShapeError(f"length {v.size} is not a perfect square")
        shape = (d, d)
    return v.reshape(shape, order="F")


def hs_inner(a, b):
    """Hilbert-Schmidt inner product ``tr(a^H b)``, conjugate-linear in ``a``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def expm(m, t=1.0):
    """``exp(t m)`` by scaling and squaring (Pade)."""
    m = as_cmat(m)
    return scipy.linalg.expm(t * m)


def lstsq(a, b, rank_fallback=False, rcond=None):
    """Least-squares solve of ``a x = b``.

    Returns ``(x, residual)`` with ``residual = ||a x - b||_2`` (Frobenius for
    a matrix right-hand side). Rank-deficient systems raise unless
    ``rank_fallback`` is set, in which case the minimum-norm solution is used.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ShapeError(f"incompatible system shapes {a.shape} and {b.shape}")
    if a.shape[1] == 0:
        return np.zeros((0,) + b.shape[1:], dtype=np.result_type(a, b)), float(np.linalg.norm(b))
    try:
        x, _, rank, sv = np.linalg.lstsq(a, b, rcond=rcond)
    except np.linalg.LinAlgError as exc:
        raise KernelError(f"least squares did not converge: {exc}") from exc
    if rank < a.shape[1] and not rank_fallback:
        raise KernelError(
            f"rank-deficient system: rank {rank} < {a.shape[1]} columns "
            f"(smallest singular value {sv[-1]:.3e})"
        )
    return x, float(np.linalg.norm(a @ x - b))


# --- superoperators on vectorized d x d matrices --------------------------------


def left(a):
    """Superoperator of ``X -> a X``."""
    a = np.asarray(a)
    return np.kron(np.eye(a.shape[1]), a)


def right(b):
    """Superoperator of ``X -> X b``."""
    b = np.asarray(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def sandwich(a, b):
    """Superoperator of ``X -> a X b``."""
    return np.kron(np.asarray(b).T, np.asarray(a))


def commutator_superop(k):
    """Superoperator of ``X -> [k, X]``."""
    return left(k) - right(k)


def apply_superop(s, a):
    return devectorize(np.asarray(s) @ vectorize(a))


def matrix_units(d):
    """All ``d*d`` matrix units in column-stacking order: unit ``n`` is ``devectorize(e_n)``."""
    units = np.zeros((d * d, d, d), dtype=complex)
    for n in range(d * d):
        units[n, n % d, n // d] = 1.0
    return units


def superop_outputs(s):
    """Images of all matrix units; ``out[n] = devectorize(s[:, n])``."""
    s = np.asarray(s)
    d = int(round(np.sqrt(s.shape[0])))
    return s.T.reshape(d * d, d, d).transpose(0, 2, 1)


def superop_from_function(f, d):
    """Assemble the superoperator of a linear map given as a Python callable."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for n, e in enumerate(matrix_units(d)):
        s[:, n] = vectorize(f(e))
    return s


def choi(s):
    """Choi matrix ``sum_ij |e_i><e_j| kron Phi(|e_i><e_j|)`` of a superoperator."""
    s = np.asarray(s)
    d = int(round(np.sqrt(s.shape[0])))
    out = superop_outputs(s)
    c = np.zeros((d * d, d * d), dtype=complex)
    for n in range(d * d):
        i, j = n % d, n // d
        c[i * d:(i + 1) * d, j * d:(j + 1) * d] = out[n]
    return c


def kraus_from_choi_vector(v, d):
    """Operator ``K`` such that ``|v><v|`` is the Choi matrix of ``a -> K^H a K``."""
    return np.conj(np.asarray(v).reshape(d, d))


def choi_vector(k):
    """Inverse of :func:`kraus_from_choi_vector`."""
    return np.conj(np.asarray(k)).reshape(-1)


def unitarity_residual(u):
    u = np.asarray(u)
    if u.size == 0:
        return 0.0
    return float(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])))


def normalize_phase(a, rel=1e-9):
    """Rotate ``a`` by a global phase so its first dominant entry is real positive."""
    flat = np.asarray(a).reshape(-1)
    mags = np.abs(flat)
    top = mags.max() if flat.size else 0.0
    if top == 0.0:
        return np.asarray(a), 1.0
    idx = int(np.argmax(mags >= (1.0 - rel) * top))
    phase = np.conj(flat[idx]) / mags[idx]
    return np.asarray(a) * phase, phase


def pauli_basis():
    """The Pauli matrices ``sigma_0..sigma_3``."""
    return np.array(
        [
            [[1, 0], [0, 1]],
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )


def traceless_hermitian_basis(d):
    """HS-orthonormal basis of traceless Hermitian ``d x d`` matrices (generalized Gell-Mann)."""
    basis = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1.0 / np.sqrt(2)
            basis.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j / np.sqrt(2)
            m[k, j] = 1j / np.sqrt(2)
            basis.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return basis
