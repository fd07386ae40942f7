"""Random test instances: states, special representations, classical-chain generators."""
import numpy as np
import scipy.stats

from .gksl import GkslRep, build_generator
from .stationary import DensityState, invariant_states


def ginibre(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_hermitian(rng, d, traceless=False):
    a = ginibre(rng, d)
    h = 0.5 * (a + a.conj().T)
    if traceless:
        h = h - np.trace(h) / d * np.eye(d)
    return h


def random_unitary(rng, d):
    return scipy.stats.unitary_group.rvs(d, random_state=rng)


def random_density(rng, d, min_eig=0.05):
    """A faithful state with spectrum bounded below by ``min_eig``."""
    w = rng.dirichlet(np.ones(d))
    w = min_eig + (1 - d * min_eig) * w
    u = random_unitary(rng, d)
    return DensityState((u * w) @ u.conj().T)


def random_rep(rng, d, m=None):
    m = d if m is None else m
    return GkslRep(random_hermitian(rng, d), tuple(ginibre(rng, d) / np.sqrt(d) for _ in range(m)))


def random_special_rep(rng, d, rho, m=None):
    """Random representation with ``tr(rho L_k) = 0`` and traceless ``H``."""
    m = d if m is None else m
    Ls = []
    for _ in range(m):
        L = ginibre(rng, d) / np.sqrt(d)
        Ls.append(L - np.trace(rho.rho @ L) * np.eye(d))
    return GkslRep(random_hermitian(rng, d, traceless=True), tuple(Ls))


def random_generator_with_state(rng, d, m=None):
    """Generic generator together with its (unique, faithful) invariant state."""
    rep = random_rep(rng, d, m)
    S = build_generator(rep)
    return rep, S, invariant_states(S)[0]


def chain_stationary(Q):
    """Stationary distribution of an irreducible rate matrix."""
    n = Q.shape[0]
    A = np.vstack([Q.T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(A, b, rcond=None)[0]


def random_rate_matrix(rng, n, reversible=False):
    """Random irreducible rate matrix; reversible ones come with their ``pi``."""
    if reversible:
        pi = rng.dirichlet(np.ones(n)) * 0.8 + 0.2 / n
        w = rng.uniform(0.2, 1.5, size=(n, n))
        w = np.triu(w, 1)
        w = w + w.T
        Q = w / pi[:, None]
    else:
        Q = rng.uniform(0.2, 1.5, size=(n, n))
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    pi = chain_stationary(Q)
    return Q, pi


def chain_rep(Q, pi, rng=None, dephasing=True, hamiltonian=True, basis=None):
    """Quantum embedding of a Markov chain with a privileged representation.

    Jumps ``sqrt(q_jm) |e_m><e_j|`` move population from ``j`` to ``m``; the
    state ``diag(pi)`` is invariant. Optional diagonal dephasing and a
    diagonal Hamiltonian keep the representation privileged. ``basis`` (a
    unitary) rotates everything.
    """
    n = Q.shape[0]
    rho = np.diag(pi).astype(complex)
    Ls = []
    for j in range(n):
        for m in range(n):
            if j != m and Q[j, m] > 0:
                L = np.zeros((n, n), dtype=complex)
                L[m, j] = np.sqrt(Q[j, m])
                Ls.append(L)
    H = np.zeros((n, n), dtype=complex)
    if rng is not None and dephasing:
        diag = rng.normal(size=n)
        diag = diag - pi @ diag
        Ls.append(np.diag(diag).astype(complex))
    if rng is not None and hamiltonian:
        h = rng.normal(size=n)
        H = np.diag(h - h.mean()).astype(complex)
    if basis is not None:
        U = basis
        rho = U @ rho @ U.conj().T
        H = U @ H @ U.conj().T
        Ls = [U @ L @ U.conj().T for L in Ls]
    rho = 0.5 * (rho + rho.conj().T)
    return GkslRep(H, tuple(Ls)), DensityState(rho / np.trace(rho).real)
