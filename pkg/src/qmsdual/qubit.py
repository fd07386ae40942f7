"""Two-level systems: Pauli tooling, the qubit family with QMS 0-dual, named examples.

Conventions: ``sigma_0 = 1`` and ``sigma_1..3`` are the Pauli matrices; the
raising and lowering operators are ``sigma_plus = sigma_1 + i sigma_2`` and
``sigma_minus = sigma_1 - i sigma_2``, *without* a factor 1/2, so that
``sigma_plus = 2 |e_1><e_2|``. The reference state is ``diag(nu, 1 - nu)``.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matrices as mx
from .errors import PreconditionError, ShapeError
from .gksl import GkslRep, Superoperator, build_generator
from .settings import resolve
from .stationary import DensityState, powers

PAULI = mx.pauli_basis()
SIGMA0, SIGMA1, SIGMA2, SIGMA3 = PAULI
SIGMA_PLUS = SIGMA1 + 1j * SIGMA2
SIGMA_MINUS = SIGMA1 - 1j * SIGMA2


def pauli_decompose(a):
    """Coefficients ``c`` with ``a = sum_j c_j sigma_j``."""
    a = mx.as_cmat(a)
    if a.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got {a.shape}")
    return np.array([np.trace(p @ a) / 2 for p in PAULI])


def pauli_compose(c):
    c = np.asarray(c, dtype=complex)
    if c.shape != (4,):
        raise ShapeError("expected four Pauli coefficients")
    return np.tensordot(c, PAULI, axes=1)


def diag_state(nu):
    return DensityState(np.diag([nu, 1.0 - nu]).astype(complex))


def slr2_special_rep(z, nu, H=None):
    """Special representation w.r.t. ``diag(nu, 1-nu)`` from coefficient triples.

    Each triple ``(z_1, z_2, z_3)`` gives ``L = -(2 nu - 1) z_3 1 + sum_j z_j sigma_j``,
    the identity coefficient being forced by ``tr(rho L) = 0``. At most three
    linearly independent triples are admissible.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex)) if len(z) else np.zeros((0, 3), complex)
    if z.shape[1] != 3:
        raise ShapeError("coefficient triples must have length 3")
    if z.shape[0] > 3:
        raise ValueError(f"at most three jump operators on a qubit, got {z.shape[0]}")
    if z.shape[0] and np.linalg.matrix_rank(z, tol=1e-12) < z.shape[0]:
        raise ValueError("coefficient triples are linearly dependent")
    Ls = tuple(pauli_compose([-(2 * nu - 1) * zk[2], zk[0], zk[1], zk[2]]) for zk in z)
    H = np.zeros((2, 2), dtype=complex) if H is None else H
    return GkslRep(H, Ls)


@dataclass(frozen=True)
class QubitParams:
    nu: float
    v0: float = 0.0
    v3: float = 0.0
    lam: complex = 0.0
    mu: complex = 0.0
    eta: complex = 0.0

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0 or self.nu == 0.5:
            raise ValueError(f"nu must lie in (0, 1) without 1/2, got {self.nu}")

    def invariance_defect(self):
        """``|lam|^2 (1 - nu) - |mu|^2 nu``, zero iff the reference state is invariant."""
        return abs(self.lam) ** 2 * (1 - self.nu) - abs(self.mu) ** 2 * self.nu

    def invariance_consistent(self, tol=1e-12):
        scale = max(abs(self.lam) ** 2, abs(self.mu) ** 2, 1e-300)
        return abs(self.invariance_defect()) <= tol * scale

    def expected_lambdas(self):
        """Modular eigenvalues of the privileged jump operators, descending."""
        r = self.nu / (1 - self.nu)
        out = []
        if self.eta != 0:
            out.append(1.0)
        if self.lam != 0:
            out += [r, 1 / r]
        return sorted(out, reverse=True)


def family_L(nu):
    return -(2 * nu - 1) * SIGMA0 + SIGMA3


def qubit_family(p, tol=1e-12):
    """The qubit generator ``(v0 + v3 sigma_3; eta L, lam sigma_plus, mu sigma_minus)``."""
    if not p.invariance_consistent(tol):
        raise PreconditionError(
            f"|lam|^2/|mu|^2 must equal nu/(1-nu) (defect {p.invariance_defect():.3e})",
            residual=abs(p.invariance_defect()),
        )
    H = p.v0 * SIGMA0 + p.v3 * SIGMA3
    Ls = []
    if p.eta != 0:
        Ls.append(p.eta * family_L(p.nu))
    if p.lam != 0:
        Ls.append(p.lam * SIGMA_PLUS)
        Ls.append(p.mu * SIGMA_MINUS)
    return GkslRep(H, tuple(Ls))


def random_qubit_params(rng, nu_range=(0.05, 0.95), exclude=(0.45, 0.55), scale=1.0):
    """Draw family parameters; ``nu`` uniform on ``nu_range`` minus ``exclude``."""
    lo, hi = nu_range
    while True:
        nu = float(rng.uniform(lo, hi))
        if not exclude[0] < nu < exclude[1]:
            break
    mu = scale * complex(rng.normal(), rng.normal())
    lam = np.sqrt(nu / (1 - nu)) * abs(mu) * np.exp(2j * np.pi * rng.uniform())
    eta = scale * complex(rng.normal(), rng.normal())
    return QubitParams(nu, float(rng.normal()), float(rng.normal()), complex(lam), mu, eta)


# --- worked examples ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Example:
    name: str
    generator: Superoperator
    rho: Optional[DensityState]
    params: dict = field(default_factory=dict)
    rep: Optional[GkslRep] = None
    expected: dict = field(default_factory=dict)


def shift_operator(n):
    """Cyclic shift ``S e_j = e_{j+1}`` (indices mod n)."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def shift_example(n):
    S = shift_operator(n)
    rep = GkslRep(np.zeros((n, n), dtype=complex), (S,))
    return Example(
        name=f"shift-{n}",
        generator=build_generator(rep),
        rho=DensityState.maximally_mixed(n),
        params={"n": n},
        rep=rep,
        expected={"dual_qms": True, "db0": n == 2},
    )


def driven_decay_rho(omega, mu):
    D = 2 * omega ** 2 + mu ** 4
    return np.array(
        [[omega ** 2, -1j * mu ** 2 * omega], [1j * mu ** 2 * omega, omega ** 2 + mu ** 4]]
    ) / D


def driven_decay_example(omega=1.0, mu=1.0):
    """Resonantly driven decay ``H = (omega/2) sigma_1``, jump ``mu |e_2><e_1|``.

    The closed-form invariant state :func:`driven_decay_rho` belongs to the
    jump operator ``mu |e_2><e_1| = mu sigma_minus / 2``. Its special
    representation has ``L_1 = mu |e_2><e_1| + i mu^3 omega / D`` and
    ``H = (omega/2 - mu^4 omega / (2D)) sigma_1`` with ``D = 2 omega^2 + mu^4``.
    """
    L = mu * SIGMA_MINUS / 2
    rep = GkslRep(omega / 2 * SIGMA1, (L,))
    D = 2 * omega ** 2 + mu ** 4
    return Example(
        name="driven-decay",
        generator=build_generator(rep),
        rho=DensityState(driven_decay_rho(omega, mu)),
        params={"omega": omega, "mu": mu},
        rep=rep,
        expected={
            "dual_qms": False,
            "L1_constant": 1j * mu ** 3 * omega / D,
            "H_sigma1": omega / 2 - mu ** 4 * omega / (2 * D),
        },
    )


def noncommuting_rs(omega, nu, branch="+"):
    """``(r, s)`` making ``diag(nu, 1-nu)`` invariant for :func:`noncommuting_example`.

    Invariance requires ``2 nu = (r - s)^2 / (r^2 + s^2)`` and
    ``s = omega + r (4 nu^2 - 4 nu - 1) / (2 nu - 1)``. The first fixes the
    ratio ``t = r/s = (1 - 2 nu) / (1 +- 2 sqrt(nu (1 - nu)))``; the second
    then fixes ``s``.
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    sign = 1.0 if branch == "+" else -1.0
    q = 2 * np.sqrt(nu * (1 - nu))
    t = (1 - 2 * nu) / (1 + sign * q)
    s = omega * (2 * nu - 1) / ((2 * nu - 1) - t * (4 * nu ** 2 - 4 * nu - 1))
    return t * s, s


def noncommuting_example(omega=1.0, nu=1 / 3, branch="+"):
    """``H = omega sigma_1``, ``L = (1 - 2 nu) 1 + i r sigma_1 + s sigma_2 + sigma_3``.

    Special w.r.t. ``diag(nu, 1-nu)``, which is invariant for the ``(r, s)`` of
    :func:`noncommuting_rs`; ``H`` does not commute with the state.
    """
    r, s = noncommuting_rs(omega, nu, branch)
    L = (1 - 2 * nu) * SIGMA0 + 1j * r * SIGMA1 + s * SIGMA2 + SIGMA3
    rep = GkslRep(omega * SIGMA1, (L,))
    return Example(
        name=f"noncommuting-H{branch}",
        generator=build_generator(rep),
        rho=diag_state(nu),
        params={"omega": omega, "nu": nu, "branch": branch, "r": r, "s": s},
        rep=rep,
        expected={"dual_qms": False, "symmetric_dual_qms": True},
    )


def symmetric_dual_matrix(S, rho):
    """Superoperator of the symmetric dual ``rho^{-1/2} L_*(rho^{1/2} a rho^{1/2}) rho^{-1/2}``."""
    h, mh = powers(rho, 0.5), powers(rho, -0.5)
    return mx.sandwich(mh, mh) @ S.mat.conj().T @ mx.sandwich(h, h)


def averaged_example(omega=1.0, nu=1 / 3, branch="+"):
    """``(L + L')/2`` for :func:`noncommuting_example`, ``L'`` its symmetric dual.

    Self-dual for the symmetric scalar product, hence symmetric detailed balance
    with ``K = 0``. The trace ``2 tr(sigma_1 H)`` of its special-representation
    Hamiltonian equals ``4 omega`` on the ``+`` branch and ``0`` on the ``-``
    branch.
    """
    base = noncommuting_example(omega, nu, branch)
    K = 0.5 * (base.generator.mat + symmetric_dual_matrix(base.generator, base.rho))
    return Example(
        name=f"averaged{branch}",
        generator=Superoperator(K),
        rho=base.rho,
        params=dict(base.params),
        expected={
            "symmetric_db": True,
            "two_tr_sigma1_H": 4 * omega if branch == "+" else 0.0,
        },
    )


def worked_examples(omega=1.0, mu=1.0, nu=1 / 3, shifts=(2, 3, 4)):
    """All named example instances at the given parameters."""
    out = [shift_example(n) for n in shifts]
    out.append(driven_decay_example(omega, mu))
    for b in ("+", "-"):
        out.append(noncommuting_example(omega, nu, b))
        out.append(averaged_example(omega, nu, b))
    return out
