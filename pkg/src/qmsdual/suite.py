"""Self-checking suite over the named worked examples and the qubit family."""
from dataclasses import dataclass

import numpy as np

from . import qubit as qb
from .balance import detailed_balance_check
from .duals import dual_is_qms, s_dual_generator
from .gksl import GkslRep, build_generator, special_rep_from_superoperator
from .modular import commutes_with_modular, privileged_rep
from .stationary import invariance_residual, invariant_states


@dataclass(frozen=True)
class Check:
    example: str
    name: str
    expected: object
    actual: object
    tol: float
    passed: bool
    # a published value that this implementation cannot reproduce; see README
    known_discrepancy: bool = False

    def as_dict(self):
        return {
            "example": self.example,
            "check": self.name,
            "expected": _plain(self.expected),
            "actual": _plain(self.actual),
            "tol": self.tol,
            "passed": self.passed,
            "known_discrepancy": self.known_discrepancy,
        }


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(np.real(v)), float(np.imag(v))]
    if isinstance(v, (int, float, np.number)):
        return float(v)
    return v


def _close(ex, name, expected, actual, tol, known=False):
    ok = bool(abs(complex(actual) - complex(expected)) <= tol)
    return Check(ex, name, expected, actual, tol, ok, known)


def _flag(ex, name, expected, actual):
    return Check(ex, name, bool(expected), bool(actual), 0.0, bool(expected) == bool(actual))


def _small(ex, name, value, tol):
    return Check(ex, name, 0.0, float(value), tol, bool(value <= tol))


def check_shift(n):
    e = qb.shift_example(n)
    S, rho = e.generator, e.rho
    name = e.name
    Sh = qb.shift_operator(n)
    d0 = s_dual_generator(S, rho, 0.0)
    target = build_generator(GkslRep(np.zeros((n, n)), (Sh.conj().T,))).mat
    out = [
        _small(name, "invariance of 1/n", invariance_residual(S, rho), 1e-12),
        _small(name, "0-dual is a -> S a S^H - a", np.abs(d0.dual_gen.mat - target).max(), 1e-12),
        _flag(name, "0-dual is a QMS", True, d0.is_qms),
        _flag(name, "0-detailed balance", n == 2, detailed_balance_check(S, rho, 0.0).holds),
    ]
    if n >= 3:
        E = np.zeros((n, n))
        E[1, 1] = 1.0
        diff = S(E) - d0.dual_gen(E)
        want = np.zeros((n, n))
        want[0, 0], want[2, 2] = 1.0, -1.0
        out.append(_small(name, "(L - Lt)(|e2><e2|) = |e1><e1| - |e3><e3|", np.abs(diff - want).max(), 1e-13))
    return out


def check_driven_decay(omega, mu):
    e = qb.driven_decay_example(omega, mu)
    name = f"{e.name}(omega={omega:.6g}, mu={mu:.6g})"
    S = e.generator
    states = invariant_states(S)
    rho = states[0]
    rep = special_rep_from_superoperator(S, rho)
    L = rep.Ls[0]
    # fix the phase so that the off-diagonal entry mu is real positive
    L = L * (abs(L[1, 0]) / L[1, 0])
    return [
        _flag(name, "unique invariant state", True, len(states) == 1),
        _small(name, "invariant state matches closed form", np.abs(rho.rho - e.rho.rho).max(), 1e-12),
        _flag(name, "commutes with modular map", False, commutes_with_modular(S, rho)[0]),
        _flag(name, "0-dual is a QMS", False, dual_is_qms(S, rho, 0.0)[0]),
        _flag(name, "symmetric dual is a QMS", True, dual_is_qms(S, rho, 0.5)[0]),
        _close(name, "special L_1 scalar part", e.expected["L1_constant"], L[0, 0], 1e-10),
        _close(name, "special H sigma_1 coefficient", e.expected["H_sigma1"], qb.pauli_decompose(rep.H)[1], 1e-10),
    ]


def check_noncommuting(omega, nu, branch):
    e = qb.noncommuting_example(omega, nu, branch)
    name = f"{e.name}(omega={omega:.6g}, nu={nu:.6g})"
    S, rho = e.generator, e.rho
    r, s = e.params["r"], e.params["s"]
    H = e.rep.H
    return [
        _small(name, "invariance of diag(nu, 1-nu)", invariance_residual(S, rho), 1e-10),
        _small(name, "2 nu = (r-s)^2/(r^2+s^2)", abs(2 * nu - (r - s) ** 2 / (r ** 2 + s ** 2)), 1e-12),
        _flag(name, "H commutes with rho", False, np.linalg.norm(H @ rho.rho - rho.rho @ H) < 1e-9),
        _flag(name, "0-dual is a QMS", False, dual_is_qms(S, rho, 0.0)[0]),
        _flag(name, "symmetric dual is a QMS", True, dual_is_qms(S, rho, 0.5)[0]),
    ]


def check_averaged(omega, nu, branch):
    e = qb.averaged_example(omega, nu, branch)
    name = f"{e.name}(omega={omega:.6g}, nu={nu:.6g})"
    S, rho = e.generator, e.rho
    rep = special_rep_from_superoperator(S, rho)
    tr = float(np.real(2 * np.trace(qb.SIGMA1 @ rep.H)))
    return [
        _small(name, "invariance", invariance_residual(S, rho), 1e-10),
        _flag(name, "symmetric detailed balance", True, detailed_balance_check(S, rho, 0.5).holds),
        _close(name, "2 tr(sigma_1 H)", e.expected["two_tr_sigma1_H"], tr, 1e-8),
        _close(name, "2 tr(sigma_1 H) against literature value -2 omega", -2 * omega, tr, 1e-8, known=True),
    ]


def check_family(p, label):
    name = f"qubit-family[{label}](nu={p.nu:.6g})"
    rep = qb.qubit_family(p)
    S = build_generator(rep)
    rho = qb.diag_state(p.nu)
    special = special_rep_from_superoperator(S, rho)
    priv = privileged_rep(special, rho)
    want = np.array(p.expected_lambdas())
    got = np.array(priv.lambdas)
    lam_err = np.abs(np.sort(got) - np.sort(want)).max() if got.size == want.size else np.inf
    db = detailed_balance_check(S, rho, 0.0)
    return [
        _small(name, "invariance of diag(nu, 1-nu)", invariance_residual(S, rho), 1e-10),
        _flag(name, "0-dual is a QMS", True, dual_is_qms(S, rho, 0.0)[0]),
        _small(name, "privileged eigenvalues", lam_err, 1e-9),
        _flag(name, "0-detailed balance", True, db.holds),
        _small(name, "H - K is scalar", db.details.get("H_minus_K_nonscalar", np.inf), 1e-9),
    ]


EXAMPLE_NAMES = ("shift", "driven-decay", "noncommuting-H", "averaged", "qubit-family")


def run_examples(seed=0, names=None):
    """Run the named examples at default parameters plus one random draw each."""
    names = EXAMPLE_NAMES if not names else tuple(names)
    unknown = set(names) - set(EXAMPLE_NAMES)
    if unknown:
        raise ValueError(f"unknown example(s): {', '.join(sorted(unknown))}")
    rng = np.random.default_rng(seed)
    omega2 = float(rng.uniform(0.5, 2.0))
    mu2 = float(rng.uniform(0.5, 2.0))
    nu2 = float(rng.uniform(0.1, 0.4))
    checks = []
    if "shift" in names:
        for n in (2, 3, 4, 5, 6):
            checks += check_shift(n)
    if "driven-decay" in names:
        checks += check_driven_decay(1.0, 1.0) + check_driven_decay(omega2, mu2)
    for b in ("+", "-"):
        if "noncommuting-H" in names:
            checks += check_noncommuting(1.0, 1 / 3, b) + check_noncommuting(omega2, nu2, b)
        if "averaged" in names:
            checks += check_averaged(1.0, 1 / 3, b) + check_averaged(omega2, nu2, b)
    if "qubit-family" in names:
        nu = 1 / 3
        mu = 1.0
        fixed = qb.QubitParams(nu, lam=np.sqrt(nu / (1 - nu)) * mu, mu=mu)
        checks += check_family(fixed, "fixed") + check_family(qb.random_qubit_params(rng), "random")
    return checks


def summarize(checks, strict=True):
    """``(ok, failures)``; known discrepancies are excused only when ``strict`` is false."""
    fails = [c for c in checks if not c.passed and (strict or not c.known_discrepancy)]
    return not fails, fails
