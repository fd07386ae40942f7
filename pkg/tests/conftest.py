import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def loop_generator(H, Ls, a):
    """Direct evaluation of i[H,a] - 1/2 sum (L^H L a - 2 L^H a L + a L^H L)."""
    out = 1j * (H @ a - a @ H)
    for L in Ls:
        Ld = L.conj().T
        out = out - 0.5 * (Ld @ L @ a - 2 * Ld @ a @ L + a @ Ld @ L)
    return out


def loop_predual(H, Ls, x):
    out = -1j * (H @ x - x @ H)
    for L in Ls:
        Ld = L.conj().T
        out = out - 0.5 * (x @ Ld @ L - 2 * L @ x @ Ld + Ld @ L @ x)
    return out


def unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)``; the lines are printed in the terminal summary."""

    def record(number, passed, detail=""):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip()
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
