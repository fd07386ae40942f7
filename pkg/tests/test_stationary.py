import numpy as np
import pytest

from qmsdual import gksl, instances as ins, matrices as mx
from qmsdual import stationary as stn
from qmsdual.errors import PreconditionError
from qmsdual.qubit import driven_decay_example, driven_decay_rho, shift_example


def test_density_state_validation():
    with pytest.raises(ValueError):
        stn.DensityState(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        stn.DensityState(np.diag([1.5, -0.5]))
    rho = stn.DensityState(np.diag([0.2, 0.8]))
    assert np.allclose(rho.eigenvalues, [0.8, 0.2])
    assert np.allclose(rho.eigenvectors[:, 0], [0, 1]) or np.allclose(rho.eigenvectors[:, 0], [0, -1])


def test_faithfulness():
    assert stn.faithfulness_check(stn.DensityState.maximally_mixed(3)) == (True, pytest.approx(1 / 3))
    pure = stn.DensityState(np.diag([1.0, 0.0]))
    ok, m = stn.faithfulness_check(pure)
    assert not ok and m == 0.0


def test_driven_decay_state_faithful_with_explicit_spectrum():
    omega, mu = 1.0, 1.0
    rho = stn.DensityState(driven_decay_rho(omega, mu))
    D = 2 * omega ** 2 + mu ** 4
    # eigenvalues of the closed form: (1 +- sqrt(mu^8 + 4 mu^4 omega^2)/D)/2
    r = np.sqrt(mu ** 8 + 4 * mu ** 4 * omega ** 2) / D
    assert rho.faithful
    assert np.isclose(rho.min_eigenvalue, (1 - r) / 2)


def test_powers(rng):
    rho = ins.random_density(rng, 4)
    assert np.allclose(stn.powers(rho, 0), np.eye(4))
    assert np.allclose(stn.powers(rho, 1), rho.rho)
    h = stn.powers(rho, 0.5)
    assert np.linalg.norm(h @ h - rho.rho) <= 1e-13
    assert np.allclose(stn.powers(rho, -1) @ rho.rho, np.eye(4))


def test_negative_power_of_singular_state_rejected():
    pure = stn.DensityState(np.diag([1.0, 0.0]))
    assert np.allclose(stn.powers(pure, 0), np.eye(2))
    with pytest.raises(PreconditionError):
        stn.powers(pure, -0.5)


def test_zero_generator_kernel():
    gen = gksl.build_generator(gksl.GkslRep(np.zeros((2, 2)), ()))
    proj, k = stn.stationary_projector(gen)
    assert k == 4
    states = stn.invariant_states(gen)
    assert len(states) == 4
    assert np.allclose(states[0].rho, np.eye(2) / 2)
    span = np.array([mx.vectorize(s.rho) for s in states])
    assert np.linalg.matrix_rank(span) == 4


def test_shift_invariant_state():
    for n in (2, 3, 5):
        ex = shift_example(n)
        states = stn.invariant_states(ex.generator)
        assert np.allclose(states[0].rho, np.eye(n) / n)
        assert all(stn.invariance_residual(ex.generator, s) <= 1e-10 for s in states)


def test_driven_decay_unique_state():
    for omega, mu in [(1.0, 1.0), (0.6, 1.7)]:
        ex = driven_decay_example(omega, mu)
        states = stn.invariant_states(ex.generator)
        assert len(states) == 1
        assert np.abs(states[0].rho - driven_decay_rho(omega, mu)).max() <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_invariant_states_are_stationary_under_the_flow(rng, d):
    _, gen, _ = ins.random_generator_with_state(rng, d)
    pre = gksl.as_predual(gen)
    for rho in stn.invariant_states(gen):
        assert np.linalg.norm(pre(rho.rho)) <= 1e-10
        for t in (0.5, 2.0):
            T = mx.expm(pre.mat, t)
            assert np.linalg.norm(mx.apply_superop(T, rho.rho) - rho.rho) <= 1e-9


def test_block_structure_gives_multiple_states(rng):
    # two decoupled amplitude-damping blocks: invariant states live on each block
    L1 = np.zeros((4, 4))
    L1[0, 1] = 1.0
    L2 = np.zeros((4, 4))
    L2[2, 3] = 1.0
    gen = gksl.build_generator(gksl.GkslRep(np.zeros((4, 4)), (L1, L2)))
    states = stn.invariant_states(gen)
    assert len(states) == 4  # |0><0|, |2><2| and the two coherences between them
    assert not states[0].faithful
    for s in states:
        assert stn.invariance_residual(gen, s) <= 1e-12
    with pytest.raises(PreconditionError):
        stn.unique_faithful_invariant_state(gen)


def test_require_invariant(rng):
    _, gen, rho = ins.random_generator_with_state(rng, 3)
    stn.require_invariant(gen, rho)
    with pytest.raises(PreconditionError):
        stn.require_invariant(gen, stn.DensityState.maximally_mixed(3))
