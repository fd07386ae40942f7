"""One test per acceptance criterion; each records a PASS/FAIL line."""
import numpy as np
import pytest

from qmsdual import balance as bl, duals, gksl, instances as ins, qubit as qb
from qmsdual.errors import NoPrivilegedRepError
from qmsdual.modular import commutes_with_modular, privileged_rep_from_generator
from qmsdual.stationary import invariance_residual, invariant_states, powers

SEED = 20240611


def test_criterion_01_shift(criterion):
    worst_dual, worst_eval, min_comm = 0.0, 0.0, np.inf
    fails_ok = True
    for n in range(3, 7):
        ex = qb.shift_example(n)
        Sh = qb.shift_operator(n)
        dual = duals.s_dual_generator(ex.generator, ex.rho, 0.0).dual_gen
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1
                worst_dual = max(worst_dual, np.abs(dual(e) - (Sh @ e @ Sh.conj().T - e)).max())
        r = bl.detailed_balance_check(ex.generator, ex.rho, 0.0)
        fails_ok &= not r.holds
        min_comm = min(min_comm, r.K_residual)
        E = np.zeros((n, n))
        E[1, 1] = 1
        want = np.zeros((n, n))
        want[0, 0], want[2, 2] = 1, -1
        worst_eval = max(worst_eval, np.abs(ex.generator(E) - dual(E) - want).max())
    ex2 = qb.shift_example(2)
    n2 = [bl.detailed_balance_check(ex2.generator, ex2.rho, s) for s in (0.0, 0.3, 0.5, 0.7)]
    n2_ok = all(r.holds and r.K_residual <= 1e-10 for r in n2)
    ok = worst_dual <= 1e-12 and fails_ok and min_comm > 1e-3 and worst_eval <= 1e-13 and n2_ok
    criterion(1, ok, f"dual {worst_dual:.1e}, min K residual {min_comm:.2f}, eval {worst_eval:.1e}, n=2 DB {n2_ok}")
    assert ok


def test_criterion_02_driven_decay(criterion):
    rng = np.random.default_rng(SEED)
    params = [(1.0, 1.0), (float(rng.uniform(0.3, 3)), float(rng.uniform(0.3, 3)))]
    ok, worst = True, 0.0
    for omega, mu in params:
        ex = qb.driven_decay_example(omega, mu)
        states = invariant_states(ex.generator)
        D = 2 * omega ** 2 + mu ** 4
        closed = np.array([[omega ** 2, -1j * mu ** 2 * omega], [1j * mu ** 2 * omega, omega ** 2 + mu ** 4]]) / D
        err = np.abs(states[0].rho - closed).max()
        worst = max(worst, err)
        rho = states[0]
        ok &= len(states) == 1 and err <= 1e-12
        ok &= not commutes_with_modular(ex.generator, rho)[0]
        ok &= not duals.dual_is_qms(ex.generator, rho, 0.0)[0]
        ok &= duals.dual_is_qms(ex.generator, rho, 0.5)[0]
    criterion(2, ok, f"state error {worst:.1e} at (omega, mu) = {params}")
    assert ok


def test_criterion_03_qubit_family(criterion):
    rng = np.random.default_rng(SEED)
    bad = 0
    worst = {"inv": 0.0, "lam": 0.0, "unit": 0.0, "HK": 0.0}
    for _ in range(200):
        p = qb.random_qubit_params(rng)
        gen = gksl.build_generator(qb.qubit_family(p))
        rho = qb.diag_state(p.nu)
        inv = invariance_residual(gen, rho)
        r = bl.detailed_balance_check(gen, rho, 0.0)
        got = np.sort(r.details.get("lambdas", []))
        want = np.sort(p.expected_lambdas())
        lam_err = np.abs(got - want).max() if got.size == want.size else np.inf
        unit = r.details.get("intertwiner_unitarity", np.inf)
        hk = r.details["H_minus_K_nonscalar"]
        for k, v in zip(worst, (inv, lam_err, unit, hk)):
            worst[k] = max(worst[k], v)
        good = inv <= 1e-10 and lam_err <= 1e-9 and r.holds and unit <= 1e-8 and hk <= 1e-9
        bad += not good
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    criterion(3, bad == 0, f"{bad}/200 counterexamples; worst {detail}")
    assert bad == 0


@pytest.mark.xfail(strict=True, reason="published trace value -2 omega is not reproducible; see the decisions ledger")
def test_criterion_04_averaged_generator(criterion):
    omega, nu = 1.0, 1 / 3
    ok, traces = True, {}
    for b in "+-":
        ex = qb.noncommuting_example(omega, nu, b)
        r, s = ex.params["r"], ex.params["s"]
        S, rho = ex.generator, ex.rho
        pre = np.abs(S.mat.conj().T @ rho.rho.reshape(-1, order="F")).max()
        ok &= pre <= 1e-10
        ok &= abs(2 * nu - (r - s) ** 2 / (r ** 2 + s ** 2)) <= 1e-12
        ok &= not duals.dual_is_qms(S, rho, 0.0)[0]
        ok &= duals.dual_is_qms(S, rho, 0.5)[0]
        h, mh = powers(rho, 0.5), powers(rho, -0.5)
        sym = (np.kron(mh.T, mh) @ S.mat.conj().T @ np.kron(h.T, h))
        Kgen = gksl.Superoperator(0.5 * (S.mat + sym))
        ok &= bl.detailed_balance_check(Kgen, rho, 0.5).holds
        Hk = gksl.special_rep_from_superoperator(Kgen, rho).H
        traces[b] = float(np.real(2 * np.trace(qb.SIGMA1 @ Hk)))
        ok &= abs(traces[b] - (-2 * omega)) <= 1e-8
    shown = ", ".join(f"{b}: {v:.6g}" for b, v in traces.items())
    criterion(4, ok, f"2 tr(sigma_1 K) = {{{shown}}}, target {-2 * omega:g}")
    assert ok


def test_criterion_05_duality_identity(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(100):
        d = (2, 3, 4)[k % 3]
        _, gen, rho = ins.random_generator_with_state(rng, d)
        units = [np.eye(d * d)[:, i].reshape(d, d, order="F") for i in range(d * d)]
        for s in (0.0, 0.3, 0.5, 0.7):
            dual = duals.s_dual_generator(gen, rho, s).dual_gen
            p1, ps = powers(rho, 1 - s), powers(rho, s)
            La = [p1 @ dual(a) @ ps for a in units]
            Lb = [gen(b) for b in units]
            A = np.array([np.trace(x @ b) for x in La for b in units])
            B = np.array([np.trace(p1 @ a @ ps @ y) for a in units for y in Lb])
            worst = max(worst, np.abs(A - B).max())
    criterion(5, worst <= 1e-10, f"max basis-pair residual {worst:.1e}")
    assert worst <= 1e-10


def _mixed_instances(rng):
    out = []
    for k in range(12):
        Q, pi = ins.random_rate_matrix(rng, 2 + k % 3, reversible=k % 2 == 0)
        rep, rho = ins.chain_rep(Q, pi, rng, basis=ins.random_unitary(rng, len(pi)))
        out.append((gksl.build_generator(rep), rho))
    for _ in range(10):
        p = qb.random_qubit_params(rng)
        out.append((gksl.build_generator(qb.qubit_family(p)), qb.diag_state(p.nu)))
    for k in range(20):
        _, gen, rho = ins.random_generator_with_state(rng, 2 + k % 3)
        out.append((gen, rho))
    for omega in (1.0, 0.5, 2.0, 1.4):
        ex = qb.driven_decay_example(omega, 1.0)
        out.append((ex.generator, ex.rho))
    for b in "+-":
        for nu in (1 / 3, 0.2):
            ex = qb.noncommuting_example(1.0, nu, b)
            out.append((ex.generator, ex.rho))
    return out


def test_criterion_06_equivalence_chain(criterion):
    rng = np.random.default_rng(SEED)
    cases = _mixed_instances(rng)
    disagree, positives, coincide_bad, worst_diff = 0, 0, 0, 0.0
    for gen, rho in cases:
        a = commutes_with_modular(gen, rho)[0]
        b = duals.dual_is_qms(gen, rho, 0.0)[0]
        try:
            privileged_rep_from_generator(gen, rho)
            c = True
        except NoPrivilegedRepError:
            c = False
        disagree += not (a == b == c)
        positives += a
        for s in (0.25, 0.75):
            rep = duals.s_duals_coincide(gen, rho, s)
            if rep.qms_s != b or (b and rep.difference > 1e-9):
                coincide_bad += 1
            if b:
                worst_diff = max(worst_diff, rep.difference)
    ok = disagree == 0 and coincide_bad == 0 and 0 < positives < len(cases)
    criterion(6, ok, f"{len(cases)} instances ({positives} positive), {disagree} disagreements, "
                     f"{coincide_bad} s-dual mismatches, max dual difference {worst_diff:.1e}")
    assert ok


def test_criterion_07_dual_privileged(criterion):
    rng = np.random.default_rng(SEED)
    checked, worst_g, worst_k = 0, 0.0, 0.0
    for gen, rho in _mixed_instances(rng):
        try:
            p = privileged_rep_from_generator(gen, rho)
        except NoPrivilegedRepError:
            continue
        r = duals.dual_privileged_relations(p, rho)
        checked += 1
        worst_g = max(worst_g, r.generator_residual)
        worst_k = max(worst_k, r.kraus_sum_residual)
    ok = checked > 0 and worst_g <= 1e-9 and worst_k <= 1e-10
    criterion(7, ok, f"{checked} privileged instances; generator {worst_g:.1e}, Kraus sum {worst_k:.1e}")
    assert ok


def test_criterion_08_roundtrip(criterion):
    rng = np.random.default_rng(SEED)
    worst_gen, worst_tr, worst_orth = 0.0, 0.0, 0.0
    for k in range(100):
        d = (2, 3, 4)[k % 3]
        rho = ins.random_density(rng, d)
        rep = ins.random_special_rep(rng, d, rho)
        gen = gksl.build_generator(rep)
        out = gksl.special_rep_from_superoperator(gen, rho)
        worst_gen = max(worst_gen, np.linalg.norm(gksl.build_generator(out).mat - gen.mat))
        for i, L in enumerate(out.Ls):
            worst_tr = max(worst_tr, abs(np.trace(rho.rho @ L)))
            for M in out.Ls[i + 1:]:
                worst_orth = max(worst_orth, abs(np.trace(L.conj().T @ M)) / (np.linalg.norm(L) * np.linalg.norm(M)))
    ok = worst_gen <= 1e-9 and worst_tr <= 1e-11 and worst_orth <= 1e-9
    criterion(8, ok, f"generator {worst_gen:.1e}, tr(rho L) {worst_tr:.1e}, overlap {worst_orth:.1e}")
    assert ok


def test_criterion_09_half_implies_zero(criterion):
    rng = np.random.default_rng(SEED)
    cases = _mixed_instances(rng)
    for n in (2, 3, 4):
        ex = qb.shift_example(n)
        cases.append((ex.generator, ex.rho))
    implication_bad, agree_bad, certified = 0, 0, 0
    for gen, rho in cases:
        db0 = bl.detailed_balance_check(gen, rho, 0.0)
        dbh = bl.detailed_balance_check(gen, rho, 0.5)
        certified += db0.holds
        implication_bad += db0.holds and not dbh.holds
        if db0.details["dual_is_qms"]:
            agree_bad += db0.holds != dbh.holds
    ok = implication_bad == 0 and agree_bad == 0 and certified > 0
    criterion(9, ok, f"{certified} 0-DB certified of {len(cases)}; {implication_bad} implication "
                     f"failures, {agree_bad} disagreements")
    assert ok


def test_criterion_10_classical(criterion):
    grid = np.linspace(0.05, 5.0, 20)
    bad = 0
    for a in grid:
        for b in grid:
            Q = np.array([[-a, a], [b, -b]])
            pi = np.array([b, a]) / (a + b)
            assert np.abs(pi @ Q).max() <= 1e-12
            bad += not bl.classical_reversibility(Q, pi)[0]
    Q = np.array([[-1.0, 1, 0], [0, -1, 1], [1, 0, -1]])
    rev, viol = bl.classical_reversibility(Q, np.full(3, 1 / 3))
    rel = viol / np.abs(Q).max()
    ok = bad == 0 and not rev and abs(rel - 1 / 3) <= 1e-12
    criterion(10, ok, f"{bad}/400 two-state failures; 3-cycle violation {rel:.6g} of rate scale")
    assert ok
