"""Sweep the qubit family over random parameters and report worst residuals."""
import argparse

import numpy as np

from qmsdual import balance, gksl, qubit
from qmsdual.stationary import invariance_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    worst = dict(invariance=0.0, lambdas=0.0, unitarity=0.0, h_minus_k=0.0)
    failures = 0
    for _ in range(args.draws):
        p = qubit.random_qubit_params(rng)
        gen = gksl.build_generator(qubit.qubit_family(p))
        rho = qubit.diag_state(p.nu)
        r = balance.detailed_balance_check(gen, rho, 0.0)
        got = np.sort(r.details.get("lambdas", []))
        want = np.sort(p.expected_lambdas())
        vals = (
            invariance_residual(gen, rho),
            np.abs(got - want).max() if got.size == want.size else np.inf,
            r.details.get("intertwiner_unitarity", np.inf),
            r.details["H_minus_K_nonscalar"],
        )
        for k, v in zip(worst, vals):
            worst[k] = max(worst[k], v)
        failures += not r.holds
    print(f"{args.draws} draws, {failures} without 0-detailed balance")
    for k, v in worst.items():
        print(f"  worst {k:12s} {v:.2e}")


if __name__ == "__main__":
    main()
