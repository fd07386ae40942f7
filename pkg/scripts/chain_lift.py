"""Lift random classical chains to quantum generators and compare verdicts.

A chain is reversible exactly when its quantum lift satisfies 0-detailed balance.
"""
import argparse

import numpy as np

from qmsdual import balance, gksl, instances


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    agree = 0
    for k in range(args.trials):
        Q, pi = instances.random_rate_matrix(rng, args.n, reversible=k % 2 == 0)
        rev, viol = balance.classical_reversibility(Q, pi)
        rep, rho = instances.chain_rep(Q, pi, rng, basis=instances.random_unitary(rng, args.n))
        db = balance.detailed_balance_check(gksl.build_generator(rep), rho, 0.0).holds
        agree += rev == db
        print(f"trial {k:2d}: reversible={rev!s:5s} violation={viol:.2e} quantum 0-DB={db}")
    print(f"{agree}/{args.trials} agree")


if __name__ == "__main__":
    main()
