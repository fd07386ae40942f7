"""Run the worked-example suite and print a table of checks."""
import argparse
import sys

from qmsdual.suite import EXAMPLE_NAMES, run_examples, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--name", action="append", choices=EXAMPLE_NAMES)
    ap.add_argument("--allow-known", action="store_true")
    args = ap.parse_args()
    checks = run_examples(args.seed, args.name)
    for c in checks:
        tag = "ok" if c.passed else ("known" if c.known_discrepancy else "FAIL")
        print(f"{tag:6s} {c.example:40s} {c.name}")
    ok, fails = summarize(checks, strict=not args.allow_known)
    print(f"\n{len(checks)} checks, {len(fails)} failures")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
