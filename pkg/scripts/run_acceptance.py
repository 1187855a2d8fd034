"""Run every acceptance suite at its full count and print one line per criterion.

    python scripts/run_acceptance.py [--seed 0] [--trials N] [--criteria 1,2]
"""

import argparse
import sys

from ncelim.selftest import run_all


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--criteria", default=None)
    args = ap.parse_args()
    only = {int(x) for x in args.criteria.split(",")} if args.criteria else None
    results = run_all(args.trials, args.seed, only, echo=lambda line: print(line, flush=True))
    failed = [r.number for r in results if not r.passed]
    print("all criteria pass" if not failed else f"failed: {failed}")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
