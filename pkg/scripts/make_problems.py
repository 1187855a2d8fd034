"""Write random elimination problem files, e.g. to exercise the CLI in bulk.

    python scripts/make_problems.py outdir --count 5 --seed 1 [--strict]
"""

import argparse
from pathlib import Path

import numpy as np

from ncelim.elim import Mode
from ncelim.instances import random_elim_instance, random_neither_instance
from ncelim.problemfile import Problem, emit


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--strict", action="store_true", help="spans without definite elements, strict mode")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        inst = random_neither_instance(rng) if args.strict else random_elim_instance(rng, d=2, m=1, s=2)
        header = {
            "kind": "elim",
            "mode": Mode.STRICT.value if args.strict else Mode.NONSTRICT.value,
            "d": inst.d,
            "n": inst.p.n,
            "m": inst.m,
            "s": inst.s,
            "seed": args.seed,
        }
        prob = Problem(
            kind="elim",
            header=header,
            poly=[(w, np.round(P, 6)) for w, P in inst.p.terms.items()],
            B=[np.round(B, 6) for B in inst.Bs],
            T=[np.round(T, 6) for T in inst.T.mats],
        )
        path = args.outdir / f"problem_{k:03d}.txt"
        path.write_text(emit(prob))
        print(path)


if __name__ == "__main__":
    main()
