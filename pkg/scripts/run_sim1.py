#!/usr/bin/env python3
"""Run the factorial-design distance comparison and print the purity table.

Usage: python scripts/run_sim1.py [--seed N] [--out DIR]
"""

import argparse

from vmfgeom.experiments import run_sim1


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="out/sim1")
    parser.add_argument("--rel-tol", type=float, default=0.05,
                        help="Monte-Carlo L2 stopping tolerance")
    args = parser.parse_args()
    purities = run_sim1(args.seed, args.out, rel_tol=args.rel_tol)
    for metric in ("wl", "l2"):
        print(f"{metric}-embedding 4-means purity: {purities[metric]:.4f}")


if __name__ == "__main__":
    main()
