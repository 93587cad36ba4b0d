#!/usr/bin/env python3
"""Run the mixture-reduction study and print the BIC-versus-K table.

Usage: python scripts/run_sim2.py [--seed N] [--out DIR]
"""

import argparse

from vmfgeom.experiments import run_sim2


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="out/sim2")
    args = parser.parse_args()
    table = run_sim2(args.seed, args.out)
    print(f"{'K':>3} {'fitted':>10} {'greedy':>10} {'hclust':>10} {'kmedoids':>10}")
    for i, k in enumerate(table["k"]):
        print(f"{k:>3} {table['fitted'][i]:>10.2f} {table['greedy'][i]:>10.2f} "
              f"{table['hclust'][i]:>10.2f} {table['kmedoids'][i]:>10.2f}")


if __name__ == "__main__":
    main()
