"""Rounds needed by round-robin best responses from random starting prices."""

import argparse

import numpy as np

from segmenter import DisplaySet, ProductCatalog
from segmenter import bertrand


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=20)
    parser.add_argument("--starts", type=int, default=10)
    parser.add_argument("--max-n", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print("n  rounds(min/median/max)  max|p - p_eq|")
    for _ in range(args.instances):
        n = int(rng.integers(2, args.max_n + 1))
        catalog = ProductCatalog.from_qualities(rng.uniform(0, 10, n).tolist())
        display = DisplaySet.full(catalog)
        ref = bertrand.solve_equilibrium(catalog, display).prices.prices
        rounds, gap = [], 0.0
        for _ in range(args.starts):
            eq, trace = bertrand.best_response_dynamics(catalog, display, rng.uniform(0, 10, n))
            rounds.append(len(trace.rounds))
            gap = max(gap, float(np.max(np.abs(eq.prices.prices - ref))))
        print(f"{n}  {min(rounds)}/{int(np.median(rounds))}/{max(rounds)}  {gap:.1e}")


if __name__ == "__main__":
    main()
