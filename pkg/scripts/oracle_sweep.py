"""Compare the top-k scan with exhaustive enumeration on random catalogs."""

import argparse
import time

import numpy as np

from segmenter import ProductCatalog
from segmenter.segmentation import Game, Objective, brute_force_optimize, is_quality_prefix, optimize


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--catalogs", type=int, default=50)
    parser.add_argument("--min-n", type=int, default=2)
    parser.add_argument("--max-n", type=int, default=10)
    parser.add_argument("--high", type=float, default=10.0, help="qualities ~ Uniform[0, high]")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    gaps = {(g, o): 0.0 for g in Game for o in Objective}
    non_prefix = dict.fromkeys(gaps, 0)
    start = time.perf_counter()
    for _ in range(args.catalogs):
        n = int(rng.integers(args.min_n, args.max_n + 1))
        catalog = ProductCatalog.from_qualities(rng.uniform(0, args.high, n).tolist())
        for key in gaps:
            chosen, value = brute_force_optimize(catalog, *key)
            gaps[key] = max(gaps[key], abs(value - optimize(catalog, *key).objective_value))
            non_prefix[key] += not is_quality_prefix(catalog, chosen)
    print(f"{args.catalogs} catalogs in {time.perf_counter() - start:.1f}s")
    for (g, o), gap in gaps.items():
        print(f"  {g.value:8s} {o.value:7s} max gap {gap:.2e}  non-prefix optima {non_prefix[(g, o)]}")


if __name__ == "__main__":
    main()
