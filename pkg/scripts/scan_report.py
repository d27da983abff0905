"""Run the grid scans on random and dominant-seller instances; print JSON lines."""

import argparse
import json

import numpy as np

from segmenter import DisplaySet, ProductCatalog
from segmenter.verification import lambert_bound_check, revenue_quasiconvexity_scan, welfare_q0_derivative_scan


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(json.dumps(lambert_bound_check().to_dict()))
    for k in range(args.instances):
        n = int(rng.integers(3, 7))
        theta = rng.uniform(0, 10, n)
        if k % 3 == 0:
            theta[0], theta[1:] = rng.uniform(8, 12), rng.uniform(0, 2, n - 1)
        catalog = ProductCatalog.from_qualities(theta.tolist())
        selected = DisplaySet((0,))
        for rep in (revenue_quasiconvexity_scan(catalog, selected), welfare_q0_derivative_scan(catalog, selected)):
            print(json.dumps(rep.to_dict()))


if __name__ == "__main__":
    main()
