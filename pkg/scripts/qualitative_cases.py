"""Objective curves for the low-quality, high-quality and dominant-seller catalogs."""

import argparse

from segmenter import ProductCatalog
from segmenter.segmentation import optimize

CASES = {
    "all-0.5": ([0.5] * 5, "bertrand", "revenue"),
    "all-10": ([10.0] * 5, "bertrand", "revenue"),
    "dominant": ([10.0, 0.0, 0.0, 0.0], "cournot", "welfare"),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--case", choices=sorted(CASES), action="append")
    args = parser.parse_args()
    for name in args.case or sorted(CASES):
        theta, game, objective = CASES[name]
        result = optimize(ProductCatalog.from_qualities(theta), game, objective)
        curve = "  ".join(f"k={k}:{v:.6f}" for k, v in result.curve[1:])
        print(f"{name:9s} {game}/{objective}  k*={result.k_star}  {curve}")


if __name__ == "__main__":
    main()
