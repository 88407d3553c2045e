"""Solver-versus-oracle gaps over a small grid of homogeneous problems (CSV to stdout)."""

import argparse
import csv
import sys

from pwalloc import AllocationProblem, GridSpec, WeightingParams, brute_force
from pwalloc.cli import fmt, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.02)
    ap.add_argument("--n-max", type=int, default=4)
    args = ap.parse_args()
    grid = GridSpec(args.step)
    wr = csv.writer(sys.stdout, lineterminator="\n")
    wr.writerow(["sense", "n", "r", "alpha", "beta", "solver", "oracle", "gap"])
    for sense in ("harm", "benefit"):
        for n in range(2, args.n_max + 1):
            for r in (0.5, 1.0, 1.5, 2.0):
                for a in (0.3, 0.5, 0.7, 0.9):
                    for b in (0.5, 1.0):
                        prob = AllocationProblem(n, r, sense, WeightingParams(a, b))
                        s, o = solve(prob).objective, brute_force(prob, grid).objective
                        gap = o - s if sense == "harm" else s - o
                        wr.writerow([sense, n, fmt(r), fmt(a), fmt(b), fmt(s), fmt(o), fmt(gap)])


if __name__ == "__main__":
    main()
