"""Smallest benefit budget that makes somebody certain, with its two bounds."""

import argparse
from pathlib import Path

from pwalloc.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/fig3")
    ap.add_argument("--alphas", default="0.5,0.7,0.9")
    ap.add_argument("--n-list", default="2,3,4,5,6,8,10,15,20,25,30,40")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for a in args.alphas.split(","):
        path = out / f"min_r_a{a}_b1.0.csv"
        with open(path, "w", newline="") as fh:
            code = run(["min-r", "--alpha", a, "--beta", "1", "--n-list", args.n_list], out=fh)
        if code:
            raise SystemExit(code)
        print(path)


if __name__ == "__main__":
    main()
