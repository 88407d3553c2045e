"""Weighting curves for a family of (alpha, beta) values, one CSV per curve."""

import argparse
from pathlib import Path

from pwalloc.cli import run

ALPHAS = (0.3, 0.5, 0.7, 0.9)
BETAS = (0.5, 1.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/fig1")
    ap.add_argument("--samples", type=int, default=201)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for b in BETAS:
        for a in ALPHAS:
            path = out / f"curve_a{a}_b{b}.csv"
            code = run(["curve", "--alpha", str(a), "--beta", str(b),
                        "--samples", str(args.samples), "--out", str(path)])
            if code:
                raise SystemExit(code)
            print(path)


if __name__ == "__main__":
    main()
