"""At-risk count k against budget r for elevated curves (alpha * beta > 1)."""

import argparse
from pathlib import Path

from pwalloc.cli import run

CASES = ((0.9, 1.2), (0.8, 1.5))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/fig2")
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--r-max", type=float, default=12.0)
    ap.add_argument("--r-step", type=float, default=0.25)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for a, b in CASES:
        path = out / f"sweep_k_a{a}_b{b}_n{args.n}.csv"
        with open(path, "w", newline="") as fh:
            code = run(["sweep-k", "--n", str(args.n), "--alpha", str(a), "--beta", str(b),
                        "--r-min", str(args.r_step), "--r-max", str(args.r_max),
                        "--r-step", str(args.r_step)], out=fh)
        if code:
            raise SystemExit(code)
        print(path)


if __name__ == "__main__":
    main()
