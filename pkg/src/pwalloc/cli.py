"""Command-line entry point.

Single solves print JSON; sweeps print CSV. Every number is written with
9 significant digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .benefit import certainty_bounds, min_r_certain, solve_benefit, uniformity_report
from .errors import AllocationError
from .harm import solve_harm, sweep_k
from .model import AllocationProblem, normalize_priorities
from .oracle import GridSpec, brute_force
from .weighting import WeightingParams, landmarks

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def _round(obj):
    """Round every float to 9 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return float(format(float(obj), ".9g"))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump(obj, out):
    out.write(json.dumps(_round(obj), indent=2, sort_keys=False) + "\n")


def _params(args) -> WeightingParams:
    try:
        return WeightingParams(args.alpha, args.beta)
    except AllocationError as exc:
        raise UsageError(f"--alpha must lie in (0, 1) and --beta must be > 0: {exc}") from exc


def read_priorities(path: str, n: int):
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh.read().splitlines()]
    except OSError as exc:
        raise UsageError(f"--priorities: cannot read {path!r}: {exc}") from exc
    while lines and not lines[-1]:
        lines.pop()
    if len(lines) != n:
        raise UsageError(f"--priorities: expected exactly {n} lines, found {len(lines)}")
    try:
        raw = [float(x) for x in lines]
    except ValueError as exc:
        raise UsageError(f"--priorities: {exc}") from exc
    return normalize_priorities(raw)


def _problem(args) -> AllocationProblem:
    params = _params(args)
    if args.n < 1:
        raise UsageError(f"--n must be a positive integer, got {args.n}")
    pri = None
    if getattr(args, "priorities", None):
        pri = read_priorities(args.priorities, args.n)
    return AllocationProblem(args.n, args.r, args.sense, params, pri)


def solve(problem: AllocationProblem):
    if problem.sense == "harm":
        return solve_harm(problem)
    return solve_benefit(problem)


def cmd_curve(args, out):
    params = _params(args)
    if args.samples < 2:
        raise UsageError(f"--samples must be >= 2, got {args.samples}")
    ps = np.linspace(0.0, 1.0, args.samples)
    ws = params.w(ps)
    buf = io.StringIO(newline="")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["p", "w"])
    for p, w in zip(ps, ws):
        wr.writerow([fmt(p), fmt(w)])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())


def cmd_solve(args, out):
    problem = _problem(args)
    res = solve(problem)
    if args.json:
        _dump({"problem": problem.to_dict(), "result": res.to_dict()}, out)
    else:
        _dump(res.to_dict(), out)


def cmd_sweep_k(args, out):
    params = _params(args)
    if args.r_step <= 0 or args.r_max < args.r_min or args.r_min < 0:
        raise UsageError("need --r-step > 0 and 0 <= --r-min <= --r-max")
    count = int(math.floor((args.r_max - args.r_min) / args.r_step + 1e-9)) + 1
    rs = [args.r_min + i * args.r_step for i in range(count)]
    res = sweep_k(params, args.n, rs)
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["r", "k", "delta", "objective"])
    for row in res.rows:
        wr.writerow([fmt(row.r), row.k, fmt(row.delta), fmt(row.objective)])
    wr.writerow(["slope_fit", fmt(res.slope_fit), "", ""])
    wr.writerow(["slope_theory", fmt(res.slope_theory) if res.slope_theory else "nan", "", ""])


def cmd_min_r(args, out):
    params = _params(args)
    try:
        ns = [int(x) for x in args.n_list.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--n-list must be comma-separated integers: {exc}") from exc
    if not ns or min(ns) < 2:
        raise UsageError("--n-list needs integers >= 2")
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["n", "r_min", "lower_qn", "upper_bound"])
    for n in ns:
        lo, hi = certainty_bounds(params, n)
        wr.writerow([n, fmt(min_r_certain(params, n)), fmt(lo), fmt(hi)])


def cmd_threshold(args, out):
    params = _params(args)
    lm = landmarks(params)
    rep = uniformity_report(params)
    _dump(
        {
            "uniformity_n": rep.n,
            "unit_slope_q": lm.unit_slope,
            "inflection": lm.inflection,
            "fixed_point": lm.fixed_point,
            "bound": "sufficient",
            "heuristic": rep.heuristic,
        },
        out,
    )


def discretization_bound(params: WeightingParams, t, step: float) -> float:
    """sum(t) times the largest change of w across one grid cell."""
    xs = np.linspace(0.0, 1.0, int(round(1.0 / step)) * 50 + 1)
    ws = params.w(xs)
    stride = 50
    return float(np.sum(t) * np.max(ws[stride:] - ws[:-stride]))


def cmd_compare(args, out):
    problem = _problem(args)
    try:
        grid = GridSpec(args.step)
    except AllocationError as exc:
        raise UsageError(f"--step: {exc}") from exc
    sol = solve(problem)
    ora = brute_force(problem, grid)
    gap = ora.objective - sol.objective
    if problem.sense == "benefit":
        gap = -gap
    payload = {
        "solver": sol.to_dict(),
        "oracle": dict(ora.to_dict(), **ora.info),
        "gap": gap,
        "gap_bound": discretization_bound(problem.weighting, problem.t, grid.step),
    }
    _dump(payload, out)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pwalloc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def weighting_args(p):
        p.add_argument("--alpha", type=float, required=True, help="curvature, in (0, 1)")
        p.add_argument("--beta", type=float, required=True, help="elevation, > 0")

    def problem_args(p):
        p.add_argument("--sense", choices=["harm", "benefit"], required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--r", type=float, required=True)
        weighting_args(p)
        p.add_argument("--priorities", help="file with one positive priority per line")

    p = sub.add_parser("curve", help="weighting curve samples (CSV p,w)")
    weighting_args(p)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("solve", help="optimal allocation (JSON)")
    problem_args(p)
    p.add_argument("--json", action="store_true", help="include the problem record")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep-k", help="at-risk count k against budget r (CSV)")
    p.add_argument("--n", type=int, required=True)
    weighting_args(p)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--r-step", type=float, required=True)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("min-r", help="smallest budget giving someone certainty (CSV)")
    weighting_args(p)
    p.add_argument("--n-list", required=True)
    p.set_defaults(func=cmd_min_r)

    p = sub.add_parser("threshold", help="landmarks and uniformity threshold (JSON)")
    weighting_args(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("compare", help="solver against the grid oracle (JSON)")
    problem_args(p)
    p.add_argument("--step", type=float, default=0.02)
    p.set_defaults(func=cmd_compare)
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except AllocationError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER
    return EXIT_OK


def main():
    sys.exit(run())
