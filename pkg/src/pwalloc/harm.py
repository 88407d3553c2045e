"""Perceived-harm minimization.

Optimal harm allocations put a common level p >= l on k individuals, at most
one more individual at 0 < delta < l, and zero on everyone else. The
homogeneous solver enumerates k and minimizes over delta; the heterogeneous
solver replaces the common level by a water-filling on t_j * w'(p_j) = c.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetOutOfRange, Infeasible
from .model import (
    AllocationProblem,
    Distribution,
    HarmStructure,
    SolveResult,
    welfare_unchecked,
)
from .numerics import golden_min, grid_golden_min
from .weighting import WeightingParams, derivative, inverse_slope_convex, landmarks

TIE_TOL = 1e-10
EXHAUSTIVE_MAX_N = 10


def _check_sense(problem, sense):
    if problem.sense != sense:
        raise ValueError(f"expected a {sense} problem, got sense={problem.sense!r}")


def _delta_interval(r, k, n, ell):
    """Feasible [lo, hi] for delta with k at-risk individuals, or None."""
    if k == 0:
        return (r, r) if r <= ell else None
    lo = max(0.0, r - k)
    hi = min(ell, r - k * ell)
    if k >= n:
        hi = min(hi, 0.0)
    if hi < lo - 1e-15:
        return None
    return lo, max(lo, hi)


def solve_harm_homogeneous(problem: AllocationProblem, grid_points: int = 1000) -> SolveResult:
    """Global minimizer of sum_i w(p_i) subject to sum_i p_i = r."""
    _check_sense(problem, "harm")
    params, n, r = problem.weighting, problem.n, problem.r
    ell = landmarks(params).inflection
    w = params.w

    best = None  # (value, k, delta)
    k_max = min(n, int(math.floor(r / ell + 1e-12)))
    for k in range(0, k_max + 1):
        iv = _delta_interval(r, k, n, ell)
        if iv is None:
            continue
        lo, hi = iv
        if k == 0:
            delta, val = r, w(r)
        else:

            def g_vec(d, k=k):
                return w(d) + k * w(np.minimum((r - d) / k, 1.0))

            def g(d, k=k):
                return w(d) + k * w(min((r - d) / k, 1.0))

            delta, val = grid_golden_min(g_vec, g, lo, hi, points=grid_points)
        if best is None or val < best[0] - TIE_TOL:
            best = (val, k, delta)

    _, k, delta = best
    if k == 0:
        p = np.zeros(n)
        p[0] = r
        common = None
    else:
        common = min((r - delta) / k, 1.0)
        head = [delta] if delta > 0 else []
        p = np.array(head + [common] * k + [0.0] * (n - k - len(head)))
    return SolveResult(
        Distribution(p),
        welfare_unchecked(params, problem.t, p),
        HarmStructure(k, float(delta), common),
        "structured-search",
    )


def _waterfill_batch(params: WeightingParams, t, budgets, maxiter=200):
    """Solve t_j * w'(p_j) = c with sum_j p_j = B for every budget B.

    ``t`` has shape (k,), ``budgets`` shape (G,). Returns levels of shape
    (G, k) in [l, 1] and the constants c of shape (G,). A safeguarded Newton
    iteration on s = ln c keeps a bisection bracket at all times.
    """
    lm = landmarks(params)
    ell = lm.inflection
    t = np.asarray(t, dtype=float)
    B = np.atleast_1d(np.asarray(budgets, dtype=float))
    k = t.size
    G = B.size
    a, b = params.alpha, params.beta
    slope_min = float(derivative(params, ell))

    levels = np.full((G, k), ell)
    c = np.full(G, slope_min * t.min())
    top = B >= k * (1.0 - 1e-15)
    levels[top] = 1.0
    c[top] = np.inf
    active = (B > k * ell) & ~top
    if not np.any(active):
        return levels, c

    Ba = B[active]
    p_need = 1.0 - (k - Ba) / k
    s_lo = np.full(Ba.shape, math.log(slope_min * t.min()))
    with np.errstate(over="ignore"):
        s_hi = np.log(derivative(params, np.clip(p_need, ell, np.nextafter(1.0, 0.0))) * t.max())
    s_hi = np.maximum(s_hi, s_lo)
    s = 0.5 * (s_lo + s_hi)
    for _ in range(maxiter):
        y = np.exp(s)[:, None] / t[None, :]
        P = inverse_slope_convex(params, y.ravel()).reshape(y.shape)
        f = P.sum(axis=1) - Ba
        s_lo = np.where(f < 0, s, s_lo)
        s_hi = np.where(f < 0, s_hi, s)
        u = -np.log(P)
        with np.errstate(divide="ignore", invalid="ignore"):
            curv = a * b * u ** (a - 1.0) + (1.0 - a) / u - 1.0
            dP = np.where((P > ell) & (P < 1.0) & (curv > 0), P / curv, 0.0)
            s_new = s - f / dP.sum(axis=1)
        bad = ~np.isfinite(s_new) | (s_new < s_lo) | (s_new > s_hi)
        s_new = np.where(bad, 0.5 * (s_lo + s_hi), s_new)
        converged = (np.abs(f) <= 1e-13 * k) | (s_hi - s_lo <= 1e-15 * np.maximum(1.0, np.abs(s)))
        if np.all(converged):
            break
        s = np.where(converged, s, s_new)
    levels[active] = P
    c[active] = np.exp(s)
    return levels, c


def kkt_waterfill(at_risk: Sequence[int], t, budget: float, params: WeightingParams) -> np.ndarray:
    """Levels in [l, 1] for ``at_risk`` with t_j * w'(p_j) equal across them.

    ``t`` is the full priority vector; the result is ordered like ``at_risk``.
    """
    idx = list(at_risk)
    ell = landmarks(params).inflection
    k = len(idx)
    if k == 0:
        raise BudgetOutOfRange("empty at-risk set")
    if not (k * ell - 1e-12 <= budget <= k + 1e-12):
        raise BudgetOutOfRange(f"budget {budget!r} outside [{k * ell!r}, {k}]")
    tk = np.asarray(t, dtype=float)[idx]
    levels, _ = _waterfill_batch(params, tk, [min(max(budget, k * ell), k)])
    return levels[0]


def kkt_constant(params: WeightingParams, t, p) -> Optional[float]:
    """Mean of t_j * w'(p_j) over components at or above the inflection."""
    ell = landmarks(params).inflection
    p = np.asarray(p, dtype=float)
    mask = (p >= ell) & (p < 1.0)
    if not np.any(mask):
        return None
    return float(np.mean(np.asarray(t)[mask] * derivative(params, p[mask])))


def _candidate_patterns(t, k, exhaustive):
    n = t.size
    if exhaustive:
        for A in itertools.combinations(range(n), k):
            rest = [i for i in range(n) if i not in A]
            yield list(A), rest
    else:
        order = np.argsort(t, kind="stable")
        yield order[:k].tolist(), order[k : k + 1].tolist()


def solve_harm_heterogeneous(
    problem: AllocationProblem,
    exhaustive: Optional[bool] = None,
    grid_points: Optional[int] = None,
) -> SolveResult:
    """Minimize sum_j t_j w(p_j) subject to sum_j p_j = r.

    By default the at-risk set is the k lowest-priority individuals and the
    single interior individual is the next one: since w is increasing, any
    allocation can be rearranged so that larger p meet smaller t without
    raising the objective. ``exhaustive=True`` instead tries every at-risk
    subset and every interior individual, which is the reference check.
    """
    _check_sense(problem, "harm")
    params, n, r = problem.weighting, problem.n, problem.r
    t = problem.t
    if exhaustive is None:
        exhaustive = False
    if grid_points is None:
        grid_points = 200 if exhaustive else 1000
    ell = landmarks(params).inflection
    w = params.w

    cands = []  # (grid value, k, A, i, lo, hi, delta0)
    if r <= ell:
        order = range(n) if exhaustive else [int(np.argmin(t))]
        for i in order:
            cands.append((t[i] * w(r), 0, [], i, r, r, r))
    k_max = min(n, int(math.floor(r / ell + 1e-12)))
    for k in range(1, k_max + 1):
        for A, rest in _candidate_patterns(t, k, exhaustive):
            iv = _delta_interval(r, k, n, ell)
            if iv is None:
                continue
            lo, hi = iv
            if not rest:
                if lo > 0.0:
                    continue
                lo = hi = 0.0
            tA = t[A]
            deltas = np.linspace(lo, hi, grid_points) if hi > lo else np.array([lo])
            levels, _ = _waterfill_batch(params, tA, r - deltas)
            pool = (tA[None, :] * w(levels)).sum(axis=1)
            if not rest:
                cands.append((float(pool[0]), k, A, None, 0.0, 0.0, 0.0))
                continue
            wd = w(deltas)
            for i in rest:
                vals = t[i] * wd + pool
                j = int(np.argmin(vals))
                cands.append((float(vals[j]), k, A, i, lo, hi, float(deltas[j])))

    if not cands:
        raise Infeasible(f"no feasible harm structure for n={n}, r={r}")
    grid_best = min(c[0] for c in cands)
    # refine every pattern whose grid value is close to the best one
    margin = 1e-2 * max(1.0, abs(grid_best))
    best = None
    for gv, k, A, i, lo, hi, d0 in sorted(cands, key=lambda c: (c[0], c[1])):
        if gv > grid_best + margin:
            break
        delta, val = d0, gv
        if k > 0 and i is not None and hi > lo:
            tA = t[A]

            def g(d, tA=tA, i=i):
                lv, _ = _waterfill_batch(params, tA, [r - d])
                return t[i] * w(d) + float((tA * w(lv[0])).sum())

            step = (hi - lo) / max(grid_points - 1, 1)
            a_, b_ = max(lo, d0 - step), min(hi, d0 + step)
            x, v = golden_min(g, a_, b_, tol=1e-12)
            if v < val:
                delta, val = x, v
        key = (val, k, delta)
        if best is None or key[0] < best[0][0] - TIE_TOL or (
            abs(key[0] - best[0][0]) <= TIE_TOL and (k, delta) < (best[0][1], best[0][2])
        ):
            best = (key, A, i)

    (_, k, delta), A, i = best
    p = np.zeros(n)
    c = None
    if k == 0:
        p[i] = r
    else:
        levels, cs = _waterfill_batch(params, t[A], [r - delta])
        p[A] = levels[0]
        c = float(cs[0])
        if i is not None and delta > 0:
            p[i] = delta
    pool = p[A] if k else np.array([])
    common = float(pool[0]) if k and np.ptp(pool) <= 1e-12 else None
    return SolveResult(
        Distribution(p),
        welfare_unchecked(params, t, p),
        HarmStructure(k, float(delta) if k else float(r), common, c),
        "kkt-waterfill",
        {"exhaustive": exhaustive},
    )


def solve_harm(problem: AllocationProblem, **kw) -> SolveResult:
    if problem.priorities.is_homogeneous:
        return solve_harm_homogeneous(problem, **kw)
    return solve_harm_heterogeneous(problem, **kw)


@dataclass(frozen=True)
class SweepRow:
    r: float
    k: int
    delta: float
    objective: float


@dataclass(frozen=True)
class SweepResult:
    rows: list
    slope_fit: float
    slope_theory: Optional[float]
    # budget per at-risk individual that minimizes x * w(r / x) over real x
    continuous_level: float

    @property
    def unsaturated_slope(self) -> float:
        return 1.0 / self.continuous_level


def slope_constant(params: WeightingParams) -> float:
    """(alpha * beta) ** (1 / (1 - alpha))."""
    return (params.alpha * params.beta) ** (1.0 / (1.0 - params.alpha))


def sweep_k(params: WeightingParams, n: int, r_values, grid_points: int = 1000) -> SweepResult:
    """Optimal at-risk count k for each budget, plus a least-squares slope."""
    rows = []
    for r in r_values:
        res = solve_harm_homogeneous(
            AllocationProblem(n, float(r), "harm", params), grid_points=grid_points
        )
        rows.append(SweepRow(float(r), res.structure.k, res.structure.delta, res.objective))
    rs = np.array([row.r for row in rows])
    ks = np.array([row.k for row in rows], dtype=float)
    if rs.size >= 2 and np.ptp(rs) > 0:
        slope = float(np.polyfit(rs, ks, 1)[0])
    else:
        slope = float("nan")
    c = slope_constant(params)
    theory = c if params.alpha * params.beta > 1.0 else None
    # x * w(r/x) is stationary where w(p) = p w'(p), i.e. -ln p = c
    return SweepResult(rows, slope, theory, math.exp(-c))
