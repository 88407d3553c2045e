"""Perceived-benefit maximization.

Optimal benefit allocations give j individuals the benefit with certainty,
at most one individual a level gamma in (l, 1), and split the remainder
equally at a level <= l among everybody else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, Infeasible
from .model import (
    AllocationProblem,
    BenefitStructure,
    Distribution,
    SolveResult,
    welfare_unchecked,
)
from .numerics import grid_golden_min
from .weighting import WeightingParams, derivative, landmarks

TIE_TOL = 1e-10


def _check_sense(problem, sense):
    if problem.sense != sense:
        raise ValueError(f"expected a {sense} problem, got sense={problem.sense!r}")


def _homogeneous_candidates(params: WeightingParams, n: int, r: float, grid_points: int):
    """Best allocation for each (j, with/without gamma) structure.

    Yields ``(value, j, gamma, m, common)`` where ``m`` individuals share
    ``common``. Candidates come out ordered by j, the gamma-free one first.
    """
    ell = landmarks(params).inflection
    w = params.w
    for j in range(0, min(n, int(math.floor(r + 1e-12))) + 1):
        R = max(r - j, 0.0)
        rest = n - j
        if rest == 0:
            if R <= 1e-12:
                yield float(j), j, None, 0, None
            continue
        s = R / rest
        if s <= ell:
            yield j + rest * w(s), j, None, rest, s
        m = rest - 1
        if m == 0:
            if ell <= R < 1.0:
                yield j + w(R), j, R, 0, None
            continue
        lo, hi = max(ell, R - m * ell), min(1.0, R)
        if hi < lo:
            continue

        def neg_vec(g, m=m, R=R):
            return -(w(g) + m * w(np.clip((R - g) / m, 0.0, 1.0)))

        def neg(g, m=m, R=R):
            return -(w(g) + m * w(min(max((R - g) / m, 0.0), 1.0)))

        gamma, v = grid_golden_min(neg_vec, neg, lo, hi, points=grid_points)
        yield j - v, j, gamma, m, max((R - gamma) / m, 0.0)


def solve_benefit_homogeneous(problem: AllocationProblem, grid_points: int = 1000) -> SolveResult:
    """Global maximizer of sum_i w(p_i) subject to sum_i p_i = r."""
    _check_sense(problem, "benefit")
    params, n, r = problem.weighting, problem.n, problem.r
    best = None
    for cand in _homogeneous_candidates(params, n, r, grid_points):
        if best is None or cand[0] > best[0] + TIE_TOL:
            best = cand
    if best is None:
        raise Infeasible(f"no feasible benefit structure for n={n}, r={r}")
    _, j, gamma, m, common = best
    if gamma is not None and gamma >= 1.0:
        # a certain individual found through the gamma slot
        j, gamma = j + 1, None
    p = np.array(
        [common] * m + ([gamma] if gamma is not None else []) + [1.0] * j, dtype=float
    )
    return SolveResult(
        Distribution(p),
        welfare_unchecked(params, problem.t, p),
        BenefitStructure(j, None if gamma is None else float(gamma), common if m else None),
        "structured-search",
    )


def _pair_optimum(params, ti, tj, s, grid_points=201):
    """Best split x + y = s of ti*w(x) + tj*w(y) with x, y in [0, 1]."""
    w = params.w
    lo, hi = max(0.0, s - 1.0), min(1.0, s)

    def neg_vec(x):
        return -(ti * w(x) + tj * w(np.clip(s - x, 0.0, 1.0)))

    def neg(x):
        return -(ti * w(x) + tj * w(min(max(s - x, 0.0), 1.0)))

    x, v = grid_golden_min(neg_vec, neg, lo, hi, points=grid_points)
    return x, -v


def _pair_ascent(params, t, p0, tol=1e-10, max_rounds=5000):
    """Projected pairwise coordinate ascent on sum_j t_j w(p_j).

    Each step re-splits the mass of one pair optimally. Pairs are picked by
    the largest marginal-gain gap; once first-order progress stalls every
    pair is tried once, and the run ends when no pair gains more than ``tol``.
    """
    p = np.array(p0, dtype=float)
    n = p.size
    w = params.w

    def pair_step(i, j):
        s = p[i] + p[j]
        old = t[i] * w(p[i]) + t[j] * w(p[j])
        x, new = _pair_optimum(params, t[i], t[j], s)
        if new > old + tol:
            p[i], p[j] = x, s - x
            return new - old
        return 0.0

    for _ in range(max_rounds):
        with np.errstate(divide="ignore"):
            interior = (p > 0) & (p < 1)
            marg = np.full(n, np.inf)
            marg[interior] = t[interior] * derivative(params, p[interior])
        recv = np.where(p < 1.0, marg, -np.inf)
        donor = np.where(p > 0.0, marg, np.inf)
        i, j = int(np.argmax(recv)), int(np.argmin(donor))
        if i != j and recv[i] > donor[j] * (1 + 1e-9) and pair_step(i, j) > 0:
            continue
        gained = 0.0
        for a in range(n):
            for b in range(a + 1, n):
                gained += pair_step(a, b)
        if gained <= tol:
            break
    # the pair updates conserve the total only up to rounding
    return p


def _box_proportional(t, r):
    """p proportional to t, capped at 1, with the overflow refilled."""
    lam_lo, lam_hi = 0.0, r / t.min() + 1.0
    for _ in range(200):
        lam = 0.5 * (lam_lo + lam_hi)
        if np.minimum(1.0, lam * t).sum() < r:
            lam_lo = lam
        else:
            lam_hi = lam
    p = np.minimum(1.0, lam_hi * t)
    return p * (r / p.sum()) if p.sum() > 0 else p


def solve_benefit_heterogeneous(problem: AllocationProblem, tol: float = 1e-10) -> SolveResult:
    """Local maximizer of sum_j t_j w(p_j) from several starts.

    Starts are the uniform lottery, the homogeneous optimum with its larger
    levels handed to larger priorities, and a priority-proportional split.
    Global optimality is not certified.
    """
    _check_sense(problem, "benefit")
    params, n, r = problem.weighting, problem.n, problem.r
    t = problem.t
    if r == 0.0 or r == float(n):
        p = np.full(n, r / n)
        return SolveResult(
            Distribution(p),
            welfare_unchecked(params, t, p),
            BenefitStructure(n if r else 0, None, None if r else 0.0),
            "multistart",
        )
    homog = solve_benefit_homogeneous(problem.with_priorities(None)).p
    ranked = np.empty(n)
    ranked[np.argsort(t, kind="stable")] = np.sort(homog)
    starts = [np.full(n, r / n), ranked, _box_proportional(t, r)]

    best_p, best_v = None, -np.inf
    for p0 in starts:
        p = _pair_ascent(params, t, p0, tol=tol)
        p = np.clip(p, 0.0, 1.0)
        v = welfare_unchecked(params, t, p)
        if v > best_v + TIE_TOL:
            best_p, best_v = p, v
    if not np.all(best_p > 0):
        raise ConvergenceFailure(f"ascent left a zero component: {best_p.tolist()}")
    j = int(np.sum(best_p >= 1.0))
    return SolveResult(
        Distribution(best_p), best_v, BenefitStructure(j, None, None), "multistart"
    )


def solve_benefit(problem: AllocationProblem, **kw) -> SolveResult:
    if problem.priorities.is_homogeneous:
        return solve_benefit_homogeneous(problem, **kw)
    return solve_benefit_heterogeneous(problem, **kw)


@dataclass(frozen=True)
class UniformityThreshold:
    n: int
    unit_slope: float
    # the threshold comes from a sufficient condition, proven only for beta = 1
    heuristic: bool


def uniformity_threshold(params: WeightingParams) -> int:
    """Smallest n with 1/(n - 1) < q, q the unit-slope point of w.

    For r = 1 and any larger population the uniform lottery is the unique
    maximizer (beta = 1); the bound is sufficient, not tight.
    """
    q = landmarks(params).unit_slope
    n = int(math.floor(1.0 / q)) + 1
    while not 1.0 / (n - 1) < q:
        n += 1
    while n > 2 and 1.0 / (n - 2) < q:
        n -= 1
    return n


def uniformity_report(params: WeightingParams) -> UniformityThreshold:
    return UniformityThreshold(
        uniformity_threshold(params), landmarks(params).unit_slope, params.beta != 1.0
    )


def certainty_bounds(params: WeightingParams, n: int) -> tuple:
    """(q * n, (n - 1) * l + 1): below the first nobody is certain, above the second somebody is."""
    lm = landmarks(params)
    return lm.unit_slope * n, (n - 1) * lm.inflection + 1.0


def has_certain(params: WeightingParams, n: int, r: float, grid_points: int = 1000) -> bool:
    res = solve_benefit_homogeneous(AllocationProblem(n, r, "benefit", params), grid_points)
    return res.structure.j >= 1


def min_r_certain(params: WeightingParams, n: int, resolution: float = 1e-3,
                  grid_points: int = 1000) -> float:
    """Smallest budget at which the benefit optimum makes somebody certain.

    Bisection on r between the two certainty bounds, to ``resolution``.
    """
    if n < 2:
        raise Infeasible("need n >= 2")
    lo, hi = certainty_bounds(params, n)
    hi = min(hi, float(n))
    if has_certain(params, n, lo, grid_points):
        raise ConvergenceFailure(f"certain individual already at the lower bound r={lo}")
    if not has_certain(params, n, hi, grid_points):
        raise ConvergenceFailure(f"no certain individual at the upper bound r={hi}")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if has_certain(params, n, mid, grid_points):
            hi = mid
        else:
            lo = mid
    return hi
