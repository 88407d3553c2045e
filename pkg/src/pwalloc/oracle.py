"""Exhaustive grid search over the budget-constrained box.

Points are integer compositions: every coordinate is a whole number of grid
units and the units add up to the budget exactly, so the budget constraint
never drifts. Used as ground truth for the structured solvers on small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import BudgetOutOfRange, Infeasible, OutOfRange, TooLarge
from .model import AllocationProblem, Distribution, SolveResult, welfare_unchecked
from .weighting import WeightingParams, landmarks


@dataclass(frozen=True)
class GridSpec:
    step: float = 0.02
    max_points: int = 20_000_000

    def __post_init__(self):
        if not 0.0 < self.step <= 0.5:
            raise OutOfRange(f"grid step must lie in (0, 0.5], got {self.step!r}")
        if abs(round(1.0 / self.step) * self.step - 1.0) > 1e-12:
            raise OutOfRange(f"grid step {self.step!r} does not divide 1")

    @property
    def units(self) -> int:
        return int(round(1.0 / self.step))


def composition_count(total: int, parts: int, cap: int) -> int:
    """Number of ways to write ``total`` as ``parts`` integers in [0, cap]."""
    if parts == 0:
        return int(total == 0)
    count = 0
    for i in range(parts + 1):
        rem = total - i * (cap + 1)
        if rem < 0:
            break
        count += (-1) ** i * math.comb(parts, i) * math.comb(rem + parts - 1, parts - 1)
    return count


def compositions(total: int, parts: int, cap: int):
    """Yield blocks of compositions in lexicographic order.

    Blocks are int arrays of shape (rows, parts), one block per value of the
    first coordinate.
    """
    if parts == 1:
        if 0 <= total <= cap:
            yield np.array([[total]], dtype=np.int64)
        return
    first_lo = max(0, total - (parts - 1) * cap)
    first_hi = min(cap, total)
    for first in range(first_lo, first_hi + 1):
        rest = total - first
        block = _tail_block(rest, parts - 1, cap)
        if block.size == 0:
            continue
        yield np.column_stack([np.full(len(block), first, dtype=np.int64), block])


def _tail_block(total, parts, cap):
    if parts == 1:
        if 0 <= total <= cap:
            return np.array([[total]], dtype=np.int64)
        return np.empty((0, 1), dtype=np.int64)
    hi = min(cap, total)
    axes = np.meshgrid(*([np.arange(hi + 1, dtype=np.int64)] * (parts - 1)), indexing="ij")
    head = np.stack([a.ravel() for a in axes], axis=1)
    last = total - head.sum(axis=1)
    keep = (last >= 0) & (last <= cap)
    return np.column_stack([head[keep], last[keep]])


def _snap_units(value, step):
    units = value / step
    snapped = int(round(units))
    return snapped, abs(units - snapped) > 1e-9


def _search(values_table, t, total, parts, cap, sense, max_points, offset=0):
    """Best composition of ``total`` units; ``values_table[u]`` is w at unit u+offset."""
    count = composition_count(total, parts, cap)
    if count > max_points:
        raise TooLarge(
            f"{count} grid points exceed max_points={max_points}; shrink n or coarsen the grid"
        )
    if count == 0:
        raise Infeasible("no grid point satisfies the budget")
    best_units, best_val = None, None
    seen = 0
    for block in compositions(total, parts, cap):
        vals = np.zeros(len(block))
        for j in range(parts):
            vals += t[j] * values_table[block[:, j]]
        i = int(np.argmin(vals) if sense == "min" else np.argmax(vals))
        v = float(vals[i])
        seen += len(block)
        if best_val is None or (v < best_val if sense == "min" else v > best_val):
            best_units, best_val = block[i] + offset, v
    assert seen == count
    return best_units, best_val, count


def brute_force(problem: AllocationProblem, grid: GridSpec = GridSpec()) -> SolveResult:
    """Best grid point of sum_j t_j w(p_j) for the problem's sense.

    If r is not a whole number of grid steps it is snapped to the nearest
    one and ``info['snapped_r']`` records the budget actually used.
    """
    params, n = problem.weighting, problem.n
    U = grid.units
    R, snapped = _snap_units(problem.r, grid.step)
    R = min(max(R, 0), n * U)
    table = params.w(np.arange(U + 1) * grid.step)
    sense = "min" if problem.sense == "harm" else "max"
    units, _, count = _search(table, problem.t, R, n, U, sense, grid.max_points)
    p = units * grid.step
    info = {"points": count, "step": grid.step}
    if snapped:
        info["snapped_r"] = R * grid.step
    return SolveResult(
        Distribution(p), welfare_unchecked(params, problem.t, p), None, "oracle", info
    )


@dataclass(frozen=True)
class LemmaResult:
    x: np.ndarray
    value: float
    points: int
    lo: float
    hi: float


def lemma_oracle(
    region: Literal["concave", "convex"],
    sense: Literal["min", "max"],
    m: int,
    c: float,
    params: WeightingParams,
    grid: GridSpec = GridSpec(),
) -> LemmaResult:
    """Optimize sum_i w(x_i) over grid points of one curvature region.

    The concave region is [0, l], the convex one [l, 1]; both are intersected
    with the grid, so the box edges sit on the nearest interior grid lines.
    """
    ell = landmarks(params).inflection
    if region == "concave":
        if not 0.0 < c <= m * ell:
            raise BudgetOutOfRange(f"c={c!r} outside (0, {m * ell!r}] for the concave region")
        u_lo, u_hi = 0, int(math.floor(ell / grid.step + 1e-9))
    elif region == "convex":
        if not m * ell <= c <= m:
            raise BudgetOutOfRange(f"c={c!r} outside [{m * ell!r}, {m}] for the convex region")
        u_lo, u_hi = int(math.ceil(ell / grid.step - 1e-9)), grid.units
    else:
        raise ValueError(f"unknown region {region!r}")
    if sense not in ("min", "max"):
        raise ValueError(f"unknown sense {sense!r}")
    C, _ = _snap_units(c, grid.step)
    table = params.w(np.arange(u_lo, u_hi + 1) * grid.step)
    units, val, count = _search(
        table, np.ones(m), C - m * u_lo, m, u_hi - u_lo, sense, grid.max_points, offset=u_lo
    )
    return LemmaResult(units * grid.step, val, count, u_lo * grid.step, u_hi * grid.step)
