"""Prelec probability weighting: w(p) = exp(-beta * (-ln p) ** alpha).

Most quantities are easier to handle in the log-odds-like coordinate
``u = -ln p``; ``u`` runs from +inf (p = 0) down to 0 (p = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceFailure, DomainError, NotFinite, OutOfRange
from .numerics import BISECT_MAXITER, bisect


@dataclass(frozen=True)
class WeightingParams:
    """Curvature ``alpha`` in (0, 1) and elevation ``beta`` > 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or isinstance(v, bool):
                raise OutOfRange(f"{name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise NotFinite(f"{name} must be finite, got {v!r}")
        if not 0.0 < self.alpha < 1.0:
            raise OutOfRange(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.beta > 0.0:
            raise OutOfRange(f"beta must be > 0, got {self.beta!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    def w(self, p):
        return evaluate(self, p)

    def dw(self, p):
        return derivative(self, p)


def validate(alpha, beta) -> WeightingParams:
    return WeightingParams(alpha, beta)


def _as_prob(p, lo_open=False):
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("probability is NaN")
    bad = (arr < 0.0) | (arr > 1.0)
    if lo_open:
        bad |= arr <= 0.0
    if np.any(bad):
        raise DomainError(f"probability outside the domain: {arr[bad][:5]}")
    return arr


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def evaluate(params: WeightingParams, p):
    """w(p), with w(0) = 0 by continuity. Accepts scalars or arrays."""
    scalar = np.ndim(p) == 0
    arr = _as_prob(p)
    out = np.zeros_like(arr)
    pos = arr > 0.0
    u = np.maximum(-np.log(arr[pos]), 0.0)
    out[pos] = np.exp(-params.beta * u**params.alpha)
    return _ret(out, scalar)


def derivative(params: WeightingParams, p):
    """w'(p) = w(p) * alpha * beta * (-ln p)^(alpha - 1) / p for p in (0, 1].

    The slope is unbounded at both ends; ``derivative(params, 1.0)`` is +inf.
    """
    scalar = np.ndim(p) == 0
    arr = _as_prob(p, lo_open=True)
    a, b = params.alpha, params.beta
    out = np.full_like(arr, np.inf)
    inner = arr < 1.0
    u = -np.log(arr[inner])
    out[inner] = a * b * np.exp(-b * u**a) * u ** (a - 1.0) / arr[inner]
    return _ret(out, scalar)


def curvature_sign(params: WeightingParams, p):
    """Function with the same sign as w''(p) on (0, 1).

    w'' = w' / p * (alpha*beta*u^(alpha-1) + (1-alpha)/u - 1), u = -ln p.
    """
    scalar = np.ndim(p) == 0
    arr = _as_prob(p, lo_open=True)
    a, b = params.alpha, params.beta
    u = -np.log(arr)
    with np.errstate(divide="ignore"):
        out = a * b * u ** (a - 1.0) + (1.0 - a) / u - 1.0
    return _ret(out, scalar)


def second_derivative(params: WeightingParams, p):
    scalar = np.ndim(p) == 0
    arr = np.asarray(_as_prob(p, lo_open=True))
    out = derivative(params, arr) * curvature_sign(params, arr) / arr
    return _ret(out, scalar)


def log_slope_u(params: WeightingParams, u):
    """ln w' expressed in u = -ln p (decreasing in u on the convex branch)."""
    a, b = params.alpha, params.beta
    return math.log(a * b) + (a - 1.0) * np.log(u) + u - b * u**a


@dataclass(frozen=True)
class WeightingLandmarks:
    """Inflection point, fixed point and unit-slope point of w."""

    inflection: float
    fixed_point: float
    unit_slope: float
    inflection_u: float
    unit_slope_u: float


def _expand_upper(f, start):
    """Smallest doubling of ``start`` at which ``f`` turns negative."""
    x = start
    for _ in range(BISECT_MAXITER):
        if f(x) < 0.0:
            return x
        x *= 2.0
    raise ConvergenceFailure("could not bracket a sign change")


@lru_cache(maxsize=256)
def landmarks(params: WeightingParams) -> WeightingLandmarks:
    """Inflection, fixed and unit-slope points, each found by bisection.

    Work happens in u = -ln p. The inflection solves
    alpha*beta*u^alpha + 1 - alpha - u = 0 (w'' sign change times u), which
    is concave in u with a single positive root; the fixed point solves
    beta*u^alpha = u; the unit-slope point solves ln w'(u) = 0 for u beyond
    the inflection, where w' falls from +inf to its minimum w'(l) <= 1.
    """
    a, b = params.alpha, params.beta

    def infl(u):
        return a * b * u**a + (1.0 - a) - u

    u_hi = _expand_upper(infl, 1.0)
    u_l = bisect(infl, 0.0, u_hi, tol=1e-13)

    def fixed(u):
        return b * u**a - u

    u_hi = _expand_upper(fixed, 1.0)
    u_f = bisect(fixed, 1e-300, u_hi, tol=1e-13)

    def unit(u):
        return -log_slope_u(params, u)

    if unit(u_l) < 0.0:
        raise ConvergenceFailure(
            "w'(l) > 1: no unit-slope point in the concave region"
        )
    u_hi = _expand_upper(unit, max(2.0 * u_l, 1.0))
    u_q = bisect(unit, u_l, u_hi, tol=1e-13)

    ell, fp, q = math.exp(-u_l), math.exp(-u_f), math.exp(-u_q)
    if not 0.0 < q < ell < 1.0:
        raise ConvergenceFailure(f"landmarks out of order: q={q}, l={ell}")
    return WeightingLandmarks(ell, fp, q, u_l, u_q)


def inverse_slope_convex(params: WeightingParams, y, maxiter=100):
    """p in [l, 1) with w'(p) = y on the convex branch, vectorized.

    Targets at or below the minimum slope w'(l) map to l. Solved in
    v = ln u with a bracketed Newton iteration; d/dv ln w' = -(alpha*beta*u^alpha
    + 1 - alpha - u), which vanishes only at the inflection.
    """
    a, b = params.alpha, params.beta
    lm = landmarks(params)
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.full(y.shape, lm.inflection)
    ly = np.log(np.where(y > 0, y, 1.0))
    # y below the minimum slope or infinite targets are handled without iteration
    active = (ly > log_slope_u(params, lm.inflection_u)) & np.isfinite(y)
    out[np.isposinf(y)] = 1.0
    if np.any(active):
        t = ly[active]
        v_hi = np.full(t.shape, math.log(lm.inflection_u))
        v_lo = -(np.abs(t) + abs(math.log(a * b)) + b + 1.0) / (1.0 - a)
        v_lo = np.minimum(v_lo, v_hi - 1.0)
        # root of the small-u asymptote ln(ab) + (a - 1) v = ln y, kept inside the bracket
        v = np.clip((math.log(a * b) - t) / (1.0 - a), v_lo, v_hi)
        v = np.where((v <= v_lo) | (v >= v_hi), 0.5 * (v_lo + v_hi), v)
        for _ in range(maxiter):
            u = np.exp(v)
            f = math.log(a * b) + (a - 1.0) * v + u - b * u**a - t
            # f is decreasing in v: positive means the root lies to the right
            pos = f > 0
            v_lo = np.where(pos, v, v_lo)
            v_hi = np.where(pos, v_hi, v)
            df = -(a * b * u**a + (1.0 - a) - u)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = f / df
                v_new = v - step
            # a zero step lands on the bracket end it just set, which is fine
            bad = ~np.isfinite(v_new) | (v_new < v_lo) | (v_new > v_hi)
            v_new = np.where(bad, 0.5 * (v_lo + v_hi), v_new)
            # roundoff in f keeps Newton steps near 1e-14 |v| for large |v|
            done = np.all(np.abs(v_new - v) <= 1e-13 * np.maximum(1.0, np.abs(v)))
            v = v_new
            if done:
                break
        out[active] = np.exp(-np.exp(v))
    return float(out[0]) if scalar else out
