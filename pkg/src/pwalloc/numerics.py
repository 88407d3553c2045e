"""Derivative-free 1-D root finding and minimization used by the solvers."""

import math

import numpy as np

from .errors import ConvergenceFailure

BISECT_TOL = 1e-10
BISECT_MAXITER = 200

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f, lo, hi, tol=BISECT_TOL, maxiter=BISECT_MAXITER):
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (zero counts as either).
    Stops once the bracket is narrower than ``tol`` and returns its midpoint.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ConvergenceFailure(
            f"root not bracketed on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}"
        )
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise ConvergenceFailure(f"bisection did not reach tol={tol} in {maxiter} steps")


def golden_min(f, a, b, tol=1e-12, maxiter=200):
    """Minimize a scalar function on ``[a, b]`` by golden-section search.

    Returns ``(x, f(x))``. Assumes ``f`` is unimodal on the bracket; callers
    bracket it from a grid scan first.
    """
    if b < a:
        a, b = b, a
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def grid_golden_min(f_vec, f, lo, hi, points=1000, tol=1e-12):
    """Global-ish minimum of ``f`` on ``[lo, hi]``.

    A dense grid scan (``f_vec`` evaluates an array of points) locates the
    best cell; golden-section search then refines inside the two cells
    around it. Grid endpoints stay candidates, so boundary optima are exact.
    Ties keep the smaller abscissa.
    """
    if hi <= lo:
        return lo, f(lo)
    xs = np.linspace(lo, hi, points)
    vals = np.asarray(f_vec(xs), dtype=float)
    i = int(np.argmin(vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, points - 1)]
    x, v = golden_min(f, float(a), float(b), tol=tol)
    if v < best_v:
        best_x, best_v = x, v
    return best_x, best_v
