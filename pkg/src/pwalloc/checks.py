"""Distance from an allocation to the optimal-structure families.

``harm_structure_gap`` is the smallest sup-norm distance from ``p`` to some
vector with a common level >= l on a pool, at most one value in [0, l), and
zeros elsewhere. ``benefit_structure_gap`` does the same for vectors with
ones, at most one value in [l, 1], and a common level <= l elsewhere. Budgets
are not enforced; these measure shape only.
"""

import numpy as np


def harm_structure_gap(p, ell: float) -> float:
    q = np.sort(np.asarray(p, dtype=float))[::-1]
    n = q.size
    best = np.inf
    for k in range(n + 1):
        pool = q[:k]
        dev = 0.0
        if k:
            v = max(ell, 0.5 * (pool.max() + pool.min()))
            dev = float(np.max(np.abs(pool - v)))
        if k < n:
            d = q[k]
            dev = max(dev, 0.0 if d < ell else min(d - ell, d))
            if k + 1 < n:
                dev = max(dev, float(q[k + 1 :].max()))
        best = min(best, dev)
    return best


def benefit_structure_gap(p, ell: float) -> float:
    q = np.sort(np.asarray(p, dtype=float))[::-1]
    n = q.size
    best = np.inf
    for j in range(n + 1):
        dev_top = float(1.0 - q[:j].min()) if j else 0.0
        for use_gamma in (False, True):
            rest = q[j:]
            dev = dev_top
            if use_gamma:
                if rest.size == 0 or rest[0] < ell:
                    continue
                rest = rest[1:]
            if rest.size:
                v = min(ell, 0.5 * (rest.max() + rest.min()))
                dev = max(dev, float(np.max(np.abs(rest - v))))
            best = min(best, dev)
    return best


def count_strictly_between(p, lo: float, hi: float, tol: float = 0.0) -> int:
    p = np.asarray(p, dtype=float)
    return int(np.sum((p > lo + tol) & (p < hi - tol)))
