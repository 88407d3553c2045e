"""Problem and result records, the perceived-welfare objective, priorities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from .errors import Infeasible, InfeasibleDistribution, NonPositivePriority, NotFinite
from .weighting import WeightingParams

BUDGET_TOL = 1e-8

Sense = Literal["harm", "benefit"]


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PriorityProfile:
    """Aggregated priorities t_j > 0, scaled so that they sum to n."""

    t: np.ndarray

    def __post_init__(self):
        t = _readonly(self.t)
        if t.size == 0:
            raise NonPositivePriority("priority profile is empty")
        if not np.all(np.isfinite(t)):
            raise NotFinite("priorities must be finite")
        if np.any(t <= 0):
            raise NonPositivePriority(f"priorities must be > 0, got {t.tolist()}")
        if abs(t.sum() - t.size) > 1e-9 * max(1.0, t.size):
            raise NonPositivePriority(
                f"priorities must sum to n={t.size}, got {t.sum()!r}; use normalize_priorities"
            )
        object.__setattr__(self, "t", t)

    @classmethod
    def ones(cls, n: int) -> "PriorityProfile":
        return cls(np.ones(n))

    @property
    def n(self) -> int:
        return int(self.t.size)

    @property
    def is_homogeneous(self) -> bool:
        return bool(np.all(self.t == 1.0))


def normalize_priorities(raw) -> PriorityProfile:
    """Scale positive raw priorities to sum to n; constant input gives all ones."""
    arr = np.array(raw, dtype=float).reshape(-1)
    if arr.size == 0:
        raise NonPositivePriority("need at least one priority")
    if not np.all(np.isfinite(arr)):
        raise NotFinite("priorities must be finite")
    if np.any(arr <= 0):
        raise NonPositivePriority(f"priorities must be > 0, got {arr.tolist()}")
    if np.all(arr == arr[0]):
        return PriorityProfile.ones(arr.size)
    t = arr * (arr.size / arr.sum())
    # absorb the rounding residue so the profile sums to n as tightly as possible
    t[np.argmax(t)] += arr.size - t.sum()
    return PriorityProfile(t)


@dataclass(frozen=True, eq=False)
class AllocationProblem:
    n: int
    r: float
    sense: Sense
    weighting: WeightingParams
    priorities: Optional[PriorityProfile] = None

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise Infeasible(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not math.isfinite(self.r):
            raise NotFinite(f"r must be finite, got {self.r!r}")
        if not 0.0 <= self.r <= self.n:
            raise Infeasible(f"budget r={self.r!r} outside [0, n={self.n}]")
        object.__setattr__(self, "r", float(self.r))
        if self.sense not in ("harm", "benefit"):
            raise ValueError(f"sense must be 'harm' or 'benefit', got {self.sense!r}")
        if self.priorities is None:
            object.__setattr__(self, "priorities", PriorityProfile.ones(self.n))
        elif self.priorities.n != self.n:
            raise Infeasible(
                f"{self.priorities.n} priorities given for n={self.n} individuals"
            )

    @property
    def t(self) -> np.ndarray:
        return self.priorities.t

    def with_priorities(self, priorities: Optional[PriorityProfile]) -> "AllocationProblem":
        return AllocationProblem(self.n, self.r, self.sense, self.weighting, priorities)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "sense": self.sense,
            "alpha": self.weighting.alpha,
            "beta": self.weighting.beta,
            "priorities": self.t.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AllocationProblem":
        pri = d.get("priorities")
        return cls(
            n=d["n"],
            r=d["r"],
            sense=d["sense"],
            weighting=WeightingParams(d["alpha"], d["beta"]),
            priorities=normalize_priorities(pri) if pri is not None else None,
        )


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probabilities p_i in [0, 1], stored exactly as given."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _readonly(self.p))

    def __len__(self):
        return int(self.p.size)

    @property
    def total(self) -> float:
        return math.fsum(self.p)


@dataclass(frozen=True)
class HarmStructure:
    """k individuals share the at-risk level; one more may hold delta < l.

    For heterogeneous priorities the at-risk levels differ and ``common_p`` is
    None; ``kkt_constant`` then records the shared value of t_j * w'(p_j).
    """

    k: int
    delta: float
    common_p: Optional[float]
    kkt_constant: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "common_p": self.common_p,
            "kkt_constant": self.kkt_constant,
        }


@dataclass(frozen=True)
class BenefitStructure:
    """j individuals at certainty, at most one at gamma in (l, 1), rest equal."""

    j: int
    gamma: Optional[float]
    common_p: Optional[float]

    def to_dict(self) -> dict:
        return {"j": self.j, "gamma": self.gamma, "common_p": self.common_p}


Structure = Union[HarmStructure, BenefitStructure, None]


@dataclass(frozen=True, eq=False)
class SolveResult:
    distribution: Distribution
    objective: float
    structure: Structure
    method: str
    info: dict = field(default_factory=dict)

    @property
    def p(self) -> np.ndarray:
        return self.distribution.p

    def to_dict(self) -> dict:
        return {
            "p": self.p.tolist(),
            "objective": self.objective,
            "structure": self.structure.to_dict() if self.structure is not None else None,
            "method": self.method,
        }


@dataclass
class FeasibilityReport:
    ok: bool
    budget_slack: float
    bound_violations: list  # (index, value) pairs
    length_ok: bool = True

    def __bool__(self):
        return self.ok


def check_feasible(problem: AllocationProblem, dist) -> FeasibilityReport:
    """Per-constraint diagnosis; ``budget_slack`` is sum(p) - r."""
    p = dist.p if isinstance(dist, Distribution) else np.asarray(dist, dtype=float)
    length_ok = p.size == problem.n
    viol = [(i, float(v)) for i, v in enumerate(p) if not (0.0 <= v <= 1.0)]
    slack = math.fsum(p) - problem.r
    ok = length_ok and not viol and abs(slack) <= BUDGET_TOL
    return FeasibilityReport(ok, slack, viol, length_ok)


def perceived_welfare(problem: AllocationProblem, dist) -> float:
    """sigma(t, p) = sum_j t_j * w(p_j)."""
    p = dist.p if isinstance(dist, Distribution) else np.asarray(dist, dtype=float)
    rep = check_feasible(problem, p)
    if not rep.ok:
        raise InfeasibleDistribution(
            f"infeasible distribution: slack={rep.budget_slack:.3g}, "
            f"bound violations={rep.bound_violations[:5]}, length_ok={rep.length_ok}"
        )
    return welfare_unchecked(problem.weighting, problem.t, p)


def welfare_unchecked(params: WeightingParams, t, p) -> float:
    return math.fsum(np.asarray(t, dtype=float) * params.w(np.asarray(p, dtype=float)))
