"""Perceived-welfare-optimal probabilistic allocations under probability weighting."""

from .benefit import (
    min_r_certain,
    solve_benefit,
    solve_benefit_heterogeneous,
    solve_benefit_homogeneous,
    uniformity_threshold,
)
from .harm import (
    kkt_waterfill,
    solve_harm,
    solve_harm_heterogeneous,
    solve_harm_homogeneous,
    sweep_k,
)
from .model import (
    AllocationProblem,
    BenefitStructure,
    Distribution,
    HarmStructure,
    PriorityProfile,
    SolveResult,
    check_feasible,
    normalize_priorities,
    perceived_welfare,
)
from .oracle import GridSpec, brute_force, lemma_oracle
from .weighting import WeightingLandmarks, WeightingParams, landmarks, validate

__version__ = "0.1.0"
