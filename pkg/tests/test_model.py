import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwalloc.errors import Infeasible, InfeasibleDistribution, NonPositivePriority
from pwalloc.model import (
    AllocationProblem,
    Distribution,
    check_feasible,
    normalize_priorities,
    perceived_welfare,
)
from pwalloc.weighting import WeightingParams

P05 = WeightingParams(0.5, 1.0)


def harm(n, r, params=P05, t=None):
    return AllocationProblem(n, r, "harm", params, t)


class TestPerceivedWelfare:
    def test_single_certain(self):
        assert perceived_welfare(harm(5, 1.0), [1, 0, 0, 0, 0]) == 1.0

    def test_two_halves(self):
        expected = 2 * math.exp(-math.sqrt(math.log(2.0)))
        assert expected == pytest.approx(0.86988, abs=1e-5)
        assert perceived_welfare(harm(4, 1.0), [0.5, 0.5, 0, 0]) == pytest.approx(expected, rel=1e-14)

    def test_uniform_with_priorities(self):
        t = normalize_priorities([2, 0.5, 0.5, 1, 1, 1])
        prob = harm(6, 1.5, t=t)
        p = np.full(6, 0.25)
        assert perceived_welfare(prob, p) == pytest.approx(6 * P05.w(0.25), rel=1e-14)

    def test_infeasible_raises(self):
        with pytest.raises(InfeasibleDistribution):
            perceived_welfare(harm(3, 1.0), [0.6, 0.6, 0.0])


class TestCheckFeasible:
    def test_ok(self):
        assert check_feasible(harm(3, 1.0), [0.5, 0.5, 0.0]).ok

    def test_budget_violation(self):
        rep = check_feasible(harm(3, 1.0), [0.6, 0.6, 0.0])
        assert not rep.ok
        assert rep.budget_slack == pytest.approx(0.2, abs=1e-15)
        assert rep.bound_violations == []

    def test_bound_violation(self):
        rep = check_feasible(harm(3, 1.0), [1.2, -0.2, 0.0])
        assert not rep.ok
        assert [i for i, _ in rep.bound_violations] == [0, 1]

    def test_degenerate_budgets(self):
        assert check_feasible(harm(3, 0.0), np.zeros(3)).ok
        assert not check_feasible(harm(3, 0.0), [0.1, 0.0, 0.0]).ok
        assert check_feasible(harm(3, 3.0), np.ones(3)).ok
        assert not check_feasible(harm(3, 3.0), [1.0, 1.0, 0.9]).ok

    def test_distribution_not_renormalized(self):
        d = Distribution([0.3, 0.3])
        assert d.total == 0.6
        with pytest.raises(ValueError):
            d.p[0] = 0.5


class TestPriorities:
    def test_uniform(self):
        assert normalize_priorities([5, 5, 5]).t.tolist() == [1.0, 1.0, 1.0]

    def test_scaled(self):
        assert normalize_priorities([1, 3]).t.tolist() == [0.5, 1.5]

    def test_nonpositive(self):
        with pytest.raises(NonPositivePriority):
            normalize_priorities([1, 0, 2])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=30))
    def test_sums_to_n(self, raw):
        t = normalize_priorities(raw).t
        assert abs(t.sum() - len(raw)) <= 1e-9 * len(raw)
        assert np.all(t > 0)


class TestProblem:
    def test_budget_range(self):
        with pytest.raises(Infeasible):
            harm(3, 5.0)
        with pytest.raises(Infeasible):
            harm(3, -0.1)

    def test_round_trip_dict(self):
        prob = harm(3, 1.0, t=normalize_priorities([1, 2, 3]))
        again = AllocationProblem.from_dict(prob.to_dict())
        assert again.to_dict() == prob.to_dict()


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.data())
def test_permutation_equivariance(n, data):
    raw = data.draw(st.lists(st.floats(0.1, 5.0), min_size=n, max_size=n))
    x = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    r = float(x.sum())
    t = normalize_priorities(raw)
    perm = np.array(data.draw(st.permutations(range(n))))
    a = perceived_welfare(harm(n, r, t=t), x)
    b = perceived_welfare(harm(n, r, t=normalize_priorities(np.array(raw)[perm])), x[perm])
    assert a == pytest.approx(b, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.data())
def test_homogeneous_reduction(n, data):
    x = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    prob = harm(n, float(x.sum()))
    assert perceived_welfare(prob, x) == pytest.approx(sum(P05.w(float(v)) for v in x), rel=1e-12)
