import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpuslice.allocator import (PolicyId, allocate_adaptive, allocate_round_robin, allocate_static_equal,
                                compute_demands, effective_service_rate, get_policy)
from gpuslice.domain import PAPER_AGENTS, PAPER_RATES, AgentArrays, AgentSpec

from oracles import adaptive_exact

BACKENDS = ["numba", "numpy"]
# Exact-rational evaluation of the adaptive rule on the reference agents and rates.
PAPER_ALLOCATION = (0.23853894893775623, 0.25382035035408124, 0.21151695862840103, 0.29612374207976144)


def test_coordinator_demand():
    d = compute_demands(PAPER_AGENTS[:1], [80.0])
    assert d.demands[0] == pytest.approx(8.0, abs=1e-12)


def test_paper_demands():
    d = compute_demands(PAPER_AGENTS, PAPER_RATES)
    np.testing.assert_allclose(d.demands, [8.0, 6.0, 5.625, 8.75], rtol=1e-12)
    assert d.total == pytest.approx(28.375, rel=1e-12)


def test_zero_rate_zero_demand():
    assert np.all(compute_demands(PAPER_AGENTS, [0, 0, 0, 0]).demands == 0)


@pytest.mark.parametrize("rates", [[1, 2, 3], [1, 2, 3, -1], [1, 2, np.inf, 3]])
def test_demand_errors(rates):
    with pytest.raises(ValueError):
        compute_demands(PAPER_AGENTS, rates)


@pytest.mark.parametrize("backend", BACKENDS)
def test_paper_allocation(backend):
    g = allocate_adaptive(PAPER_AGENTS, PAPER_RATES, 1.0, backend=backend).fractions
    np.testing.assert_allclose(g, PAPER_ALLOCATION, rtol=0, atol=1e-15)
    np.testing.assert_allclose(g, [0.23854, 0.25382, 0.21151, 0.29612], atol=1e-5)
    assert abs(g.sum() - 1.0) <= 1e-9


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_rates_zero_allocation(backend):
    g = allocate_adaptive(PAPER_AGENTS, [0, 0, 0, 0], 1.0, backend=backend).fractions
    assert np.array_equal(g, np.zeros(4))


@pytest.mark.parametrize("backend", BACKENDS)
def test_single_agent_gets_everything(backend):
    a = [AgentSpec(0, "solo", 100, 10, 0.10, 2)]
    assert allocate_adaptive(a, [5.0], 1.0, backend=backend).fractions[0] == 1.0


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("rates", [[1, 2, 3], [1, 2, 3, -1], [1, 2, np.nan, 3]])
def test_adaptive_errors(backend, rates):
    with pytest.raises(ValueError):
        allocate_adaptive(PAPER_AGENTS, rates, 1.0, backend=backend)


def test_adaptive_rejects_bad_capacity():
    with pytest.raises(ValueError):
        allocate_adaptive(PAPER_AGENTS, PAPER_RATES, 0.0)


def test_static_equal():
    np.testing.assert_array_equal(allocate_static_equal(PAPER_AGENTS, None, 1.0).fractions, [0.25] * 4)
    five = PAPER_AGENTS + (AgentSpec(4, "x", 1, 1, 0.1, 3),)
    np.testing.assert_allclose(allocate_static_equal(five, None, 1.0).fractions, [0.2] * 5)
    np.testing.assert_array_equal(allocate_static_equal(PAPER_AGENTS, None, 0.5).fractions, [0.125] * 4)
    with pytest.raises(ValueError):
        allocate_static_equal([], None, 1.0)


@pytest.mark.parametrize("step,cap,expected", [
    (0, 1.0, [1.0, 0, 0, 0]),
    (5, 1.0, [0, 1.0, 0, 0]),
    (3, 0.8, [0, 0, 0, 0.8]),
])
def test_round_robin(step, cap, expected):
    np.testing.assert_array_equal(allocate_round_robin(PAPER_AGENTS, None, cap, step).fractions, expected)


def test_round_robin_empty():
    with pytest.raises(ValueError):
        allocate_round_robin([], None, 1.0, 0)


def test_effective_service_rate():
    assert effective_service_rate(PAPER_AGENTS[0], 0.25) == 25.0
    assert effective_service_rate(PAPER_AGENTS[1], 0.0) == 0.0
    assert effective_service_rate(PAPER_AGENTS[3], 0.29612) == pytest.approx(8.8836, abs=1e-9)
    with pytest.raises(ValueError):
        effective_service_rate(PAPER_AGENTS[0], 1.2)


def test_policy_lookup():
    assert get_policy("adaptive") is allocate_adaptive
    with pytest.raises(ValueError, match="valid policies"):
        PolicyId.parse("fifo")


def test_adaptive_is_time_invariant():
    a = allocate_adaptive(PAPER_AGENTS, PAPER_RATES, 1.0, 0)
    b = allocate_adaptive(PAPER_AGENTS, PAPER_RATES, 1.0, 77)
    assert a == b


agent_sets = st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0.001, 1.0), min_size=n, max_size=n),
    st.lists(st.integers(1, 3), min_size=n, max_size=n),
    st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 1e4)), min_size=n, max_size=n),
    st.floats(0.05, 4.0),
))


@settings(max_examples=300, deadline=None)
@given(agent_sets)
def test_adaptive_matches_exact_oracle(case):
    floors, prios, rates, cap = case
    arr = AgentArrays(np.array(floors), np.array(prios, float), np.ones(len(floors)))
    want = [float(x) for x in adaptive_exact(floors, prios, rates, cap)]
    for b in BACKENDS:
        got = allocate_adaptive(arr, rates, cap, backend=b).fractions
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-15)


@settings(max_examples=300, deadline=None)
@given(agent_sets, st.floats(1e-3, 1e3))
def test_scale_invariance(case, c):
    floors, prios, rates, cap = case
    arr = AgentArrays(np.array(floors), np.array(prios, float), np.ones(len(floors)))
    g1 = allocate_adaptive(arr, rates, cap).fractions
    g2 = allocate_adaptive(arr, np.array(rates) * c, cap).fractions
    np.testing.assert_allclose(g2, g1, rtol=0, atol=1e-12)
