import numpy as np
import pytest

from gpuslice.domain import PAPER_AGENTS, PAPER_RATES, T4_GPU, AgentSpec, ConfigError, ObjectiveWeights
from gpuslice.engine import RunSummary, SimConfig, SimState, SimulationError, objective_score, run, simulate, step
from gpuslice.workload import constant_trace, poisson_trace

from oracles import brute_force_queues, static_equal_latency


def _cfg(policy, trace, agents=PAPER_AGENTS, delta=0.03):
    return SimConfig(agents, T4_GPU, trace, policy, delta)


def test_step_static_coordinator_first_step():
    st, rec = step(SimState.empty(4), PAPER_AGENTS, PAPER_RATES, "static_equal", 0)
    assert rec.arrivals[0] == 80.0
    assert rec.served[0] == 25.0
    assert st.queues[0] == 55.0
    assert rec.latency_s[0] == pytest.approx(2.2, abs=1e-12)


def test_step_empty_system():
    st, rec = step(SimState.empty(4), PAPER_AGENTS, [0, 0, 0, 0], "adaptive", 0)
    assert np.all(rec.served == 0) and np.all(st.queues == 0) and np.all(rec.latency_s == 0)


def test_step_round_robin_inactive_agent_uses_floor():
    q0 = SimState(np.array([160.0, 0.0, 0.0, 0.0]))
    # step 1 hands the GPU to agent 1, so the coordinator gets nothing
    st, rec = step(q0, PAPER_AGENTS, [0, 0, 0, 0], "round_robin", 1)
    assert rec.allocation[0] == 0.0
    assert rec.served[0] == 0.0
    assert rec.latency_s[0] == pytest.approx(160 / 3, rel=1e-12)


def test_step_rejects_bad_state():
    with pytest.raises(SimulationError):
        step(SimState(np.array([np.nan, 0, 0, 0])), PAPER_AGENTS, PAPER_RATES, "adaptive", 0)
    with pytest.raises(SimulationError):
        step(SimState(np.zeros(4)), PAPER_AGENTS, [1, 1, 1, -1], "adaptive", 0)


@pytest.mark.parametrize("policy", ["adaptive", "static_equal", "round_robin"])
@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_run_matches_stepwise(policy, backend, paper_trace):
    res = simulate(_cfg(policy, paper_trace), backend=backend)
    st = SimState.empty(4)
    for t in range(paper_trace.duration_steps):
        st, rec = step(st, PAPER_AGENTS, paper_trace.rates[t], policy, t)
        np.testing.assert_array_equal(rec.served, res.served[t])
        np.testing.assert_array_equal(rec.latency_s, res.latency_s[t])
    np.testing.assert_array_equal(st.queues, res.summary.final_queues)


@pytest.mark.parametrize("policy", ["adaptive", "static_equal", "round_robin"])
def test_run_matches_brute_force(policy, rng):
    trace = poisson_trace([30, 10, 20, 5], 60, 0.5, seed=3)
    res = simulate(_cfg(policy, trace))
    tput = [a.base_throughput_rps for a in PAPER_AGENTS]
    served, lat, q = brute_force_queues(trace.rates.tolist(), res.allocation.tolist(), tput, 0.5, 0.03)
    np.testing.assert_allclose(res.served, served, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(res.latency_s, lat, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(res.summary.final_queues, q, rtol=1e-12)


def test_static_paper_values(paper_trace):
    s, records = run(_cfg("static_equal", paper_trace))
    assert len(records) == 100
    assert s.avg_latency_s == pytest.approx(float(static_equal_latency(PAPER_RATES, [100, 50, 60, 30], 100)),
                                            rel=1e-12)
    assert s.avg_latency_s == pytest.approx(110.258333333, abs=1e-6)
    assert s.total_throughput_rps == pytest.approx(60.0, abs=1e-12)
    assert s.cost_usd == 0.02


def test_adaptive_paper_values(paper_trace):
    s, _ = run(_cfg("adaptive", paper_trace))
    assert round(s.avg_latency_s, 1) == 111.9
    assert round(s.total_throughput_rps, 1) == 58.1
    assert round(s.per_agent_avg_latency_s[3], 1) == 91.6
    assert round(s.per_agent_avg_latency_s[2], 1) == 128.6
    assert s.total_throughput_rps == pytest.approx(sum(s.per_agent_throughput_rps), abs=1e-9)


@pytest.mark.parametrize("policy", ["adaptive", "static_equal", "round_robin"])
def test_zero_workload(policy):
    s, _ = run(_cfg(policy, constant_trace([0, 0, 0, 0], 100)))
    assert s.avg_latency_s == 0 and s.total_throughput_rps == 0
    assert s.cost_usd == 0.02


def test_cost_is_policy_independent(paper_trace):
    costs = {run(_cfg(p, paper_trace))[0].cost_usd for p in ("adaptive", "static_equal", "round_robin")}
    assert costs == {0.02}


def test_work_bound_and_nonnegative_queues(paper_trace):
    for p in ("adaptive", "static_equal", "round_robin"):
        res = simulate(_cfg(p, paper_trace))
        tput = np.array([a.base_throughput_rps for a in PAPER_AGENTS])
        assert np.all(res.queue >= 0)
        assert np.all(res.served <= res.allocation * tput + 1e-9)


def test_trace_agent_mismatch():
    with pytest.raises(ConfigError):
        simulate(_cfg("adaptive", constant_trace([1, 2, 3], 5)))


def test_invalid_agents_rejected():
    bad = (AgentSpec(0, "x", 1e6, 10, 0.2, 1),)
    with pytest.raises(ConfigError):
        simulate(_cfg("adaptive", constant_trace([1.0], 5), agents=bad))


def test_latency_floor_bounds():
    with pytest.raises(ConfigError):
        SimConfig(PAPER_AGENTS, T4_GPU, constant_trace(PAPER_RATES, 2), "adaptive", 0.0)


def _row(lat, tput, cost=0.02):
    return RunSummary("x", lat, (), tput, (), cost, 100.0, ())


def test_objective_score():
    assert objective_score(_row(110.3, 60.0), ObjectiveWeights(1, 1, 1)) == pytest.approx(50.32, abs=1e-12)
    assert objective_score(_row(111.9, 58.1), ObjectiveWeights(0, 0, 1)) == -58.1
    assert objective_score(_row(111.9, 58.1), ObjectiveWeights(1, 0, 0)) == 111.9
    with pytest.raises(ValueError):
        objective_score(_row(1, 1), (1, -1, 0))
