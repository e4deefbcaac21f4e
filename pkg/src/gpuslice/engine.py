"""Discrete-time fluid-queue simulation of agents sharing one GPU.

Each step, per agent: arrivals join the queue, the policy picks GPU fractions
from the current rates, the agent serves up to ``g * T * dt`` requests, and the
latency sample is the remaining queue divided by the service rate
``max(g, delta) * T``. ``delta`` only guards the latency denominator for
agents that got no GPU this step; it never adds service.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .allocator import PolicyId, get_policy
from .domain import (AgentArrays, AgentSpec, CAPACITY_TOL, ConfigError, GpuSpec,
                     ObjectiveWeights, WorkloadTrace, validate_system)

DEFAULT_LATENCY_FLOOR = 0.03


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    agents: tuple
    gpu: GpuSpec
    workload: WorkloadTrace
    policy: PolicyId = PolicyId.ADAPTIVE
    latency_floor_fraction: float = DEFAULT_LATENCY_FLOOR
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "policy", PolicyId.parse(self.policy))
        if not 0.0 < self.latency_floor_fraction <= 1.0:
            raise ConfigError(f"latency_floor_fraction must be in (0, 1], got {self.latency_floor_fraction}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def with_policy(self, policy) -> "SimConfig":
        return SimConfig(self.agents, self.gpu, self.workload, policy, self.latency_floor_fraction, self.seed)

    def with_workload(self, workload: WorkloadTrace) -> "SimConfig":
        return SimConfig(self.agents, self.gpu, workload, self.policy, self.latency_floor_fraction, self.seed)


@dataclass(frozen=True, eq=False)
class SimState:
    queues: np.ndarray

    @classmethod
    def empty(cls, n_agents: int) -> "SimState":
        return cls(np.zeros(n_agents))


@dataclass(frozen=True, eq=False)
class TimestepRecord:
    step: int
    allocation: np.ndarray
    arrivals: np.ndarray
    served: np.ndarray
    queue: np.ndarray
    latency_s: np.ndarray


@dataclass(frozen=True)
class RunSummary:
    policy: str
    avg_latency_s: float
    per_agent_avg_latency_s: tuple
    total_throughput_rps: float
    per_agent_throughput_rps: tuple
    cost_usd: float
    duration_s: float
    final_queues: tuple


@dataclass(frozen=True, eq=False)
class RunResult:
    """Full per-step arrays of one run, shaped [step, agent]."""

    summary: RunSummary
    allocation: np.ndarray
    arrivals: np.ndarray
    served: np.ndarray
    queue: np.ndarray
    latency_s: np.ndarray
    agent_ids: tuple = field(default=())

    @property
    def records(self) -> list[TimestepRecord]:
        return [
            TimestepRecord(t, self.allocation[t], self.arrivals[t], self.served[t], self.queue[t], self.latency_s[t])
            for t in range(self.allocation.shape[0])
        ]


def step(state: SimState, agents, rates_t, policy, step_index: int, dt: float = 1.0,
         delta: float = DEFAULT_LATENCY_FLOOR, capacity: float = 1.0):
    """Advance one timestep. Returns ``(next_state, record)``."""
    arr = AgentArrays.from_agents(agents)
    rates_t = np.asarray(rates_t, dtype=np.float64)
    q = np.asarray(state.queues, dtype=np.float64)
    if not np.all(np.isfinite(q)) or np.any(q < 0):
        raise SimulationError(f"invalid queue state at step {step_index}: {q}")
    if rates_t.shape != q.shape or not np.all(np.isfinite(rates_t)) or np.any(rates_t < 0):
        raise SimulationError(f"invalid arrival rates at step {step_index}: {rates_t}")
    arrivals = rates_t * dt
    q = q + arrivals
    g = get_policy(policy)(arr, rates_t, capacity, step_index).fractions
    tput = arr.base_throughput_rps
    served = np.minimum(q, g * tput * dt)
    q = q - served
    latency = q / (np.maximum(g, delta) * tput)
    rec = TimestepRecord(step_index, g, arrivals, served, q, latency)
    return SimState(q), rec


def allocation_matrix(config: SimConfig) -> np.ndarray:
    arr = AgentArrays.from_agents(config.agents)
    policy = get_policy(config.policy)
    cap = config.gpu.total_capacity
    rates = config.workload.rates
    out = np.empty_like(rates)
    for t in range(rates.shape[0]):
        out[t] = policy(arr, rates[t], cap, t).fractions
    return out


def simulate(config: SimConfig, *, backend=None) -> RunResult:
    check = validate_system(config.agents, config.gpu)
    check.raise_if_invalid()
    trace = config.workload
    n = len(config.agents)
    if trace.n_agents != n:
        raise ConfigError(f"workload has {trace.n_agents} agent columns but config has {n} agents")
    arr = AgentArrays.from_agents(config.agents)
    dt = trace.timestep_seconds

    alloc = allocation_matrix(config)
    if np.any(alloc.sum(axis=1) > config.gpu.total_capacity + CAPACITY_TOL):
        raise SimulationError("policy exceeded GPU capacity")
    arrivals = trace.rates * dt
    _, kernel = _kernels.get_kernels(backend)
    served, queue, latency = kernel(arrivals, alloc, arr.base_throughput_rps, float(dt),
                                    float(config.latency_floor_fraction), np.zeros(n))
    if not (np.all(np.isfinite(queue)) and np.all(np.isfinite(latency))):
        raise SimulationError("non-finite simulation state")

    duration_s = trace.duration_s
    per_agent_tput = served.sum(axis=0) / duration_s
    per_agent_lat = latency.mean(axis=0)
    summary = RunSummary(
        policy=config.policy.value,
        avg_latency_s=float(latency.mean()),
        per_agent_avg_latency_s=tuple(float(x) for x in per_agent_lat),
        total_throughput_rps=float(sum(float(x) for x in per_agent_tput)),
        per_agent_throughput_rps=tuple(float(x) for x in per_agent_tput),
        cost_usd=float(config.gpu.cost_usd(duration_s)),
        duration_s=float(duration_s),
        final_queues=tuple(float(x) for x in queue[-1]),
    )
    return RunResult(summary, alloc, arrivals, served, queue, latency, tuple(a.id for a in config.agents))


def run(config: SimConfig, *, backend=None):
    """Simulate ``config``; returns ``(RunSummary, list[TimestepRecord])``."""
    res = simulate(config, backend=backend)
    return res.summary, res.records


def objective_score(summary: RunSummary, w: ObjectiveWeights) -> float:
    """Weighted latency plus cost minus throughput; lower is better."""
    if not isinstance(w, ObjectiveWeights):
        w = ObjectiveWeights(*w)
    return w.alpha * summary.avg_latency_s + w.beta * summary.cost_usd - w.gamma * summary.total_throughput_rps
