"""Allocation policies: adaptive demand-weighted split and the two baselines.

Every policy is a pure function ``(agents, rates, capacity, step_index) -> Allocation``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .domain import AgentArrays, AgentSpec, Allocation


class PolicyId(str, enum.Enum):
    ADAPTIVE = "adaptive"
    STATIC_EQUAL = "static_equal"
    ROUND_ROBIN = "round_robin"

    @classmethod
    def parse(cls, name) -> "PolicyId":
        if isinstance(name, cls):
            return name
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown policy {name!r}; valid policies: {valid}") from None


@dataclass(frozen=True, eq=False)
class DemandVector:
    demands: np.ndarray
    total: float


def _as_rates(rates, n):
    r = np.ascontiguousarray(rates, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] != n:
        raise ValueError(f"expected {n} arrival rates, got shape {r.shape}")
    return r


def _check_capacity(capacity):
    if not (np.isfinite(capacity) and capacity > 0):
        raise ValueError(f"capacity must be finite and > 0, got {capacity}")


def _raise_status(status):
    if status == _kernels.ERR_NONFINITE:
        raise ValueError("arrival rates must be finite")
    if status == _kernels.ERR_NEGATIVE:
        raise ValueError("arrival rates must be >= 0")


def compute_demands(agents, rates) -> DemandVector:
    """Demand score per agent: rate times minimum fraction, divided by priority."""
    arr = AgentArrays.from_agents(agents)
    r = _as_rates(rates, len(arr))
    if not np.all(np.isfinite(r)):
        _raise_status(_kernels.ERR_NONFINITE)
    if np.any(r < 0):
        _raise_status(_kernels.ERR_NEGATIVE)
    d = r * arr.min_gpu_fraction / arr.priority
    return DemandVector(d, float(d.sum()))


def allocate_adaptive(agents, rates, capacity: float = 1.0, step_index: int = 0, *, backend=None) -> Allocation:
    """Split ``capacity`` in proportion to demand, lift each share to its floor,
    then scale everything down if the floors pushed the total past capacity.

    All-zero demand yields an all-zero allocation. ``step_index`` is ignored;
    it is accepted so every policy shares one signature.
    """
    arr = AgentArrays.from_agents(agents)
    r = _as_rates(rates, len(arr))
    _check_capacity(capacity)
    kernel, _ = _kernels.get_kernels(backend)
    g, status = kernel(arr.min_gpu_fraction, arr.priority, r, float(capacity))
    _raise_status(status)
    return Allocation(g, float(capacity))


def allocate_static_equal(agents, rates=None, capacity: float = 1.0, step_index: int = 0) -> Allocation:
    n = len(agents)
    if n == 0:
        raise ValueError("agent list is empty")
    _check_capacity(capacity)
    return Allocation(np.full(n, capacity / n), float(capacity))


def allocate_round_robin(agents, rates=None, capacity: float = 1.0, step_index: int = 0) -> Allocation:
    """Whole capacity to agent ``step_index mod N``, in config order."""
    n = len(agents)
    if n == 0:
        raise ValueError("agent list is empty")
    if step_index < 0:
        raise ValueError(f"step_index must be >= 0, got {step_index}")
    _check_capacity(capacity)
    g = np.zeros(n)
    g[step_index % n] = capacity
    return Allocation(g, float(capacity))


POLICIES = {
    PolicyId.ADAPTIVE: allocate_adaptive,
    PolicyId.STATIC_EQUAL: allocate_static_equal,
    PolicyId.ROUND_ROBIN: allocate_round_robin,
}


def get_policy(policy):
    return POLICIES[PolicyId.parse(policy)]


def effective_service_rate(agent: AgentSpec, g: float) -> float:
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"GPU fraction must be in [0, 1], got {g}")
    return g * agent.base_throughput_rps
