"""Core value types: agent profiles, GPU pricing, workload traces, allocations."""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

CAPACITY_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid agent, GPU or workload description."""


@dataclass(frozen=True)
class AgentSpec:
    id: int
    name: str
    model_size_mb: float
    base_throughput_rps: float
    min_gpu_fraction: float
    priority: int

    def violations(self) -> list[str]:
        out = []
        tag = f"agent {self.id}"
        if not 0.0 < self.min_gpu_fraction <= 1.0:
            out.append(f"{tag}: min_gpu_fraction must be in (0, 1], got {self.min_gpu_fraction}")
        if not self.base_throughput_rps > 0:
            out.append(f"{tag}: base_throughput_rps must be > 0, got {self.base_throughput_rps}")
        if not self.model_size_mb > 0:
            out.append(f"{tag}: model_size_mb must be > 0, got {self.model_size_mb}")
        if self.priority not in (1, 2, 3):
            out.append(f"{tag}: priority must be 1, 2 or 3, got {self.priority}")
        return out


@dataclass(frozen=True)
class GpuSpec:
    total_capacity: float = 1.0
    memory_mb: float = 16384.0
    price_per_hour_usd: float = 0.72

    def violations(self) -> list[str]:
        out = []
        if not self.total_capacity > 0:
            out.append(f"gpu: total_capacity must be > 0, got {self.total_capacity}")
        if not self.memory_mb > 0:
            out.append(f"gpu: memory_mb must be > 0, got {self.memory_mb}")
        if not self.price_per_hour_usd >= 0:
            out.append(f"gpu: price_per_hour_usd must be >= 0, got {self.price_per_hour_usd}")
        return out

    def cost_usd(self, duration_s: float) -> Decimal:
        """Whole-GPU billing for ``duration_s`` seconds, independent of how the GPU is split."""
        return Decimal(repr(self.price_per_hour_usd)) * Decimal(repr(float(duration_s))) / Decimal(3600)


@dataclass(frozen=True)
class AgentArrays:
    """Struct-of-arrays view of an agent list, the form the kernels consume."""

    min_gpu_fraction: np.ndarray
    priority: np.ndarray
    base_throughput_rps: np.ndarray

    @classmethod
    def from_agents(cls, agents) -> "AgentArrays":
        if isinstance(agents, AgentArrays):
            return agents
        return cls(
            np.array([a.min_gpu_fraction for a in agents], dtype=np.float64),
            np.array([a.priority for a in agents], dtype=np.float64),
            np.array([a.base_throughput_rps for a in agents], dtype=np.float64),
        )

    def __len__(self) -> int:
        return self.min_gpu_fraction.shape[0]


@dataclass(frozen=True, eq=False)
class WorkloadTrace:
    rates: np.ndarray  # [step, agent], requests/second
    timestep_seconds: float = 1.0

    def __post_init__(self):
        rates = np.ascontiguousarray(self.rates, dtype=np.float64)
        if rates.ndim != 2:
            raise ConfigError(f"rates must be a [step, agent] matrix, got shape {rates.shape}")
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ConfigError("arrival rates must be finite and >= 0")
        if not self.timestep_seconds > 0:
            raise ConfigError(f"timestep_seconds must be > 0, got {self.timestep_seconds}")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    @property
    def duration_steps(self) -> int:
        return self.rates.shape[0]

    @property
    def n_agents(self) -> int:
        return self.rates.shape[1]

    @property
    def duration_s(self) -> float:
        return self.duration_steps * self.timestep_seconds

    def __eq__(self, other):
        if not isinstance(other, WorkloadTrace):
            return NotImplemented
        return self.timestep_seconds == other.timestep_seconds and np.array_equal(self.rates, other.rates)


@dataclass(frozen=True, eq=False)
class Allocation:
    fractions: np.ndarray
    total_capacity: float = 1.0

    def __post_init__(self):
        f = np.asarray(self.fractions, dtype=np.float64)
        f.setflags(write=False)
        object.__setattr__(self, "fractions", f)

    def is_feasible(self, tol: float = CAPACITY_TOL) -> bool:
        f = self.fractions
        return bool(np.all(f >= 0) and f.sum() <= self.total_capacity + tol)

    def __len__(self):
        return self.fractions.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.total_capacity == other.total_capacity and np.array_equal(self.fractions, other.fractions)


@dataclass(frozen=True)
class ObjectiveWeights:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"objective weight {name} must be finite and >= 0, got {v}")


@dataclass
class ValidationResult:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_if_invalid(self):
        if self.violations:
            raise ConfigError("; ".join(self.violations))


def validate_system(agents, gpu: GpuSpec) -> ValidationResult:
    """Check every agent and the GPU, plus that all models fit in GPU memory together."""
    if not agents:
        return ValidationResult(["agent list is empty"])
    problems = []
    for a in agents:
        problems.extend(a.violations())
    problems.extend(gpu.violations())
    ids = [a.id for a in agents]
    if len(set(ids)) != len(ids):
        problems.append(f"duplicate agent ids: {ids}")
    total_mb = sum(a.model_size_mb for a in agents)
    if total_mb > gpu.memory_mb:
        problems.append(f"models need {total_mb:g} MB but the GPU has {gpu.memory_mb:g} MB")
    return ValidationResult(problems)


# Agent profiles and arrival rates from the reference experiment.
PAPER_AGENTS = (
    AgentSpec(0, "coordinator", 500, 100, 0.10, 1),
    AgentSpec(1, "nlp", 2000, 50, 0.30, 2),
    AgentSpec(2, "vision", 1500, 60, 0.25, 2),
    AgentSpec(3, "reasoning", 3000, 30, 0.35, 1),
)
PAPER_RATES = (80.0, 40.0, 45.0, 25.0)
T4_GPU = GpuSpec(total_capacity=1.0, memory_mb=16384.0, price_per_hour_usd=0.72)
