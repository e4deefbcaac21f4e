"""Allocation policies and a discrete-time simulator for agents sharing one GPU."""
from .allocator import (PolicyId, allocate_adaptive, allocate_round_robin, allocate_static_equal,
                        compute_demands, effective_service_rate)
from .domain import (PAPER_AGENTS, PAPER_RATES, T4_GPU, AgentSpec, Allocation, ConfigError, GpuSpec,
                     ObjectiveWeights, WorkloadTrace, validate_system)
from .engine import RunSummary, SimConfig, SimState, TimestepRecord, objective_score, run, simulate, step

__version__ = "0.1.0"
