"""Allocator timing: per-call latency and log-log scaling fit."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .allocator import allocate_adaptive
from .domain import AgentArrays


@dataclass(frozen=True)
class BenchRow:
    n_agents: int
    median_s: float
    p99_s: float
    kernel_s: float | None  # per-call time measured inside compiled code (numba only)


def random_agents(n: int, rng) -> tuple[AgentArrays, np.ndarray]:
    arr = AgentArrays(
        min_gpu_fraction=rng.uniform(0.01, 1.0, n),
        priority=rng.integers(1, 4, n).astype(np.float64),
        base_throughput_rps=rng.uniform(1.0, 100.0, n),
    )
    return arr, rng.uniform(0.0, 100.0, n)


def _kernel_time(arr, rates, min_total_elems=2_000_000):
    if _kernels.time_adaptive_reps is None:
        return None
    n = len(arr)
    args = (arr.min_gpu_fraction, arr.priority, rates, 1.0)
    _kernels.time_adaptive_reps(*args, 1)
    reps = max(3, min_total_elems // n)
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        _kernels.time_adaptive_reps(*args, reps)
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def bench_allocator(agent_counts, repetitions: int = 200, seed: int = 0, backend=None) -> list[BenchRow]:
    rng = np.random.default_rng(seed)
    rows = []
    for n in agent_counts:
        if n < 1:
            raise ValueError(f"agent count must be >= 1, got {n}")
        arr, rates = random_agents(int(n), rng)
        allocate_adaptive(arr, rates, 1.0, backend=backend)  # warm-up / JIT
        times = np.empty(repetitions)
        for k in range(repetitions):
            t0 = time.perf_counter()
            allocate_adaptive(arr, rates, 1.0, backend=backend)
            times[k] = time.perf_counter() - t0
        kern = _kernel_time(arr, rates) if (backend or _kernels.backend()) == "numba" else None
        rows.append(BenchRow(int(n), float(np.median(times)), float(np.percentile(times, 99)), kern))
    return rows


def loglog_slope(ns, times) -> float:
    """Least-squares slope of log(time) against log(N)."""
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(times, float)), 1)[0])
