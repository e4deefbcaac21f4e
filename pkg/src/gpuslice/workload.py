"""Workload generators and trace CSV I/O.

Stochastic traces use numpy's PCG64 bit generator (PCG-XSL-RR 128/64) seeded
directly from the integer seed, sampled with ``Generator.poisson``.
"""
from __future__ import annotations

import csv

import numpy as np

from .domain import ConfigError, WorkloadTrace

DEFAULT_SPIKE_WINDOW = (40, 50)


def _rate_vector(rates):
    r = np.asarray(rates, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ConfigError("rates must be a non-empty vector")
    if not np.all(np.isfinite(r)) or np.any(r < 0):
        raise ConfigError("rates must be finite and >= 0")
    return r


def _check_duration(duration_steps):
    if int(duration_steps) != duration_steps or duration_steps < 1:
        raise ConfigError(f"duration_steps must be a positive integer, got {duration_steps}")
    return int(duration_steps)


def constant_trace(rates, duration_steps: int, dt: float = 1.0) -> WorkloadTrace:
    r = _rate_vector(rates)
    d = _check_duration(duration_steps)
    return WorkloadTrace(np.tile(r, (d, 1)), dt)


def spike_trace(base_rates, duration_steps: int, dt: float = 1.0, spike_agent="all",
                spike_factor: float = 10.0, window=None) -> WorkloadTrace:
    """Constant trace with rates multiplied by ``spike_factor`` over ``[start, end)``.

    ``spike_agent`` is an agent index or ``"all"``.
    """
    r = _rate_vector(base_rates)
    d = _check_duration(duration_steps)
    if not (np.isfinite(spike_factor) and spike_factor > 0):
        raise ConfigError(f"spike_factor must be > 0, got {spike_factor}")
    start, end = DEFAULT_SPIKE_WINDOW if window is None else window
    if not 0 <= start < end <= d:
        raise ConfigError(f"spike window [{start}, {end}) is empty or outside [0, {d})")
    rates = np.tile(r, (d, 1))
    if spike_agent == "all":
        rates[start:end, :] *= spike_factor
    else:
        k = int(spike_agent)
        if not 0 <= k < r.size:
            raise ConfigError(f"spike_agent {spike_agent} out of range for {r.size} agents")
        rates[start:end, k] *= spike_factor
    return WorkloadTrace(rates, dt)


def skew_trace(total_rate: float, dominant_agent: int, dominant_share: float, n_agents: int,
               duration_steps: int, dt: float = 1.0) -> WorkloadTrace:
    """One agent receives ``dominant_share`` of ``total_rate``; the rest is split equally."""
    d = _check_duration(duration_steps)
    if not 0.0 <= dominant_share <= 1.0:
        raise ConfigError(f"dominant_share must be in [0, 1], got {dominant_share}")
    if not (np.isfinite(total_rate) and total_rate >= 0):
        raise ConfigError(f"total_rate must be finite and >= 0, got {total_rate}")
    if not 0 <= dominant_agent < n_agents:
        raise ConfigError(f"dominant_agent {dominant_agent} out of range for {n_agents} agents")
    if n_agents < 2 and dominant_share < 1.0:
        raise ConfigError("need at least 2 agents to spread the non-dominant share")
    row = np.zeros(n_agents)
    if n_agents > 1:
        row[:] = (1.0 - dominant_share) * total_rate / (n_agents - 1)
    row[dominant_agent] = dominant_share * total_rate
    return WorkloadTrace(np.tile(row, (d, 1)), dt)


def poisson_trace(mean_rates, duration_steps: int, dt: float = 1.0, seed: int = 0) -> WorkloadTrace:
    """Each cell is Poisson(mean * dt) / dt, drawn row by row from PCG64(seed)."""
    m = _rate_vector(mean_rates)
    d = _check_duration(duration_steps)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    counts = rng.poisson(m * dt, size=(d, m.size))
    return WorkloadTrace(counts.astype(np.float64) / dt, dt)


def write_trace_csv(trace: WorkloadTrace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "agent_id", "rate_rps"])
        for t, row in enumerate(trace.rates):
            for i, v in enumerate(row):
                w.writerow([t, i, repr(float(v))])


def read_trace_csv(path, dt: float = 1.0) -> WorkloadTrace:
    cells = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["step", "agent_id", "rate_rps"]:
            raise ConfigError(f"{path}: expected header step,agent_id,rate_rps, got {reader.fieldnames}")
        for lineno, rec in enumerate(reader, start=2):
            try:
                key = (int(rec["step"]), int(rec["agent_id"]))
                cells[key] = float(rec["rate_rps"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if not cells:
        raise ConfigError(f"{path}: no trace rows")
    n_steps = max(k[0] for k in cells) + 1
    n_agents = max(k[1] for k in cells) + 1
    if len(cells) != n_steps * n_agents:
        raise ConfigError(f"{path}: trace is not a complete {n_steps}x{n_agents} grid")
    rates = np.empty((n_steps, n_agents))
    for (t, i), v in cells.items():
        rates[t, i] = v
    return WorkloadTrace(rates, dt)
