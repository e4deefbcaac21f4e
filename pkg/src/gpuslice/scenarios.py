"""Stress scenarios run under the adaptive policy: overload, spike, skew."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import workload as wl
from .config import ExperimentConfig
from .engine import RunResult, simulate

SCENARIOS = ("overload3x", "spike10x", "skew90")

# Published overload latency degradation (percent); shown for reference only.
REFERENCE_OVERLOAD_DEGRADATION_PCT = 24.0


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    base_avg_latency_s: float
    avg_latency_s: float
    latency_degradation_pct: float
    min_allocation: float
    min_allocation_per_agent: tuple
    max_queue: float
    details: dict


def scenario_trace(name: str, cfg: ExperimentConfig):
    d, dt, rates = cfg.duration_steps, cfg.timestep_seconds, cfg.base_rates
    w = cfg.workload
    if name == "overload3x":
        return wl.spike_trace(rates, d, dt, "all", 3.0, (0, d))
    if name == "spike10x":
        s = w.get("spike", {})
        window = s.get("window") or (wl.DEFAULT_SPIKE_WINDOW if d >= wl.DEFAULT_SPIKE_WINDOW[1]
                                     else (d // 3, max(d // 3 + 1, 2 * d // 3)))
        return wl.spike_trace(rates, d, dt, s.get("agent", 0), s.get("factor", 10.0), window)
    if name == "skew90":
        s = w.get("skew", {})
        return wl.skew_trace(s.get("total_rate", float(sum(rates))), s.get("dominant_agent", len(rates) - 1),
                             s.get("dominant_share", 0.9), len(cfg.agents), d, dt)
    raise ValueError(f"unknown scenario {name!r}; valid: {', '.join(SCENARIOS)}")


def run_scenario(name: str, cfg: ExperimentConfig) -> tuple[ScenarioReport, RunResult]:
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; valid: {', '.join(SCENARIOS)}")
    base = simulate(cfg.sim_config("adaptive", wl.constant_trace(cfg.base_rates, cfg.duration_steps,
                                                                 cfg.timestep_seconds)))
    trace = scenario_trace(name, cfg)
    res = simulate(cfg.sim_config("adaptive", trace))
    b, s = base.summary.avg_latency_s, res.summary.avg_latency_s
    degradation = (s - b) / b * 100.0 if b > 0 else float("nan")
    details = {}
    if name == "overload3x":
        details["reference_degradation_pct"] = REFERENCE_OVERLOAD_DEGRADATION_PCT
    elif name == "spike10x":
        spiked = np.any(trace.rates != trace.rates[0], axis=1)
        idx = np.flatnonzero(spiked)
        start, end = int(idx[0]), int(idx[-1]) + 1
        pre = res.allocation[start - 1] if start > 0 else base.allocation[0]
        if end < trace.duration_steps:
            gap = float(np.max(np.abs(res.allocation[end] - pre)))
            details["reconverged_within_steps"] = 1 if gap <= 1e-12 else None
        else:
            gap = None
        details.update(window=[start, end], post_window_allocation_gap=gap,
                       max_shift_during_spike=float(np.max(np.abs(res.allocation[start:end] - pre))))
    elif name == "skew90":
        dom = int(np.argmax(trace.rates[0]))
        details.update(dominant_agent=dom, dominant_max_allocation=float(res.allocation[:, dom].max()),
                       others_min_allocation=float(np.delete(res.allocation, dom, axis=1).min()))
    per_agent_min = res.allocation.min(axis=0)
    report = ScenarioReport(name, b, s, degradation, float(per_agent_min.min()),
                            tuple(float(x) for x in per_agent_min), float(res.queue.max()), details)
    return report, res
