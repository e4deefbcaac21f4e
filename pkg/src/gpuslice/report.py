"""CSV/JSON export and multi-policy comparison tables.

Values stay at full precision in every exported object; rounding happens only
when a table is rendered.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from dataclasses import dataclass

import numpy as np

from .engine import RunResult, RunSummary, TimestepRecord

TIMESERIES_HEADER = ["step", "agent_id", "allocation", "arrivals", "served", "queue", "latency_s"]

# Reference round-robin and adaptive average latencies (seconds) from the
# published comparison, used only for the headline reduction figure.
REFERENCE_RR_LATENCY_S = 756.1
REFERENCE_ADAPTIVE_LATENCY_S = 111.9


class ReportError(RuntimeError):
    pass


def _write_text(destination, text: str):
    """Write all of ``text`` at once so a failure leaves no partial file."""
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write {os.fspath(destination)}: {exc}") from exc


def timeseries_csv(records, agent_ids=None) -> str:
    if isinstance(records, RunResult):
        agent_ids = agent_ids or records.agent_ids
        records = records.records
    records = list(records)
    if not records:
        raise ReportError("no timestep records to export")
    n = len(records[0].allocation)
    ids = list(agent_ids) if agent_ids else list(range(n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMESERIES_HEADER)
    for rec in records:
        for i in range(n):
            w.writerow([rec.step, ids[i]] + [
                f"{float(v[i]):.6f}" for v in (rec.allocation, rec.arrivals, rec.served, rec.queue, rec.latency_s)
            ])
    return buf.getvalue()


def export_timeseries(records, destination, agent_ids=None):
    """One CSV row per (step, agent), ordered by step then agent, 6 decimals."""
    _write_text(destination, timeseries_csv(records, agent_ids))


def read_timeseries(path) -> list[TimestepRecord]:
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TIMESERIES_HEADER:
            raise ReportError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            rows.setdefault(int(rec["step"]), []).append([float(rec[k]) for k in TIMESERIES_HEADER[2:]])
    out = []
    for t in sorted(rows):
        cols = np.array(rows[t]).T
        out.append(TimestepRecord(t, *cols))
    return out


def summary_to_dict(summary: RunSummary) -> dict:
    d = {}
    for f in dataclasses.fields(RunSummary):
        v = getattr(summary, f.name)
        d[f.name] = list(v) if isinstance(v, tuple) else v
    return d


def summary_from_dict(d: dict) -> RunSummary:
    names = [f.name for f in dataclasses.fields(RunSummary)]
    missing = [k for k in names if k not in d]
    if missing:
        raise ReportError(f"summary JSON is missing fields: {missing}")
    kw = {k: tuple(d[k]) if isinstance(d[k], list) else d[k] for k in names}
    return RunSummary(**kw)


def export_summary_json(summary: RunSummary, destination):
    _write_text(destination, json.dumps(summary_to_dict(summary), indent=2) + "\n")


def load_summary_json(path) -> RunSummary:
    with open(path) as fh:
        return summary_from_dict(json.load(fh))


def latency_std_s(summary: RunSummary) -> float:
    """Population std-dev across per-agent average latencies."""
    return float(np.std(np.asarray(summary.per_agent_avg_latency_s)))


def latency_reduction_pct(baseline_latency: float, latency: float) -> float:
    return (baseline_latency - latency) / baseline_latency * 100.0


@dataclass(frozen=True)
class ComparisonTable:
    policies: tuple
    avg_latency_s: tuple
    total_throughput_rps: tuple
    cost_usd: tuple
    latency_std_s: tuple

    ROWS = (
        ("Avg Latency (s)", "avg_latency_s", "{:.1f}"),
        ("Total Throughput (rps)", "total_throughput_rps", "{:.1f}"),
        ("Cost (USD)", "cost_usd", "{:.3f}"),
        ("Latency Std Dev (s)", "latency_std_s", "{:.1f}"),
    )

    def column(self, policy) -> dict:
        j = self.policies.index(policy)
        return {attr: getattr(self, attr)[j] for _, attr, _ in self.ROWS}

    def latency_reduction(self, baseline="round_robin", policy="adaptive"):
        """Percent latency reduction of ``policy`` vs ``baseline``; None unless both ran."""
        if baseline not in self.policies or policy not in self.policies:
            return None
        return latency_reduction_pct(self.column(baseline)["avg_latency_s"], self.column(policy)["avg_latency_s"])

    def _cells(self):
        out = []
        for label, attr, fmt in self.ROWS:
            out.append([label] + [fmt.format(v) for v in getattr(self, attr)])
        return out

    def render_text(self) -> str:
        header = ["Metric"] + list(self.policies)
        rows = [header] + self._cells()
        widths = [max(len(r[j]) for r in rows) for j in range(len(header))]
        lines = []
        for k, r in enumerate(rows):
            lines.append("  ".join(c.ljust(widths[0]) if j == 0 else c.rjust(widths[j]) for j, c in enumerate(r)))
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric"] + list(self.policies))
        for row in self._cells():
            w.writerow(row)
        return buf.getvalue()


def summarize_comparison(summaries) -> ComparisonTable:
    """Table II-shaped comparison; columns follow input order."""
    summaries = list(summaries)
    if not summaries:
        raise ReportError("need at least one run summary")
    policies = tuple(s.policy for s in summaries)
    if len(set(policies)) != len(policies):
        raise ReportError(f"duplicate policy columns: {list(policies)}")
    return ComparisonTable(
        policies=policies,
        avg_latency_s=tuple(s.avg_latency_s for s in summaries),
        total_throughput_rps=tuple(s.total_throughput_rps for s in summaries),
        cost_usd=tuple(s.cost_usd for s in summaries),
        latency_std_s=tuple(latency_std_s(s) for s in summaries),
    )
