"""Command-line runner: ``gpuslice {run,compare,scenario,bench}``.

Exit codes: 0 success, 1 usage or config error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import _kernels
from .allocator import PolicyId
from .bench import bench_allocator, loglog_slope
from .config import ConfigError, load_config
from .engine import simulate
from .report import (REFERENCE_ADAPTIVE_LATENCY_S, REFERENCE_RR_LATENCY_S, export_summary_json,
                     export_timeseries, latency_reduction_pct, summarize_comparison, summary_to_dict)
from .scenarios import SCENARIOS, run_scenario

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _policy(name):
    try:
        return PolicyId.parse(name).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(args):
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _outdir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path


def cmd_run(args) -> int:
    cfg = _load(args)
    res = simulate(cfg.sim_config(args.policy))
    s = res.summary
    out = _outdir(args.out)
    if out:
        export_timeseries(res, os.path.join(out, f"timeseries_{s.policy}.csv"))
        export_summary_json(s, os.path.join(out, f"summary_{s.policy}.json"))
    if args.format == "json":
        print(json.dumps(summary_to_dict(s), indent=2))
    elif args.format == "csv":
        print("policy,avg_latency_s,total_throughput_rps,cost_usd")
        print(f"{s.policy},{s.avg_latency_s:.6f},{s.total_throughput_rps:.6f},{s.cost_usd:.6f}")
    else:
        print(f"policy={s.policy} avg_latency_s={s.avg_latency_s:.1f} "
              f"throughput_rps={s.total_throughput_rps:.1f} cost_usd={s.cost_usd:.3f}")
    return EXIT_OK


def cmd_compare(args) -> int:
    policies = args.policies
    if len(policies) < 2:
        raise UsageError("compare needs at least 2 policies")
    if len(set(policies)) != len(policies):
        raise UsageError(f"duplicate policy in list: {policies}")
    cfg = _load(args)
    trace = cfg.trace()  # one shared trace for every policy
    results = [simulate(cfg.sim_config(p, trace)) for p in policies]
    table = summarize_comparison([r.summary for r in results])
    out = _outdir(args.out)
    if out:
        for r in results:
            export_timeseries(r, os.path.join(out, f"timeseries_{r.summary.policy}.csv"))
            export_summary_json(r.summary, os.path.join(out, f"summary_{r.summary.policy}.json"))
        with open(os.path.join(out, "comparison.txt"), "w", newline="\n") as fh:
            fh.write(table.render_text())
        with open(os.path.join(out, "comparison.csv"), "w", newline="\n") as fh:
            fh.write(table.to_csv())
    if args.format == "csv":
        sys.stdout.write(table.to_csv())
    elif args.format == "json":
        print(json.dumps({r.summary.policy: summary_to_dict(r.summary) for r in results}, indent=2))
    else:
        sys.stdout.write(table.render_text())
    red = table.latency_reduction()
    if red is not None:
        ref = latency_reduction_pct(REFERENCE_RR_LATENCY_S, REFERENCE_ADAPTIVE_LATENCY_S)
        print(f"adaptive latency reduction vs round_robin: {red:.1f}% "
              f"(published figures {REFERENCE_RR_LATENCY_S} s -> {REFERENCE_ADAPTIVE_LATENCY_S} s: {ref:.1f}%)")
    return EXIT_OK


def cmd_scenario(args) -> int:
    cfg = _load(args)
    report, res = run_scenario(args.name, cfg)
    out = _outdir(args.out)
    payload = dataclasses.asdict(report)
    if out:
        export_timeseries(res, os.path.join(out, f"timeseries_{args.name}.csv"))
        with open(os.path.join(out, f"scenario_{args.name}.json"), "w", newline="\n") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"scenario={report.name} base_latency_s={report.base_avg_latency_s:.1f} "
              f"latency_s={report.avg_latency_s:.1f} degradation_pct={report.latency_degradation_pct:.1f} "
              f"min_allocation={report.min_allocation:.5f} max_queue={report.max_queue:.1f}")
        for k, v in report.details.items():
            print(f"  {k}: {v}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if any(n < 1 for n in args.counts):
        raise UsageError("agent counts must be >= 1")
    if args.repetitions < 1:
        raise UsageError("repetitions must be >= 1")
    rows = bench_allocator(args.counts, args.repetitions, seed=args.seed or 0)
    print(f"backend={_kernels.backend()}")
    print(f"{'N':>8}  {'median_us':>10}  {'p99_us':>10}  {'kernel_us':>10}")
    for r in rows:
        k = f"{r.kernel_s * 1e6:10.3f}" if r.kernel_s is not None else f"{'-':>10}"
        print(f"{r.n_agents:>8}  {r.median_s * 1e6:10.3f}  {r.p99_s * 1e6:10.3f}  {k}")
    if len(rows) >= 2:
        ns = [r.n_agents for r in rows]
        print(f"loglog_slope_per_call={loglog_slope(ns, [r.median_s for r in rows]):.3f}")
        if all(r.kernel_s is not None for r in rows):
            print(f"loglog_slope_kernel={loglog_slope(ns, [r.kernel_s for r in rows]):.3f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpuslice", description="Multi-agent GPU-share allocation simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, policy=True):
        sp.add_argument("config", help="experiment config JSON")
        sp.add_argument("--out", help="directory for CSV/JSON artifacts")
        sp.add_argument("--seed", type=int, help="override workload seed")
        sp.add_argument("--format", choices=("text", "csv", "json"), default="text")

    sp = sub.add_parser("run", help="simulate one policy")
    common(sp)
    sp.add_argument("--policy", type=_policy, help="override the config's policy")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("compare", help="run several policies on one trace")
    common(sp)
    sp.add_argument("--policy", "--policies", dest="policies", nargs="+", type=_policy,
                    default=[p.value for p in (PolicyId.STATIC_EQUAL, PolicyId.ROUND_ROBIN, PolicyId.ADAPTIVE)])
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("scenario", help="stress scenario under the adaptive policy")
    sp.add_argument("name", choices=SCENARIOS)
    common(sp)
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("bench", help="time the adaptive allocator")
    sp.add_argument("--counts", type=int, nargs="+", default=[4, 100, 1000, 10000, 100000])
    sp.add_argument("--repetitions", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"gpuslice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - surface as runtime failure
        print(f"gpuslice: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
