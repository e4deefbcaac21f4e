"""JSON experiment config: agents, GPU, workload generator spec, policy."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources

from . import workload as wl
from .allocator import PolicyId
from .domain import AgentSpec, ConfigError, GpuSpec, WorkloadTrace, validate_system
from .engine import DEFAULT_LATENCY_FLOOR, SimConfig

WORKLOAD_KINDS = ("constant", "poisson", "spike", "skew")
_AGENT_FIELDS = ("id", "name", "model_size_mb", "base_throughput_rps", "min_gpu_fraction", "priority")
_GPU_FIELDS = ("price_per_hour_usd", "memory_mb", "total_capacity")
_TOP_FIELDS = ("duration_steps", "timestep_seconds", "gpu", "agents", "workload", "policy",
               "latency_floor_fraction")


@dataclass(frozen=True)
class ExperimentConfig:
    duration_steps: int
    timestep_seconds: float
    gpu: GpuSpec
    agents: tuple
    workload: dict = field(hash=False)
    policy: str = "adaptive"
    latency_floor_fraction: float = DEFAULT_LATENCY_FLOOR

    @property
    def seed(self) -> int:
        return int(self.workload.get("seed", 0))

    @property
    def base_rates(self):
        return self.workload["rates_rps"]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, workload={**self.workload, "seed": int(seed)})

    def trace(self) -> WorkloadTrace:
        w = self.workload
        kind = w["kind"]
        d, dt = self.duration_steps, self.timestep_seconds
        if kind == "constant":
            return wl.constant_trace(w["rates_rps"], d, dt)
        if kind == "poisson":
            return wl.poisson_trace(w["rates_rps"], d, dt, self.seed)
        if kind == "spike":
            s = w.get("spike", {})
            return wl.spike_trace(w["rates_rps"], d, dt, s.get("agent", "all"), s.get("factor", 10.0),
                                  s.get("window"))
        if kind == "skew":
            s = w.get("skew", {})
            return wl.skew_trace(s.get("total_rate", sum(w["rates_rps"])), s.get("dominant_agent", 0),
                                 s.get("dominant_share", 0.9), len(self.agents), d, dt)
        raise ConfigError(f"workload.kind: unknown kind {kind!r}; valid: {', '.join(WORKLOAD_KINDS)}")

    def sim_config(self, policy=None, trace: WorkloadTrace | None = None) -> SimConfig:
        return SimConfig(self.agents, self.gpu, trace if trace is not None else self.trace(),
                         policy or self.policy, self.latency_floor_fraction, self.seed)

    def to_dict(self) -> dict:
        return {
            "duration_steps": self.duration_steps,
            "timestep_seconds": self.timestep_seconds,
            "gpu": {k: getattr(self.gpu, k) for k in _GPU_FIELDS},
            "agents": [{k: getattr(a, k) for k in _AGENT_FIELDS} for a in self.agents],
            "workload": self.workload,
            "policy": self.policy,
            "latency_floor_fraction": self.latency_floor_fraction,
        }


def _require(d, key, where, types):
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing required field" if where else f"{key}: missing required field")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, types):
        name = f"{where}.{key}" if where else key
        raise ConfigError(f"{name}: expected {' or '.join(t.__name__ for t in types)}, got {v!r}")
    return v


def _unknown(d, allowed, where):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{where or 'config'}: unknown field(s) {extra}")


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config: top level must be a JSON object")
    _unknown(d, _TOP_FIELDS, "")
    num = (int, float)
    duration = _require(d, "duration_steps", "", (int,))
    if duration < 1:
        raise ConfigError(f"duration_steps: must be >= 1, got {duration}")
    dt = _require(d, "timestep_seconds", "", num)
    g = _require(d, "gpu", "", (dict,))
    _unknown(g, _GPU_FIELDS, "gpu")
    gpu = GpuSpec(**{k: _require(g, k, "gpu", num) for k in _GPU_FIELDS})
    agents = []
    for j, a in enumerate(_require(d, "agents", "", (list,))):
        where = f"agents[{j}]"
        if not isinstance(a, dict):
            raise ConfigError(f"{where}: expected object")
        _unknown(a, _AGENT_FIELDS, where)
        agents.append(AgentSpec(
            id=_require(a, "id", where, (int,)),
            name=_require(a, "name", where, (str,)),
            model_size_mb=_require(a, "model_size_mb", where, num),
            base_throughput_rps=_require(a, "base_throughput_rps", where, num),
            min_gpu_fraction=_require(a, "min_gpu_fraction", where, num),
            priority=_require(a, "priority", where, (int,)),
        ))
    validate_system(agents, gpu).raise_if_invalid()
    w = _require(d, "workload", "", (dict,))
    _unknown(w, ("kind", "rates_rps", "seed", "spike", "skew"), "workload")
    kind = _require(w, "kind", "workload", (str,))
    if kind not in WORKLOAD_KINDS:
        raise ConfigError(f"workload.kind: unknown kind {kind!r}; valid: {', '.join(WORKLOAD_KINDS)}")
    rates = _require(w, "rates_rps", "workload", (list,))
    if len(rates) != len(agents):
        raise ConfigError(f"workload.rates_rps: {len(rates)} rates for {len(agents)} agents")
    policy = d.get("policy", "adaptive")
    try:
        PolicyId.parse(policy)
    except ValueError as exc:
        raise ConfigError(f"policy: {exc}") from None
    floor = d.get("latency_floor_fraction", DEFAULT_LATENCY_FLOOR)
    cfg = ExperimentConfig(duration, dt, gpu, tuple(agents), w, policy, floor)
    cfg.sim_config()  # builds the trace and checks the remaining invariants
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(raw)
    except (ConfigError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def save_config(cfg: ExperimentConfig, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(dump_config(cfg))


def bundled_config_path(name: str = "paper.json"):
    return resources.files("gpuslice") / "data" / name
