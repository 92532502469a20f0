"""Parameter sweeps over library size, coverage range, cache size and request load."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from functools import lru_cache

import numpy as np

from .geometry import build_grid, estimate_gamma
from .model import CoverageProfile, Kind, Placement, PopularityProfile, ScenarioSpec, zipf_popularity
from .optimizer import SolveResult, backhaul_rate, quantize, scenario_bounds, solve_placement
from .secrecy import check_s1_worstcase, check_s2, max_cache_size_s2, min_cache_size_s1
from .simulate import SimConfig, SimReport, simulate_delivery

SWEEP_HEADER = ("sweep_value", "scenario", "rate", "feasible", "extra")
PLACEMENT_HEADER = ("file", "p", "l", "u", "q", "m", "rate")


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


class Sweep(str, enum.Enum):
    LIBRARY_SIZE = "LibrarySize"
    COVERAGE_RANGE = "CoverageRange"
    CACHE_SIZE = "CacheSize"
    MIN_CACHE_VS_Q = "MinCacheVsQ"


# swept parameter and its default grid (design choices, not published values)
SWEEP_PARAM = {
    Sweep.LIBRARY_SIZE: "N",
    Sweep.COVERAGE_RANGE: "r",
    Sweep.CACHE_SIZE: "M",
    Sweep.MIN_CACHE_VS_Q: "Q",
}
DEFAULT_GRID = {
    Sweep.LIBRARY_SIZE: list(range(50, 501, 25)),
    Sweep.COVERAGE_RANGE: [float(r) for r in range(43, 61)],
    Sweep.CACHE_SIZE: [float(m) for m in range(0, 61, 2)],
    Sweep.MIN_CACHE_VS_Q: list(range(50, 1001, 50)),
}


@dataclass(frozen=True)
class ExperimentConfig:
    sweep: Sweep = Sweep.CACHE_SIZE
    N: int = 200
    M: float = 20.0
    Q: int = 100
    alpha: float = 0.7
    r: float = 60.0
    spacing: float = 60.0
    D: float = 500.0
    rho: float = 0.05
    n: int = 1000
    samples: int = 200_000
    seed: int = 1
    grid: tuple = ()
    scenarios: tuple = ("NoSecrecy", "S1", "S2")
    epsilon_sec: float = 1e-9
    simulate: bool = False
    requests: int = 100_000
    request_mode: str = "Expected"
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "sweep", Sweep(self.sweep))
        except ValueError:
            raise ConfigError(f"field 'sweep': unknown sweep {self.sweep!r}") from None
        object.__setattr__(self, "grid", tuple(self.grid) or tuple(DEFAULT_GRID[self.sweep]))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        for name in ("N", "Q", "n", "samples", "requests", "workers"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"field {name!r}: expected a positive integer, got {v!r}")
        for name in ("alpha", "r", "spacing", "D", "rho", "epsilon_sec"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                if not (name == "alpha" and v == 0):
                    raise ConfigError(f"field {name!r}: expected a positive number, got {v!r}")
        if isinstance(self.M, bool) or not isinstance(self.M, (int, float)) or self.M < 0:
            raise ConfigError(f"field 'M': expected a non-negative number, got {self.M!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"field 'seed': expected a non-negative integer, got {self.seed!r}")
        if not self.scenarios:
            raise ConfigError("field 'scenarios': must name at least one scenario")
        for s in self.scenarios:
            if s not in {k.value for k in Kind}:
                raise ConfigError(f"field 'scenarios': unknown scenario {s!r}")
        if self.request_mode not in ("Expected", "Stochastic"):
            raise ConfigError(f"field 'request_mode': unknown mode {self.request_mode!r}")
        if self.sweep is Sweep.MIN_CACHE_VS_Q and "S1" not in self.scenarios:
            raise ConfigError("field 'scenarios': MinCacheVsQ needs S1")
        param = SWEEP_PARAM[self.sweep]
        for v in self.grid:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"field 'grid': {v!r} is not a number")
            if param in ("N", "Q") and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"field 'grid': {param} values must be positive integers, got {v!r}")
            if (param == "r" and v <= 0) or (param == "M" and v < 0):
                raise ConfigError(f"field 'grid': {v!r} is out of range for {param}")

    def at(self, value) -> "ExperimentConfig":
        """The single-point config with the swept parameter set to ``value``."""
        return replace(self, **{SWEEP_PARAM[self.sweep]: value, "grid": (value,)})

    def scenario(self, name: str) -> ScenarioSpec:
        kind = Kind(name)
        if kind is Kind.S1:
            return ScenarioSpec.s1(self.Q, self.epsilon_sec)
        return ScenarioSpec(kind, epsilon_sec=self.epsilon_sec)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sweep"] = self.sweep.value
        d["grid"] = list(self.grid)
        d["scenarios"] = list(self.scenarios)
        return d


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Build a config from a JSON object; missing keys take the baseline defaults."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), **overrides)


@lru_cache(maxsize=256)
def coverage_for(spacing: float, r: float, samples: int, seed: int) -> CoverageProfile:
    return estimate_gamma(build_grid(spacing=spacing, r=r), samples=samples, seed=seed)


def point_inputs(cfg: ExperimentConfig) -> tuple[PopularityProfile, CoverageProfile]:
    return zipf_popularity(cfg.N, cfg.alpha), coverage_for(float(cfg.spacing), float(cfg.r), cfg.samples, cfg.seed)


def solve_point(cfg: ExperimentConfig, name: str) -> tuple[SolveResult, PopularityProfile, CoverageProfile]:
    p, gamma = point_inputs(cfg)
    bounds = scenario_bounds(cfg.scenario(name), p, gamma.S)
    return solve_placement(p, gamma, float(cfg.M), bounds, n=cfg.n), p, gamma


def quantize_result(result: SolveResult, cfg: ExperimentConfig, p, gamma) -> Placement:
    """Packet counts for a solved point; infeasible points are rounded without secrecy."""
    scenario = result.bounds.scenario
    if not result.feasible:
        scenario = ScenarioSpec.no_secrecy()
    n_sbs = build_grid(D=cfg.D, spacing=cfg.spacing, r=cfg.r, rho=cfg.rho).N_SBS
    return quantize(result.placement, cfg.n, scenario, p=p, S=gamma.S, n_sbs=n_sbs)


def _verify(result: SolveResult, p, gamma, scenario: ScenarioSpec) -> None:
    if not result.feasible:
        return
    if scenario.kind is Kind.S1:
        report = check_s1_worstcase(result.q, p, scenario.Q)
    elif scenario.kind is Kind.S2:
        report = check_s2(result.q, gamma.S)
    else:
        return
    if not report.secure:
        raise InvariantViolation(
            f"{scenario.name} placement marked feasible leaks files {report.binding_files[:5]}"
        )


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _point_rows(cfg: ExperimentConfig, value) -> list[tuple]:
    point = cfg.at(value)
    p, gamma = point_inputs(point)
    rows = []
    for name in cfg.scenarios:
        if cfg.sweep is Sweep.MIN_CACHE_VS_Q and name != "S1":
            continue
        res, _, _ = solve_point(point, name)
        _verify(res, p, gamma, res.bounds.scenario)
        extra = {"budget": res.active_budget}
        if name == "S1":
            extra["m_min"] = min_cache_size_s1(p, point.Q)
        elif name == "S2":
            extra["m_max"] = max_cache_size_s2(p.N, gamma.S)
        if cfg.simulate:
            placement = quantize_result(res, point, p, gamma)
            sim = simulate_delivery(
                placement,
                p,
                gamma,
                SimConfig(point.requests, point.seed, point.request_mode, point.n, point.Q),
            )
            extra["sim_rate"] = sim.empirical_rate
            extra["sim_stderr"] = sim.stderr
            extra["s1_breach"] = sim.s1_breach
            extra["s2_breach"] = sim.s2_breach
        rows.append(
            (
                _fmt(value),
                name,
                _fmt(res.rate),
                _fmt(res.feasible),
                ";".join(f"{k}={_fmt(v)}" for k, v in extra.items()),
            )
        )
    return rows


def run_sweep(cfg: ExperimentConfig) -> list[tuple]:
    """One row per (grid value, scenario), in grid order."""
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            chunks = list(ex.map(lambda v: _point_rows(cfg, v), cfg.grid))
    else:
        chunks = [_point_rows(cfg, v) for v in cfg.grid]
    return [row for chunk in chunks for row in chunk]


def emit_placement(cfg: ExperimentConfig, name: str) -> list[tuple]:
    """Per-file table (file, p, l, u, q, m, rate contribution) at the config's base point."""
    res, p, gamma = solve_point(cfg, name)
    _verify(res, p, gamma, res.bounds.scenario)
    placement = quantize_result(res, cfg, p, gamma)
    rows = []
    for j in range(p.N):
        rows.append(
            (
                j + 1,
                _fmt(p.p[j]),
                _fmt(res.bounds.l[j]),
                _fmt(res.bounds.u[j]),
                _fmt(res.q[j]),
                int(placement.m[j]),
                _fmt(res.per_file_rate[j]),
            )
        )
    return rows


def read_placement(text: str, cfg: ExperimentConfig) -> Placement:
    """Rebuild a quantized placement from a table written by emit_placement."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"q", "m"} <= set(reader.fieldnames):
        raise ConfigError("placement CSV needs at least the columns q and m")
    rows = list(reader)
    try:
        q = [float(r["q"]) for r in rows]
        m = [int(r["m"]) for r in rows]
    except ValueError as exc:
        raise ConfigError(f"placement CSV: {exc}") from None
    return Placement(q, M=cfg.M, n=cfg.n, m=m)


def to_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def simulate_point(cfg: ExperimentConfig, name: str, placement: Placement | None = None) -> tuple[SimReport, float]:
    """Simulate the delivery phase at the base point; returns the report and the analytic rate."""
    if placement is None:
        res, p, gamma = solve_point(cfg, name)
        placement = quantize_result(res, cfg, p, gamma)
    else:
        p, gamma = point_inputs(cfg)
        if placement.q.size != p.N:
            raise ConfigError(f"placement has {placement.q.size} files but the config has N={p.N}")
    sim = simulate_delivery(
        placement, p, gamma, SimConfig(cfg.requests, cfg.seed, cfg.request_mode, cfg.n, cfg.Q)
    )
    return sim, backhaul_rate(placement.q_packets, p, gamma)
