"""Experiment grid: traces x pairs x strategies per cell, aggregation and CSV output."""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ParameterError
from .mobility import MobilityTrace, RwpParams, generate_trace, read_trace, write_trace
from .routing import Strategy
from .session import SessionConfig, TraceTimeline, session_metrics, simulate_session

log = logging.getLogger(__name__)

METRICS = ("paths_per_set", "time_between_discoveries", "hop_count")
FIGURE_FILES = {"paths_per_set": "fig_paths.csv", "time_between_discoveries": "fig_lifetime.csv", "hop_count": "fig_hops.csv"}
RESULT_COLUMNS = ("geometry_w", "geometry_h", "nodes", "v_max", "strategy", "metric", "mean", "stddev", "n", "excluded")
SESSION_COLUMNS = (
    "geometry_w", "geometry_h", "nodes", "v_max", "trace", "pair", "source", "destination",
    "start_time", "strategy", "discoveries", "failed_discoveries", *METRICS,
)


@dataclass(frozen=True)
class ExperimentConfig:
    geometries: tuple[tuple[float, float], ...] = ((1000.0, 1000.0), (2000.0, 500.0))
    node_counts: tuple[int, ...] = (50, 100, 150)
    v_max: tuple[float, ...] = (10.0, 30.0, 50.0)
    strategies: tuple[Strategy, ...] = tuple(Strategy)
    trace_count: int = 10
    pair_count: int = 15
    duration: float = 1000.0
    sampling_interval: float = 0.25
    range: float = 250.0
    base_seed: int = 1
    v_min: float = 0.0
    pause: float = 0.0
    start_window: tuple[float, float] = (1.0, 10.0)
    revisit: bool = False
    trace_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "geometries", tuple((float(w), float(h)) for w, h in self.geometries))
        object.__setattr__(self, "node_counts", tuple(int(n) for n in self.node_counts))
        object.__setattr__(self, "v_max", tuple(float(v) for v in self.v_max))
        object.__setattr__(self, "strategies", tuple(Strategy.parse(s) if isinstance(s, str) else s for s in self.strategies))
        if not (self.geometries and self.node_counts and self.v_max and self.strategies):
            raise ParameterError("every grid axis needs at least one value")
        if self.trace_count < 1 or self.pair_count < 1:
            raise ParameterError("trace_count and pair_count must be positive")
        if any(n < 2 for n in self.node_counts):
            raise ParameterError("node counts must be >= 2")
        if self.sampling_interval <= 0 or self.range <= 0 or self.duration <= 0:
            raise ParameterError("duration, sampling_interval and range must be positive")
        lo, hi = self.start_window
        if not (0 <= lo <= hi < self.duration):
            raise ParameterError(f"start window {self.start_window} must lie inside [0, duration)")

    def cells(self) -> list[tuple[float, float, int, float]]:
        return [(w, h, n, v) for (w, h) in self.geometries for n in self.node_counts for v in self.v_max]


def _seed_key(cell: tuple[float, float, int, float], trace_index: int) -> list[int]:
    w, h, n, v = cell
    return [round(w * 1000), round(h * 1000), n, round(v * 1000), trace_index]


def trace_seed(base_seed: int, cell, trace_index: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=_seed_key(cell, trace_index) + [0])
    return int(ss.generate_state(1, np.uint64)[0])


def draw_pairs(config: ExperimentConfig, cell, trace_index: int) -> list[tuple[int, int, float]]:
    """Distinct ordered (source, destination, start_time) triples for one trace."""
    n = cell[2]
    if config.pair_count > n * (n - 1):
        raise ParameterError(f"cannot draw {config.pair_count} distinct pairs from {n} nodes")
    rng = np.random.default_rng(np.random.SeedSequence(config.base_seed, spawn_key=_seed_key(cell, trace_index) + [1]))
    lo, hi = config.start_window
    seen, out = set(), []
    while len(out) < config.pair_count:
        s, d = (int(x) for x in rng.choice(n, size=2, replace=False))
        start = float(rng.uniform(lo, hi))
        if (s, d) in seen:
            continue
        seen.add((s, d))
        out.append((s, d, start))
    return out


def cell_trace(config: ExperimentConfig, cell, trace_index: int) -> MobilityTrace:
    w, h, n, v = cell
    params = RwpParams(
        width=w, height=h, node_count=n, v_max=v, duration=config.duration,
        v_min=config.v_min, pause=config.pause, seed=trace_seed(config.base_seed, cell, trace_index),
    )
    if config.trace_dir is None:
        return generate_trace(params)
    path = Path(config.trace_dir) / f"trace_{w:g}x{h:g}_n{n}_v{v:g}_{trace_index:03d}.txt"
    if path.exists():
        trace = read_trace(path)
        if trace.params != params:
            raise ParameterError(f"{path} was generated with different parameters")
        return trace
    trace = generate_trace(params)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_trace(trace, path)
    return trace


@dataclass(frozen=True)
class SessionRow:
    cell: tuple[float, float, int, float]
    trace: int
    pair: int
    source: int
    destination: int
    start_time: float
    strategy: Strategy
    discoveries: int
    failed_discoveries: int
    metrics: dict


def _run_unit(args) -> list[SessionRow]:
    config, cell, trace_index, provider = args
    trace = (provider or cell_trace)(config, cell, trace_index)
    rows = []
    for pair_index, (s, d, start) in enumerate(draw_pairs(config, cell, trace_index)):
        base = SessionConfig(s, d, config.strategies[0], start, config.duration, config.sampling_interval, config.range, config.revisit)
        # every strategy replays the same sampled positions
        timeline = TraceTimeline.for_session(trace, base)
        for strategy in config.strategies:
            cfg = SessionConfig(s, d, strategy, start, config.duration, config.sampling_interval, config.range, config.revisit)
            rec = simulate_session(timeline, cfg)
            failed = sum(1 for e in rec.discoveries if e.failed)
            rows.append(SessionRow(cell, trace_index, pair_index, s, d, start, strategy,
                                   len(rec.discoveries) - failed, failed, session_metrics(rec)))
    return rows


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    stddev: float
    n: int
    excluded: int

    @classmethod
    def of(cls, values: Sequence[Optional[float]]) -> "MetricSummary":
        vals = [v for v in values if v is not None]
        excluded = len(values) - len(vals)
        if not vals:
            return cls(math.nan, math.nan, 0, excluded)
        arr = np.asarray(vals)
        std = float(arr.std(ddof=1)) if len(vals) > 1 else 0.0
        return cls(float(arr.mean()), std, len(vals), excluded)


@dataclass
class AggregateResult:
    config: ExperimentConfig
    # (w, h, nodes, v_max, strategy) -> metric -> summary, in grid order
    cells: dict = field(default_factory=dict)
    sessions: list[SessionRow] = field(default_factory=list)

    def get(self, w, h, nodes, v_max, strategy, metric) -> MetricSummary:
        strategy = Strategy.parse(strategy) if isinstance(strategy, str) else strategy
        return self.cells[(float(w), float(h), int(nodes), float(v_max), strategy)][metric]


def run_experiment(config: ExperimentConfig, jobs: int = 1, trace_provider: Optional[Callable] = None) -> AggregateResult:
    """Run every (cell, trace) work unit and average per-session metrics per (cell, strategy).

    ``trace_provider(config, cell, trace_index)`` replaces trace generation; it
    must be picklable when ``jobs > 1``. Output does not depend on ``jobs``.
    """
    units = [(config, cell, i, trace_provider) for cell in config.cells() for i in range(config.trace_count)]
    if jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = []
        for k, unit in enumerate(units):
            chunks.append(_run_unit(unit))
            log.debug("unit %d/%d done", k + 1, len(units))
    rows = [r for chunk in chunks for r in chunk]

    result = AggregateResult(config, sessions=rows)
    for cell in config.cells():
        for strategy in config.strategies:
            sel = [r for r in rows if r.cell == cell and r.strategy is strategy]
            result.cells[(*cell, strategy)] = {m: MetricSummary.of([r.metrics[m] for r in sel]) for m in METRICS}
    return result


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6f}"


def emit_results_csv(result: AggregateResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(RESULT_COLUMNS)
        for (w, h, n, v, strategy), summaries in result.cells.items():
            for metric in METRICS:
                s = summaries[metric]
                out.writerow([f"{w:g}", f"{h:g}", n, f"{v:g}", strategy.value, metric,
                              _fmt(s.mean), _fmt(s.stddev), s.n, s.excluded])
    return path


def emit_figure_series(result: AggregateResult, out_dir) -> list[Path]:
    """One long-format table per metric: metric vs node count, by geometry, v_max and strategy."""
    out_dir = Path(out_dir)
    written = []
    for metric, name in FIGURE_FILES.items():
        path = out_dir / name
        with path.open("w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["geometry", "nodes", "v_max", "strategy", f"mean_{metric}", "stddev", "n"])
            for (w, h, n, v, strategy), summaries in result.cells.items():
                s = summaries[metric]
                out.writerow([f"{w:g}x{h:g}", n, f"{v:g}", strategy.value, _fmt(s.mean), _fmt(s.stddev), s.n])
        written.append(path)
    return written


def emit_sessions_csv(result: AggregateResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SESSION_COLUMNS)
        for r in result.sessions:
            w, h, n, v = r.cell
            vals = ["" if r.metrics[m] is None else f"{r.metrics[m]:.6f}" for m in METRICS]
            out.writerow([f"{w:g}", f"{h:g}", n, f"{v:g}", r.trace, r.pair, r.source, r.destination,
                          f"{r.start_time:.6f}", r.strategy.value, r.discoveries, r.failed_discoveries, *vals])
    return path


def emit_manifest(config: ExperimentConfig, path) -> Path:
    path = Path(path)
    lines = []
    for key, value in asdict(config).items():
        if key == "strategies":
            value = ",".join(s.value for s in config.strategies)
        lines.append(f"{key}={value}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_outputs(result: AggregateResult, out_dir, sessions: bool = False) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [emit_manifest(result.config, out_dir / "manifest.txt"), emit_results_csv(result, out_dir / "results.csv")]
    paths += emit_figure_series(result, out_dir)
    if sessions:
        paths.append(emit_sessions_csv(result, out_dir / "sessions.csv"))
    return paths


def read_results_csv(path) -> dict:
    """Parse results.csv back into {(w, h, nodes, v_max, strategy, metric): MetricSummary}."""
    out = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            key = (float(row["geometry_w"]), float(row["geometry_h"]), int(row["nodes"]), float(row["v_max"]),
                   Strategy.parse(row["strategy"]), row["metric"])
            out[key] = MetricSummary(float(row["mean"]), float(row["stddev"]), int(row["n"]), int(row["excluded"]))
    return out


def default_jobs() -> int:
    return os.cpu_count() or 1
