"""Command-line front end: gen-trace, run-session, run-experiment, verify."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import MpathError, ParameterError
from .experiment import ExperimentConfig, cell_trace, default_jobs, run_experiment, write_outputs
from .mobility import read_trace
from .oracle import run_exhaustive_suite, run_random_suite
from .routing import Strategy
from .session import SessionConfig, session_metrics, simulate_session

IO_EXIT = 7
VERIFY_FAILED = 1

# grid defaults; every flag falls back here after the config file
DEFAULTS = {
    "width": None,  # None = both default geometries
    "height": None,
    "nodes": "50,100,150",
    "vmax": "10,30,50",
    "duration": 1000.0,
    "sampling": 0.25,
    "range": 250.0,
    "traces": 10,
    "pairs": 15,
    "strategy": "all",
    "seed": 1,
    "out_dir": "results",
    "jobs": None,  # None = all CPUs
}
DEFAULT_GEOMETRIES = ((1000.0, 1000.0), (2000.0, 500.0))

_CASTS = {
    "width": float, "height": float, "duration": float, "sampling": float, "range": float,
    "traces": int, "pairs": int, "seed": int, "jobs": int,
    "nodes": str, "vmax": str, "strategy": str, "out_dir": str,
}


def read_config(path) -> dict:
    """Plain ``key=value`` lines; keys are flag names with or without dashes."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in _CASTS:
            raise ParameterError(f"{path}:{lineno}: unknown or malformed setting {raw!r}")
        try:
            out[key] = _CASTS[key](value.strip())
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config file over built-in defaults."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _floats(text) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ParameterError(f"expected comma-separated integers, got {text!r}") from None


def _strategies(text: str) -> tuple[Strategy, ...]:
    if text == "all":
        return tuple(Strategy)
    return tuple(Strategy.parse(x.strip()) for x in text.split(","))


def _geometries(opts) -> tuple[tuple[float, float], ...]:
    w, h = opts["width"], opts["height"]
    if w is None and h is None:
        return DEFAULT_GEOMETRIES
    if w is None or h is None:
        raise ParameterError("--width and --height must be given together")
    return ((float(w), float(h)),)


def experiment_config(opts: dict, trace_dir: Optional[str] = None, revisit: bool = False) -> ExperimentConfig:
    return ExperimentConfig(
        geometries=_geometries(opts),
        node_counts=_ints(opts["nodes"]),
        v_max=_floats(opts["vmax"]),
        strategies=_strategies(opts["strategy"]),
        trace_count=int(opts["traces"]),
        pair_count=int(opts["pairs"]),
        duration=float(opts["duration"]),
        sampling_interval=float(opts["sampling"]),
        range=float(opts["range"]),
        base_seed=int(opts["seed"]),
        revisit=revisit,
        trace_dir=trace_dir,
    )


def _add_grid_flags(p: argparse.ArgumentParser, *, single_cell: bool = False):
    d = DEFAULTS
    p.add_argument("--width", type=float, help="area width in m (default: 1000 and 2000, the two default geometries)")
    p.add_argument("--height", type=float, help="area height in m (default: 1000 and 500)")
    p.add_argument("--nodes", help=f"node count{'' if single_cell else 's, comma-separated'} (default: {d['nodes']})")
    p.add_argument("--vmax", help=f"maximum node speed(s) in m/s (default: {d['vmax']})")
    p.add_argument("--duration", type=float, help=f"simulation time in s (default: {d['duration']:g})")
    p.add_argument("--traces", type=int, help=f"mobility traces per cell (default: {d['traces']})")
    p.add_argument("--seed", type=int, help=f"base random seed (default: {d['seed']})")
    p.add_argument("--out-dir", dest="out_dir", help=f"output directory (default: {d['out_dir']})")
    p.add_argument("--config", help="key=value file; flags override it, it overrides the defaults")


def build_parser() -> argparse.ArgumentParser:
    d = DEFAULTS
    parser = argparse.ArgumentParser(prog="manet-mpath", description="Disjoint multi-path routing experiments on Random Waypoint traces.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-trace", help="write Random Waypoint trace files")
    _add_grid_flags(g)

    r = sub.add_parser("run-session", help="simulate one source-destination session on a trace file")
    r.add_argument("--trace", required=True, help="trace file written by gen-trace")
    r.add_argument("--source", type=int, required=True)
    r.add_argument("--destination", type=int, required=True)
    r.add_argument("--strategy", help=f"single|link|node|zone|all (default: {d['strategy']})")
    r.add_argument("--start", type=float, default=1.0, help="session start in s (default: 1)")
    r.add_argument("--end", type=float, help="session end in s (default: trace duration)")
    r.add_argument("--sampling", type=float, help=f"topology sampling interval in s (default: {d['sampling']})")
    r.add_argument("--range", type=float, help=f"transmission range in m (default: {d['range']:g})")
    r.add_argument("--config", help="key=value file; flags override it, it overrides the defaults")

    e = sub.add_parser("run-experiment", help="run the experiment grid and write CSV results")
    _add_grid_flags(e)
    e.add_argument("--sampling", type=float, help=f"topology sampling interval in s (default: {d['sampling']})")
    e.add_argument("--range", type=float, help=f"transmission range in m (default: {d['range']:g})")
    e.add_argument("--pairs", type=int, help=f"source-destination pairs per trace (default: {d['pairs']})")
    e.add_argument("--strategy", help=f"single|link|node|zone|all, comma-separated (default: {d['strategy']})")
    e.add_argument("--jobs", type=int, help="worker processes (default: all CPUs)")
    e.add_argument("--trace-dir", help="load traces from here, generating and storing missing ones")
    e.add_argument("--sessions", action="store_true", help="also write per-session sessions.csv")
    e.add_argument("--revisit", action="store_true", help="let a session re-adopt earlier paths of its set after a break")

    v = sub.add_parser("verify", help="brute-force oracle checks of the routing algorithms")
    v.add_argument("--max-nodes", type=int, default=7, help="largest random graph (default: 7)")
    v.add_argument("--samples", type=int, default=500, help="random graphs to check (default: 500)")
    v.add_argument("--seed", type=int, default=0, help="graph sampler seed (default: 0)")
    v.add_argument("--exhaustive", type=int, default=4, help="also check every graph on this many nodes, 0 to skip (default: 4)")
    return parser


def cmd_gen_trace(args) -> int:
    opts = resolve(args)
    config = experiment_config(opts, trace_dir=opts["out_dir"])
    print(f"# base_seed={config.base_seed}")
    for cell in config.cells():
        for i in range(config.trace_count):
            trace = cell_trace(config, cell, i)
            w, h, n, vmax = cell
            print(f"trace {w:g}x{h:g} n={n} vmax={vmax:g} #{i} seed={trace.params.seed}")
    return 0


def cmd_run_session(args) -> int:
    opts = resolve(args)
    trace = read_trace(args.trace)
    end = trace.duration if args.end is None else args.end
    print(f"# trace={args.trace} seed={trace.params.seed}")
    print("strategy,discoveries,failed_discoveries,paths_per_set,time_between_discoveries,hop_count")
    for strategy in _strategies(opts["strategy"]):
        cfg = SessionConfig(args.source, args.destination, strategy, args.start, end, float(opts["sampling"]), float(opts["range"]))
        rec = simulate_session(trace, cfg)
        m = session_metrics(rec)
        failed = sum(1 for e in rec.discoveries if e.failed)
        vals = ",".join("undefined" if m[k] is None else f"{m[k]:.6f}" for k in ("paths_per_set", "time_between_discoveries", "hop_count"))
        print(f"{strategy.value},{len(rec.discoveries) - failed},{failed},{vals}")
    return 0


def cmd_run_experiment(args) -> int:
    opts = resolve(args)
    config = experiment_config(opts, trace_dir=args.trace_dir, revisit=args.revisit)
    jobs = opts["jobs"] or default_jobs()
    print(f"# base_seed={config.base_seed} cells={len(config.cells())} strategies={len(config.strategies)} jobs={jobs}")
    result = run_experiment(config, jobs=jobs)
    for path in write_outputs(result, opts["out_dir"], sessions=args.sessions):
        print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    report = run_random_suite(args.samples, args.max_nodes, args.seed)
    print(f"random graphs (<= {args.max_nodes} nodes): {report.checked} checked, {len(report.failures)} failures")
    ok = report.ok
    if args.exhaustive:
        full = run_exhaustive_suite(args.exhaustive)
        print(f"all graphs on {args.exhaustive} nodes: {full.checked} instances, {len(full.failures)} failures")
        report.failures += full.failures
        ok = ok and full.ok
    for line in report.failures[:20]:
        print(f"FAIL {line}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else VERIFY_FAILED


COMMANDS = {"gen-trace": cmd_gen_trace, "run-session": cmd_run_session, "run-experiment": cmd_run_experiment, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except MpathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_EXIT


if __name__ == "__main__":
    sys.exit(main())
