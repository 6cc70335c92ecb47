import csv

import pytest

from manet_mpath.errors import ParameterError
from manet_mpath.experiment import (
    METRICS,
    ExperimentConfig,
    draw_pairs,
    emit_figure_series,
    emit_results_csv,
    read_results_csv,
    run_experiment,
    trace_seed,
    write_outputs,
)
from manet_mpath.mobility import static_trace
from manet_mpath.routing import Strategy

TINY = dict(
    geometries=((600, 600),), node_counts=(20,), v_max=(20,), trace_count=2, pair_count=3, duration=30.0,
)


def line_trace(config, cell, trace_index):
    # nodes 200 m apart on a line: node i reaches node j in |i - j| hops
    return static_trace([(50 + 200 * i, 300) for i in range(cell[2])], cell[0], cell[1], config.duration)


@pytest.fixture(scope="module")
def tiny_result():
    return run_experiment(ExperimentConfig(**TINY))


def test_static_single_session_reports_min_hop_distance():
    cfg = ExperimentConfig(geometries=((1000, 1000),), node_counts=(5,), v_max=(10,), strategies=("single",),
                           trace_count=1, pair_count=1, duration=50.0)
    res = run_experiment(cfg, trace_provider=line_trace)
    (s, d, _), = draw_pairs(cfg, cfg.cells()[0], 0)
    hops = res.get(1000, 1000, 5, 10, "single", "hop_count")
    assert hops.mean == abs(s - d) and hops.n == 1
    assert res.get(1000, 1000, 5, 10, "single", "paths_per_set").mean == 1.0


def test_pairs_are_distinct_and_seeded():
    cfg = ExperimentConfig(**TINY)
    cell = cfg.cells()[0]
    pairs = draw_pairs(cfg, cell, 0)
    assert len({(s, d) for s, d, _ in pairs}) == 3
    assert all(s != d and 1 <= t <= 10 for s, d, t in pairs)
    assert draw_pairs(cfg, cell, 0) == pairs
    assert draw_pairs(cfg, cell, 1) != pairs
    assert trace_seed(1, cell, 0) != trace_seed(1, cell, 1) != trace_seed(2, cell, 1)


def test_every_cell_has_every_strategy(tiny_result):
    assert len(tiny_result.cells) == 4
    for summaries in tiny_result.cells.values():
        for m in METRICS:
            s = summaries[m]
            assert s.n + s.excluded == 6


def test_single_rows_report_one_path(tiny_result):
    for (w, h, n, v, strategy), summaries in tiny_result.cells.items():
        if strategy is Strategy.SINGLE and summaries["paths_per_set"].n:
            assert summaries["paths_per_set"].mean == 1.0


def test_strategies_share_pairs_and_start_times(tiny_result):
    by_strategy = {}
    for r in tiny_result.sessions:
        by_strategy.setdefault(r.strategy, []).append((r.trace, r.pair, r.source, r.destination, r.start_time))
    first, *rest = by_strategy.values()
    assert all(other == first for other in rest)


def test_output_is_deterministic_across_runs_and_jobs(tmp_path):
    cfg = ExperimentConfig(**TINY)
    a = write_outputs(run_experiment(cfg, jobs=1), tmp_path / "a", sessions=True)
    b = write_outputs(run_experiment(cfg, jobs=2), tmp_path / "b", sessions=True)
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_results_csv_round_trip(tmp_path, tiny_result):
    path = emit_results_csv(tiny_result, tmp_path / "results.csv")
    with path.open() as fh:
        header = next(csv.reader(fh))
    assert header == ["geometry_w", "geometry_h", "nodes", "v_max", "strategy", "metric", "mean", "stddev", "n", "excluded"]
    back = read_results_csv(path)
    assert len(back) == 4 * 3
    for (w, h, n, v, strategy), summaries in tiny_result.cells.items():
        for m, s in summaries.items():
            got = back[(w, h, n, v, strategy, m)]
            assert got.mean == pytest.approx(s.mean, abs=5e-7)
            assert got.stddev == pytest.approx(s.stddev, abs=5e-7)
            assert (got.n, got.excluded) == (s.n, s.excluded)


def test_figure_series_schema(tmp_path):
    cfg = ExperimentConfig(**{**TINY, "strategies": ("zone",), "trace_count": 1, "pair_count": 2})
    paths = emit_figure_series(run_experiment(cfg), tmp_path)
    assert [p.name for p in paths] == ["fig_paths.csv", "fig_lifetime.csv", "fig_hops.csv"]
    rows = list(csv.reader(paths[0].open()))
    assert rows[0] == ["geometry", "nodes", "v_max", "strategy", "mean_paths_per_set", "stddev", "n"]
    assert len(rows) == 2
    assert rows[1][:4] == ["600x600", "20", "20", "zone_disjoint"]


def test_trace_dir_caches_traces(tmp_path):
    cfg = ExperimentConfig(**{**TINY, "trace_count": 1, "pair_count": 1, "trace_dir": str(tmp_path)})
    first = run_experiment(cfg)
    files = sorted(tmp_path.iterdir())
    assert len(files) == 1
    again = run_experiment(cfg)
    assert again.cells == first.cells


@pytest.mark.parametrize("kw", [dict(trace_count=0), dict(node_counts=()), dict(start_window=(5, 2000))])
def test_invalid_config(kw):
    with pytest.raises(ParameterError):
        ExperimentConfig(**{**TINY, **kw})
