#!/usr/bin/env python3
"""Run the default grid (both geometries, 50/100/150 nodes, v_max 10/30/50) and write CSVs.

    python3 scripts/run_default_grid.py --out-dir results --jobs 4
"""

import argparse
import logging
import time

from manet_mpath.experiment import ExperimentConfig, default_jobs, run_experiment, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--traces", type=int, default=10)
    ap.add_argument("--pairs", type=int, default=15)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--trace-dir", help="cache traces here")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    config = ExperimentConfig(trace_count=args.traces, pair_count=args.pairs, base_seed=args.seed, trace_dir=args.trace_dir)
    t0 = time.perf_counter()
    result = run_experiment(config, jobs=args.jobs)
    for path in write_outputs(result, args.out_dir, sessions=True):
        print(f"wrote {path}")
    print(f"{len(result.sessions)} sessions in {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
