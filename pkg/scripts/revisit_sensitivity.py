#!/usr/bin/env python3
"""Compare forward-only path consumption with re-adopting earlier paths after a break.

Runs the default grid twice on the same traces and pairs (fewer traces by
default) and prints the relative change of each metric per strategy.

    python3 scripts/revisit_sensitivity.py --traces 2 --pairs 5
"""

import argparse
from collections import defaultdict

import numpy as np

from manet_mpath.experiment import METRICS, ExperimentConfig, default_jobs, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--traces", type=int, default=2)
    ap.add_argument("--pairs", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args()

    runs = {}
    for revisit in (False, True):
        cfg = ExperimentConfig(trace_count=args.traces, pair_count=args.pairs, revisit=revisit)
        runs[revisit] = run_experiment(cfg, jobs=args.jobs)

    change = defaultdict(list)
    for key, summaries in runs[False].cells.items():
        for m in METRICS:
            base, alt = summaries[m].mean, runs[True].cells[key][m].mean
            if np.isfinite(base) and base:
                change[(key[-1].short, m)].append(alt / base - 1)
    print(f"{'strategy':>8} " + "".join(f"{m:>26}" for m in METRICS))
    for s in ("single", "link", "node", "zone"):
        print(f"{s:>8} " + "".join(f"{np.mean(change[(s, m)]):>+26.1%}" for m in METRICS))


if __name__ == "__main__":
    main()
