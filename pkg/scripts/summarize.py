#!/usr/bin/env python3
"""Print per-geometry tables from a results.csv: one row per node count, one column per strategy.

    python3 scripts/summarize.py results/results.csv [--by-speed]

Values are means over v_max cells unless --by-speed is given. The last
block shows the link/node lifetime ratio and hop-count ratios over single-path.
"""

import argparse
from collections import defaultdict

import numpy as np

from manet_mpath.experiment import METRICS, read_results_csv
from manet_mpath.routing import Strategy

ORDER = (Strategy.SINGLE, Strategy.LINK, Strategy.NODE, Strategy.ZONE)


def table(rows, title):
    print(f"\n{title}")
    print(f"{'':>14}" + "".join(f"{s.short:>10}" for s in ORDER))
    for label, vals in rows:
        print(f"{label:>14}" + "".join("" if v is None else f"{v:10.3f}" for v in vals))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("results")
    ap.add_argument("--by-speed", action="store_true")
    args = ap.parse_args()

    data = read_results_csv(args.results)
    groups = defaultdict(list)  # (w, h, nodes[, v], strategy, metric) -> means
    for (w, h, n, v, s, m), summary in data.items():
        key = (w, h, n, v) if args.by_speed else (w, h, n)
        groups[(key, s, m)].append(summary.mean)
    means = {k: float(np.mean(v)) for k, v in groups.items()}
    keys = sorted({k for k, _, _ in groups})

    for metric in METRICS:
        rows = [("/".join(f"{x:g}" for x in k), [means.get((k, s, metric)) for s in ORDER]) for k in keys]
        table(rows, metric)

    print("\nratios: link/node lifetime, link/node/zone hop count over single")
    print(f"{'':>14}{'lifetime':>10}{'link':>10}{'node':>10}{'zone':>10}")
    for k in keys:
        life = means[(k, Strategy.LINK, "time_between_discoveries")] / means[(k, Strategy.NODE, "time_between_discoveries")]
        single = means[(k, Strategy.SINGLE, "hop_count")]
        hops = [means[(k, s, "hop_count")] / single for s in ORDER[1:]]
        print(f"{'/'.join(f'{x:g}' for x in k):>14}" + "".join(f"{v:10.3f}" for v in (life, *hops)))

if __name__ == "__main__":
    main()
