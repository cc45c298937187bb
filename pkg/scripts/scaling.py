"""Restart growth against n*d: plot data, log-log slopes and the overlay column.

    python3 scripts/scaling.py --w 2 --d 2-8 --scheme decision --seeds 5 --plotdata results/w2.dat

Also prints the slopes of the published restart columns for comparison.
"""

import argparse
import sys
from pathlib import Path

from localsat.bench import ChainSpec, ExperimentSpec, aggregate, loglog_slope, plot_data, run_experiment, scaling_report, scheme_config
from localsat.cli import parse_int_list
from localsat.reference import SCHEME_RESTARTS


def published_slopes():
    for w in sorted({w for w, _ in SCHEME_RESTARTS}):
        ds = sorted(d for ww, d in SCHEME_RESTARTS if ww == w)
        if len(ds) < 2:
            continue
        xs = [ChainSpec(w, d).n * d for d in ds]
        for col, name in ((2, "1uip"), (3, "decision")):
            slope = loglog_slope(xs, [SCHEME_RESTARTS[(w, d)][col] for d in ds])
            print(f"published w={w} {name}: slope={slope:.3f} over d={ds[0]}..{ds[-1]} (bound {4 * w - 2})")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--w", default="2")
    ap.add_argument("--d", default="2-6")
    ap.add_argument("--scheme", default="decision", choices=["1uip", "decision", "minisat"])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--plotdata", type=Path)
    args = ap.parse_args(argv)

    rows = []
    for w in parse_int_list(args.w):
        for d in parse_int_list(args.d):
            spec = ExperimentSpec(ChainSpec(w, d), "direct", scheme_config(args.scheme), tuple(range(1, args.seeds + 1)))
            rows += run_experiment(spec, workers=args.workers)
            print(f"done w={w} d={d}", file=sys.stderr, flush=True)
    aggs = aggregate(rows)
    for a in aggs:
        print(f"w={a.w} d={a.d} n*d={a.n * a.d} mean_restarts={a.mean_restarts:.1f} sd={a.std_restarts:.1f}")
    for s in scaling_report(aggs):
        print(s.format())
    published_slopes()
    if args.plotdata:
        args.plotdata.parent.mkdir(parents=True, exist_ok=True)
        args.plotdata.write_text(plot_data(aggs))
    return 0


if __name__ == "__main__":
    sys.exit(main())
