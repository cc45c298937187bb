"""Mean restart counts on chain instances next to the published reference values.

    python3 scripts/reproduce_restarts.py --w 2 --d 2-5 --seeds 25 --out results/restarts.csv
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

from localsat.bench import ChainSpec, ExperimentSpec, rows_to_csv, run_experiment, scheme_config
from localsat.cli import parse_int_list
from localsat.reference import MINISAT_LIKE_RESTARTS, SCHEME_RESTARTS


def reference(w, d, scheme):
    if scheme == "minisat":
        row = MINISAT_LIKE_RESTARTS.get((w, d))
        return row[1] if row else None
    row = SCHEME_RESTARTS.get((w, d))
    if row is None:
        return None
    return row[2] if scheme == "1uip" else row[3]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--w", default="2")
    ap.add_argument("--d", default="2-5")
    ap.add_argument("--schemes", default="1uip,decision,minisat")
    ap.add_argument("--seeds", type=int, default=25)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, help="per-run CSV")
    args = ap.parse_args(argv)

    rows = []
    print(f"{'w':>2} {'d':>3} {'n':>4} {'scheme':>9} {'mean':>10} {'stdev':>9} {'reference':>10} {'ratio':>6} {'sec':>7}")
    for w in parse_int_list(args.w):
        for d in parse_int_list(args.d):
            for scheme in args.schemes.split(","):
                t0 = time.perf_counter()
                spec = ExperimentSpec(ChainSpec(w, d), "direct", scheme_config(scheme), tuple(range(1, args.seeds + 1)))
                batch = run_experiment(spec, workers=args.workers)
                rows += batch
                rs = [r.restarts for r in batch if r.verdict == "UNSAT"]
                mean = statistics.fmean(rs)
                sd = statistics.stdev(rs) if len(rs) > 1 else 0.0
                ref = reference(w, d, scheme)
                ratio = f"{mean / ref:6.2f}" if ref else "     -"
                print(f"{w:>2} {d:>3} {ChainSpec(w, d).n:>4} {scheme:>9} {mean:>10.1f} {sd:>9.1f} "
                      f"{ref if ref else '-':>10} {ratio} {time.perf_counter() - t0:>7.1f}", flush=True)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(rows_to_csv(rows, include_wall_time=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
