"""Command-line entry point: ``localsat <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import bench
from .cdcl import LearningScheme, RestartPolicy, SolverConfig, is_absorbed, solve
from .consistency import k_consistency_closure
from .csp import CspError, load_instance, save_instance
from .encode import DimacsError, EncodingError, encode, read_dimacs, save_dimacs
from .hyperres import ShapeError, refute_width_k, theoretical_bounds


def parse_int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_closure(args) -> int:
    inst = load_instance(args.instance)
    res = k_consistency_closure(inst, args.k, trace=bool(args.trace))
    if args.trace:
        Path(args.trace).write_text("".join(r.format() + "\n" for r in res.removal_trace))
    print("EMPTY" if res.empty else "NONEMPTY")
    return 0


def cmd_encode(args) -> int:
    inst = load_instance(args.instance)
    try:
        cnf, _ = encode(inst, args.encoding)
    except EncodingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_dimacs(cnf, args.out)
    print(f"wrote {args.out}: {cnf.num_vars} variables, {len(cnf)} clauses")
    return 0


def cmd_nhr(args) -> int:
    cnf = read_dimacs(args.cnf)
    out = refute_width_k(cnf, args.width, strict=args.strict)
    if out.refuted:
        assert out.trace is not None
        if args.trace:
            ids = {c: i for i, c in enumerate(cnf.clauses, start=1)}
            for j, step in enumerate(out.trace.steps, start=1):
                ids.setdefault(step.resolvent, f"d{j}")
            Path(args.trace).write_text(out.trace.format(ids) + "\n")
        print(f"REFUTED width={out.trace.width} steps={len(out.trace.steps)}")
    else:
        if args.trace:
            Path(args.trace).write_text("")
        print(f"SATURATED clauses={len(out.derived)}")
    return 0


def cmd_bounds(args) -> int:
    print(theoretical_bounds(args.n, args.d, args.k, args.m).format())
    return 0


def _config(args) -> SolverConfig:
    scheme = LearningScheme.DECISION if args.scheme == "decision" else LearningScheme.ONE_UIP
    policy = {"every": RestartPolicy.EVERY_CONFLICT, "never": RestartPolicy.NEVER, "geometric": RestartPolicy.GEOMETRIC}[
        args.restart
    ]
    return SolverConfig(scheme, args.minimize, restart_policy=policy, rng_seed=args.seed)


def cmd_solve(args) -> int:
    cnf = read_dimacs(args.cnf)
    res = solve(cnf, _config(args))
    print(res.status)
    if res.model is not None and args.model:
        print("v " + " ".join(map(str, res.model)) + " 0")
    print(res.stats.format())
    if args.stats_json:
        Path(args.stats_json).write_text(json.dumps({"status": res.status, **asdict(res.stats)}, indent=1) + "\n")
    return 0


def cmd_absorb(args) -> int:
    cnf = read_dimacs(args.cnf)
    clause = [int(t) for t in args.clause.split()]
    report = is_absorbed(cnf.clauses, clause, num_vars=max([cnf.num_vars] + [abs(l) for l in clause]))
    print(report.format())
    return 0


def cmd_generate(args) -> int:
    inst = bench.generate_chain(bench.ChainSpec(args.w, args.d))
    save_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.n} variables, {len(inst.constraints)} constraints")
    return 0


def cmd_bench(args) -> int:
    rows = []
    seeds = tuple(range(1, args.seeds + 1))
    for w in parse_int_list(args.w):
        for d in parse_int_list(args.d):
            spec = bench.ExperimentSpec(bench.ChainSpec(w, d), args.encoding, bench.scheme_config(args.scheme), seeds)
            rows.extend(bench.run_experiment(spec, workers=args.workers))
    Path(args.csv).write_text(bench.rows_to_csv(rows, include_wall_time=args.timing))
    aggs = bench.aggregate(rows)
    sys.stdout.write(bench.aggregates_to_csv(aggs))
    if args.plotdata:
        Path(args.plotdata).write_text(bench.plot_data(aggs))
    for s in bench.scaling_report(aggs):
        print(s.format())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localsat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("closure", help="k-consistency closure of a CSP JSON instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("encode", help="encode a CSP JSON instance as DIMACS CNF")
    s.add_argument("--instance", required=True)
    s.add_argument("--encoding", choices=["direct", "direct-no-amo", "support"], default="direct")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("nhr", help="search for a width-bounded negative-hyper-resolution refutation")
    s.add_argument("--cnf", required=True)
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--trace")
    s.add_argument("--strict", action="store_true", help="require a negative sparse formula")
    s.set_defaults(func=cmd_nhr)

    s = sub.add_parser("bounds", help="restart bounds for given n, d, k, m")
    for name in ("n", "d", "k", "m"):
        s.add_argument(f"--{name}", type=int, required=True)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("solve", help="run the CDCL solver on a DIMACS file")
    s.add_argument("--cnf", required=True)
    s.add_argument("--scheme", choices=["1uip", "decision"], default="1uip")
    s.add_argument("--restart", choices=["every", "never", "geometric"], default="every")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--minimize", action="store_true", help="recursive conflict-clause minimization")
    s.add_argument("--model", action="store_true", help="print the model on SAT")
    s.add_argument("--stats-json")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("absorb", help="operational absorption test of a clause")
    s.add_argument("--cnf", required=True)
    s.add_argument("--clause", required=True, help='DIMACS literals, e.g. "-4 -6"')
    s.set_defaults(func=cmd_absorb)

    s = sub.add_parser("generate", help="write a chain instance as CSP JSON")
    s.add_argument("--w", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("bench", help="run the solver over chain instances and seeds")
    s.add_argument("--w", required=True, help="group size(s): 2 or 2,3 or 2-4")
    s.add_argument("--d", required=True, help="domain size(s), same syntax")
    s.add_argument("--encoding", choices=["direct", "direct-no-amo", "support"], default="direct")
    s.add_argument("--scheme", choices=["1uip", "decision", "minisat"], default="decision")
    s.add_argument("--seeds", type=int, default=5)
    s.add_argument("--csv", required=True)
    s.add_argument("--plotdata")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="write wall times into the CSV")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CspError, DimacsError, ShapeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
