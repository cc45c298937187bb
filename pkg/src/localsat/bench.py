"""Chain-of-inequalities instances, experiment runs, and scaling reports.

A chain instance has ((d-1)w + 2) groups of w variables over {0..d-1}; the
sum over each group must be strictly smaller than the sum over the next
group. Group sums range over 0..(d-1)w, one value short of the number of
groups, so every chain is unsatisfiable.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

from .cdcl import LearningScheme, SolverConfig, solve
from .csp import Constraint, CspInstance, CspError, load_instance
from .encode import encode


@dataclass(frozen=True)
class ChainSpec:
    w: int
    d: int

    def __post_init__(self):
        if self.w < 1 or self.d < 2:
            raise CspError(f"chain needs w >= 1 and d >= 2, got w={self.w}, d={self.d}")

    @property
    def groups(self) -> int:
        return (self.d - 1) * self.w + 2

    @property
    def n(self) -> int:
        return self.groups * self.w

    @property
    def num_constraints(self) -> int:
        return self.groups - 1

    @property
    def treewidth(self) -> int:
        return 2 * self.w - 1


def generate_chain(spec: ChainSpec) -> CspInstance:
    w, d = spec.w, spec.d
    names = [f"x{i + 1}" for i in range(spec.n)]
    domains = {v: tuple(range(d)) for v in names}
    by_sum: dict[int, list[tuple[int, ...]]] = {}
    for t in product(range(d), repeat=w):
        by_sum.setdefault(sum(t), []).append(t)
    sums = sorted(by_sum)
    allowed = [a + b for sa in sums for sb in sums if sa < sb for a in by_sum[sa] for b in by_sum[sb]]
    constraints = []
    for g in range(spec.groups - 1):
        scope = names[g * w : (g + 2) * w]
        constraints.append(Constraint(scope, allowed))
    return CspInstance(names, domains, constraints)


def scheme_config(scheme: str, seed: int = 0, **overrides) -> SolverConfig:
    """Solver configuration for a scheme label: 1uip, decision or minisat."""
    if scheme == "1uip":
        cfg = SolverConfig(LearningScheme.ONE_UIP, False, rng_seed=seed)
    elif scheme == "decision":
        cfg = SolverConfig(LearningScheme.DECISION, False, rng_seed=seed)
    elif scheme == "minisat":
        cfg = SolverConfig.minisat_like(seed)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return replace(cfg, **overrides) if overrides else cfg


def scheme_label(cfg: SolverConfig) -> str:
    if cfg.learning_scheme is LearningScheme.DECISION:
        return "decision"
    return "minisat" if cfg.minimize_conflict_clause else "1uip"


@dataclass(frozen=True)
class ExperimentSpec:
    source: ChainSpec | str | Path
    encoding: str = "direct"
    config: SolverConfig = field(default_factory=SolverConfig)
    seeds: tuple[int, ...] = (1,)
    repetitions: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("an experiment needs at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass
class ResultRow:
    w: int | None
    d: int | None
    n: int
    clause_count: int
    scheme: str
    seed: int
    verdict: str
    restarts: int
    conflicts: int
    decisions: int
    wall_time: float
    encoding: str = "direct"
    error: str = ""


ROW_FIELDS = [f.name for f in fields(ResultRow)]


def _run_one(spec: ExperimentSpec, seed: int) -> ResultRow:
    if isinstance(spec.source, ChainSpec):
        w, d = spec.source.w, spec.source.d
        inst = generate_chain(spec.source)
    else:
        inst = load_instance(spec.source)
        w, d = None, inst.max_domain_size
    label = scheme_label(spec.config)
    try:
        cnf, _ = encode(inst, spec.encoding)
    except ValueError as exc:
        return ResultRow(w, d, inst.n, 0, label, seed, "ERROR", 0, 0, 0, 0.0, spec.encoding, str(exc))
    cfg = replace(spec.config, rng_seed=seed)
    try:
        times = []
        res = None
        for _ in range(spec.repetitions):
            res = solve(cnf, cfg)
            times.append(res.wall_time)
        assert res is not None
        st = res.stats
        return ResultRow(
            w, d, inst.n, len(cnf), label, seed, res.status,
            st.restarts, st.conflicts, st.decisions, statistics.fmean(times), spec.encoding,
        )
    except Exception as exc:  # recorded per row; a batch never aborts
        return ResultRow(w, d, inst.n, len(cnf), label, seed, "ERROR", 0, 0, 0, 0.0, spec.encoding, repr(exc))


def _run_args(args):
    return _run_one(*args)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[ResultRow]:
    """One row per seed, in seed order. Rows depend only on their seeds."""
    jobs = [(spec, s) for s in spec.seeds]
    if workers <= 1 or len(jobs) == 1:
        return [_run_one(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_args, jobs))


@dataclass
class AggregateRow:
    w: int | None
    d: int | None
    n: int
    encoding: str
    scheme: str
    runs: int
    mean_restarts: float
    std_restarts: float
    mean_conflicts: float
    mean_decisions: float


def aggregate(rows: Iterable[ResultRow]) -> list[AggregateRow]:
    groups: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        if r.verdict == "ERROR":
            continue
        groups.setdefault((r.w, r.d, r.n, r.encoding, r.scheme), []).append(r)
    out = []
    for (w, d, n, enc, scheme), rs in groups.items():
        restarts = [r.restarts for r in rs]
        out.append(
            AggregateRow(
                w, d, n, enc, scheme, len(rs),
                statistics.fmean(restarts),
                statistics.stdev(restarts) if len(rs) > 1 else 0.0,
                statistics.fmean(r.conflicts for r in rs),
                statistics.fmean(r.decisions for r in rs),
            )
        )
    return out


def rows_to_csv(rows: Sequence[ResultRow], include_wall_time: bool = False) -> str:
    """CSV with one column per ResultRow field.

    Wall time is left blank unless requested, so output for fixed seeds is
    byte-identical between runs.
    """
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        rec = asdict(r)
        rec["wall_time"] = f"{r.wall_time:.6f}" if include_wall_time else ""
        writer.writerow(rec)
    return buf.getvalue()


def aggregates_to_csv(aggs: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    names = [f.name for f in fields(AggregateRow)]
    writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
    writer.writeheader()
    for a in aggs:
        rec = asdict(a)
        for key in ("mean_restarts", "std_restarts", "mean_conflicts", "mean_decisions"):
            rec[key] = f"{rec[key]:.3f}"
        writer.writerow(rec)
    return buf.getvalue()


def plot_data(aggs: Sequence[AggregateRow]) -> str:
    """Two-column 'x y' blocks (x = n*d, y = mean restarts), one per (w, scheme)."""
    series: dict[tuple, list[tuple[int, float]]] = {}
    for a in aggs:
        if a.d is None:
            continue
        series.setdefault((a.w, a.scheme), []).append((a.n * a.d, a.mean_restarts))
    blocks = []
    for (w, scheme), pts in sorted(series.items(), key=lambda kv: (kv[0][0] or 0, kv[0][1])):
        lines = [f"# w={w} scheme={scheme}"]
        lines += [f"{x} {y:.3f}" for x, y in sorted(pts)]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# --- scaling --------------------------------------------------------------------------


def overlay_growth(w: int, d: int) -> int:
    """d^(2w-2) * C(nd/w, 3) with n the chain's variable count."""
    n = ChainSpec(w, d).n
    return d ** (2 * w - 2) * math.comb(n * d // w, 3)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = statistics.linear_regression([math.log(x) for x in xs], [math.log(y) for y in ys])
    return slope


@dataclass
class ScalingSeries:
    w: int
    scheme: str
    points: list[tuple[int, int, float]]  # (d, n*d, mean restarts)
    reliable: bool
    slope: float | None = None
    overlay_slope: float | None = None
    bound_slope: int = 0
    exceeds_bound: bool = False

    def format(self) -> str:
        head = f"w={self.w} scheme={self.scheme} points={len(self.points)}"
        if not self.reliable:
            return head + " UNRELIABLE (need >= 4 distinct d values)"
        return (
            f"{head} slope={self.slope:.3f} overlay_slope={self.overlay_slope:.3f} "
            f"bound_slope={self.bound_slope} {'EXCEEDS' if self.exceeds_bound else 'below'} bound"
        )


def scaling_report(rows: Iterable[ResultRow | AggregateRow], min_points: int = 4) -> list[ScalingSeries]:
    """Per (w, scheme): log-log least-squares slope of mean restarts against n*d.

    The comparison slope for the worst-case expected-restart bound is 4w-2
    (exponent 2k with k = 2w-1). The overlay column fits d^(2w-2) C(nd/w,3)
    over the same points and is reported only.
    """
    rows = list(rows)
    if rows and isinstance(rows[0], ResultRow):
        rows = aggregate(rows)
    series: dict[tuple, dict[int, AggregateRow]] = {}
    for a in rows:
        if a.w is None or a.d is None:
            continue
        series.setdefault((a.w, a.scheme), {})[a.d] = a
    out = []
    for (w, scheme), by_d in sorted(series.items()):
        pts = [(d, a.n * d, a.mean_restarts) for d, a in sorted(by_d.items())]
        s = ScalingSeries(w, scheme, pts, reliable=len(pts) >= min_points, bound_slope=4 * w - 2)
        usable = [p for p in pts if p[2] > 0]
        if s.reliable and len(usable) >= min_points:
            xs = [p[1] for p in usable]
            s.slope = loglog_slope(xs, [p[2] for p in usable])
            s.overlay_slope = loglog_slope(xs, [overlay_growth(w, p[0]) for p in usable])
            s.exceeds_bound = s.slope > s.bound_slope
        else:
            s.reliable = False
        out.append(s)
    return out
