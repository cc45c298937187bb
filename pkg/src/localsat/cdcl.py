"""A small clause-learning SAT solver with random branching and restarts.

The main loop follows the usual learn / restart-or-backjump / propagate /
decide cycle. Learnt clauses are never deleted. Propagation uses two watched
literals.

Internal literal encoding is MiniSat's: variable ``v`` (0-based) gives
literals ``2v`` (true) and ``2v + 1`` (false). Everything public speaks
DIMACS integers.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .encode import Clause, CnfFormula, make_clause
from .rng import XorShift64Star


class LearningScheme(enum.Enum):
    ONE_UIP = "1uip"
    DECISION = "decision"


class Branching(enum.Enum):
    RANDOM_TRUE = "random-true"
    ACTIVITY = "activity"


class RestartPolicy(enum.Enum):
    EVERY_CONFLICT = "every"
    GEOMETRIC = "geometric"
    NEVER = "never"


@dataclass(frozen=True)
class SolverConfig:
    learning_scheme: LearningScheme = LearningScheme.ONE_UIP
    minimize_conflict_clause: bool = False
    branching: Branching = Branching.RANDOM_TRUE
    restart_policy: RestartPolicy = RestartPolicy.EVERY_CONFLICT
    restart_base: int = 100
    restart_factor: float = 1.5
    rng_seed: int = 0
    max_conflicts: int | None = None

    @property
    def clause_deletion(self) -> bool:
        return False

    @classmethod
    def minisat_like(cls, seed: int = 0) -> "SolverConfig":
        """1UIP with recursive clause minimization, random branching, restart on every conflict."""
        return cls(LearningScheme.ONE_UIP, True, Branching.RANDOM_TRUE, RestartPolicy.EVERY_CONFLICT, rng_seed=seed)


@dataclass
class SolverStats:
    restarts: int = 0
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    learned_clause_count: int = 0
    learned_literal_total: int = 0

    def format(self) -> str:
        return (
            f"restarts={self.restarts} conflicts={self.conflicts} "
            f"decisions={self.decisions} props={self.propagations}"
        )


@dataclass
class SolveResult:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    model: list[int] | None
    stats: SolverStats
    wall_time: float = 0.0

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


@dataclass(frozen=True)
class LearnEvent:
    """Handed to an observer after every conflict analysis (DIMACS literals)."""

    learned: tuple[int, ...]
    literal_levels: tuple[int, ...]
    conflict_level: int
    backjump_level: int
    decisions: tuple[int, ...]  # decision literals on the trail, by level


class SolverInvariantError(AssertionError):
    pass


def _to_internal(lit: int) -> int:
    return 2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1


def _to_dimacs(lit: int) -> int:
    v = (lit >> 1) + 1
    return -v if lit & 1 else v


class _Satisfied:
    def __repr__(self) -> str:
        return "SATISFIED"


SATISFIED = _Satisfied()


def restrict(clause: Iterable[int], assignments: Iterable[int]):
    """Restrict a clause by a sequence of assignments given as true literals.

    Returns SATISFIED if some assignment satisfies the clause, else the clause
    with the assigned variables' literals deleted (empty tuple = falsified).
    """
    clause = tuple(clause)
    remaining = list(clause)
    for a in assignments:
        if a in remaining:
            return SATISFIED
        remaining = [lit for lit in remaining if lit != -a]
    return tuple(remaining)


class Engine:
    """Trail, watched-literal propagation and backtracking over a clause database."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = ()):
        self.num_vars = num_vars
        self.value = [0] * (2 * num_vars)  # per internal literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * num_vars
        self.reason = [-1] * num_vars
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.learnt_from = 0
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars)]
        self.conflict_at_root = False
        self.propagations = 0
        for c in clauses:
            self.add_clause(c)

    # -- database ---------------------------------------------------------------

    def add_clause(self, lits: Sequence[int]) -> int:
        """Add a DIMACS clause at decision level 0; returns its id."""
        c = [_to_internal(lit) for lit in make_clause(lits)]
        return self._attach(c, root=True)

    def _attach(self, c: list[int], root: bool) -> int:
        cid = len(self.clauses)
        self.clauses.append(c)
        if not c:
            self.conflict_at_root = True
            return cid
        if len(c) == 1:
            if root:
                val = self.value[c[0]]
                if val == -1:
                    self.conflict_at_root = True
                elif val == 0:
                    self._assign(c[0], cid)
            return cid
        if root:
            # watch two non-false literals when possible
            c.sort(key=lambda lit: self.value[lit] == -1)
        self.watches[c[0]].append(cid)
        self.watches[c[1]].append(cid)
        if root and self.value[c[1]] == -1:
            if self.value[c[0]] == -1:
                self.conflict_at_root = True
            elif self.value[c[0]] == 0:
                self._assign(c[0], cid)
        return cid

    # -- trail ----------------------------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _assign(self, lit: int, reason: int) -> None:
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        self._on_assign(v)

    def _on_assign(self, v: int) -> None:
        pass

    def _on_unassign(self, v: int) -> None:
        pass

    def decide(self, lit: int) -> None:
        """Open a new decision level and assign the DIMACS literal `lit` true."""
        self.trail_lim.append(len(self.trail))
        self._assign(_to_internal(lit), -1)

    def cancel_until(self, level: int) -> None:
        if len(self.trail_lim) <= level:
            return
        stop = self.trail_lim[level]
        value, reason, trail = self.value, self.reason, self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            value[lit] = 0
            value[lit ^ 1] = 0
            v = lit >> 1
            reason[v] = -1
            self._on_unassign(v)
        del trail[stop:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, stop)

    def propagate(self) -> int:
        """Unit propagation to fixpoint. Returns a falsified clause id or -1."""
        if self.conflict_at_root:
            return len(self.clauses) - 1 if self.clauses and not self.clauses[-1] else 0
        value, clauses, watches, trail = self.value, self.clauses, self.watches, self.trail
        level, reason = self.level, self.reason
        dl = len(self.trail_lim)
        on_assign = self._on_assign
        qhead = self.qhead
        confl = -1
        props = 0
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            ws = watches[false_lit]
            keep = []
            n_ws = len(ws)
            i = 0
            while i < n_ws:
                cid = ws[i]
                i += 1
                c = clauses[cid]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    keep.append(cid)
                    continue
                for j in range(2, len(c)):
                    lit = c[j]
                    if value[lit] != -1:
                        c[1] = lit
                        c[j] = false_lit
                        watches[lit].append(cid)
                        break
                else:
                    keep.append(cid)
                    if value[first] == -1:
                        confl = cid
                        keep.extend(ws[i:])
                        break
                    value[first] = 1
                    value[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = cid
                    trail.append(first)
                    on_assign(v)
                    props += 1
            watches[false_lit] = keep
            if confl >= 0:
                break
        self.qhead = len(trail) if confl >= 0 else qhead
        self.propagations += props
        return confl

    # -- inspection -------------------------------------------------------------------

    def lit_value(self, lit: int) -> bool | None:
        val = self.value[_to_internal(lit)]
        return None if val == 0 else val == 1

    def trail_literals(self) -> list[tuple[int, int, bool]]:
        """(DIMACS literal, level, is_decision) for every assignment on the trail."""
        return [(_to_dimacs(lit), self.level[lit >> 1], self.reason[lit >> 1] == -1) for lit in self.trail]

    def clause_dimacs(self, cid: int) -> Clause:
        return make_clause(_to_dimacs(lit) for lit in self.clauses[cid])


@dataclass
class PropagationResult:
    implied: list[int]
    conflict: int | None
    levels: dict[int, int] = field(default_factory=dict)


def propagate(clauses: Sequence[Sequence[int]], decisions: Sequence[int] = (), num_vars: int | None = None) -> PropagationResult:
    """Propagate from level 0, then after each decision in turn.

    Stops at the first conflict. Decisions on already-assigned variables are
    skipped.
    """
    if num_vars is None:
        num_vars = max((abs(lit) for c in clauses for lit in c), default=0)
        num_vars = max([num_vars] + [abs(d) for d in decisions])
    eng = Engine(num_vars, clauses)
    confl = eng.propagate()
    for d in decisions:
        if confl >= 0:
            break
        if eng.lit_value(d) is not None:
            continue
        eng.decide(d)
        confl = eng.propagate()
    implied = [lit for lit, _, is_dec in eng.trail_literals() if not is_dec]
    levels = {lit: lvl for lit, lvl, _ in eng.trail_literals()}
    return PropagationResult(implied, confl if confl >= 0 else None, levels)


class CDCLSolver(Engine):
    def __init__(
        self,
        cnf: CnfFormula,
        config: SolverConfig = SolverConfig(),
        observer: Callable[[LearnEvent], None] | None = None,
    ):
        self.config = config
        self.observer = observer
        self.rng = XorShift64Star(config.rng_seed)
        n = cnf.num_vars
        # pool of unassigned variables with O(1) removal
        self.free = list(range(n))
        self.free_pos = list(range(n))
        self.activity = [0.0] * n
        self.var_inc = 1.0
        self.seen = [False] * n
        self.stats = SolverStats()
        super().__init__(n, cnf.clauses)
        self.learnt_from = len(self.clauses)

    def _on_assign(self, v: int) -> None:
        free, pos = self.free, self.free_pos
        i = pos[v]
        last = free.pop()
        if last != v:
            free[i] = last
            pos[last] = i

    def _on_unassign(self, v: int) -> None:
        self.free_pos[v] = len(self.free)
        self.free.append(v)

    # -- branching ------------------------------------------------------------------

    def _pick_branch(self) -> int:
        if self.config.branching is Branching.RANDOM_TRUE:
            v = self.free[self.rng.below(len(self.free))]
            return 2 * v
        act = self.activity
        v = max(self.free, key=lambda u: (act[u], -u))
        return 2 * v + 1

    def _bump(self, lits: Iterable[int]) -> None:
        act = self.activity
        for lit in lits:
            v = lit >> 1
            act[v] += self.var_inc
            if act[v] > 1e100:
                for u in range(self.num_vars):
                    act[u] *= 1e-100
                self.var_inc *= 1e-100
        self.var_inc /= 0.95

    # -- conflict analysis ------------------------------------------------------------

    def analyze(self, confl: int) -> tuple[list[int], int]:
        """Derive an asserting clause from conflict `confl`.

        Returns (learnt, backjump level) with the asserting literal first and
        a literal of the backjump level second. Level-0 literals are dropped.
        """
        if self.config.learning_scheme is LearningScheme.DECISION:
            learnt = self._analyze_decision(confl)
        else:
            learnt = self._analyze_1uip(confl)
        level = self.level
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for i in range(2, len(learnt)):
            if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                best = i
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_1uip(self, confl: int) -> list[int]:
        seen, level, reason, clauses, trail = self.seen, self.level, self.reason, self.clauses, self.trail
        dl = len(self.trail_lim)
        learnt = [-1]
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            c = clauses[confl]
            for q in c if p == -1 else c[1:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
            confl = reason[p >> 1]
        learnt[0] = p ^ 1
        if self.config.minimize_conflict_clause:
            learnt = self._minimize(learnt)
        for lit in learnt:
            seen[lit >> 1] = False
        return learnt

    def _minimize(self, learnt: list[int]) -> list[int]:
        """Recursive conflict-clause minimization (remove literals implied by the others)."""
        level, reason = self.level, self.reason
        abstract = 0
        for lit in learnt[1:]:
            abstract |= 1 << (level[lit >> 1] & 31)
        to_clear = list(learnt)
        out = [learnt[0]]
        for lit in learnt[1:]:
            if reason[lit >> 1] == -1 or not self._redundant(lit, abstract, to_clear):
                out.append(lit)
        for lit in to_clear:
            self.seen[lit >> 1] = False
        # caller clears `seen` for the kept literals again; harmless
        return out

    def _redundant(self, p: int, abstract: int, to_clear: list[int]) -> bool:
        seen, level, reason, clauses = self.seen, self.level, self.reason, self.clauses
        stack = [p]
        top = len(to_clear)
        while stack:
            q = stack.pop()
            c = clauses[reason[q >> 1]]
            for lit in c[1:]:
                v = lit >> 1
                if not seen[v] and level[v] > 0:
                    if reason[v] != -1 and (1 << (level[v] & 31)) & abstract:
                        seen[v] = True
                        stack.append(lit)
                        to_clear.append(lit)
                    else:
                        for x in to_clear[top:]:
                            seen[x >> 1] = False
                        del to_clear[top:]
                        return False
        return True

    def _analyze_decision(self, confl: int) -> list[int]:
        """Resolve back until only negated decision literals remain."""
        seen, level, reason, clauses, trail = self.seen, self.level, self.reason, self.clauses, self.trail
        dl = len(self.trail_lim)
        pending = 0
        for q in clauses[confl]:
            v = q >> 1
            if not seen[v] and level[v] > 0:
                seen[v] = True
                pending += 1
        learnt: list[int] = []
        head = -1
        idx = len(trail) - 1
        while pending:
            lit = trail[idx]
            idx -= 1
            v = lit >> 1
            if not seen[v]:
                continue
            seen[v] = False
            pending -= 1
            r = reason[v]
            if r == -1:
                if level[v] == dl:
                    head = lit ^ 1
                else:
                    learnt.append(lit ^ 1)
                continue
            for q in clauses[r][1:]:
                u = q >> 1
                if not seen[u] and level[u] > 0:
                    seen[u] = True
                    pending += 1
        return [head] + learnt

    # -- main loop ----------------------------------------------------------------------

    def _check_learnt(self, learnt: list[int]) -> None:
        dl = len(self.trail_lim)
        level = self.level
        at_top = sum(1 for lit in learnt if level[lit >> 1] == dl)
        if at_top != 1 or level[learnt[0] >> 1] != dl:
            raise SolverInvariantError(f"learnt clause is not asserting: {at_top} literals at level {dl}")
        for lit in learnt:
            if self.value[lit] != -1:
                raise SolverInvariantError("learnt clause is not falsified by the current trail")
        if self.config.learning_scheme is LearningScheme.DECISION:
            for lit in learnt:
                if self.reason[lit >> 1] != -1:
                    raise SolverInvariantError("DECISION clause contains a non-decision literal")

    def _emit(self, learnt: list[int], bj: int) -> None:
        level = self.level
        decisions = tuple(_to_dimacs(self.trail[i]) for i in self.trail_lim)
        self.observer(
            LearnEvent(
                tuple(_to_dimacs(lit) for lit in learnt),
                tuple(level[lit >> 1] for lit in learnt),
                len(self.trail_lim),
                bj,
                decisions,
            )
        )

    def solve(self) -> SolveResult:
        t0 = time.perf_counter()
        stats = self.stats
        cfg = self.config
        policy = cfg.restart_policy
        restart_limit = float(cfg.restart_base)
        since_restart = 0
        status = "UNKNOWN"
        while True:
            confl = self.propagate()
            if confl >= 0:
                stats.conflicts += 1
                if not self.trail_lim or self.conflict_at_root:
                    status = "UNSAT"
                    break
                learnt, bj = self.analyze(confl)
                self._check_learnt(learnt)
                if self.observer is not None:
                    self._emit(learnt, bj)
                if cfg.branching is Branching.ACTIVITY:
                    self._bump(learnt)
                stats.learned_clause_count += 1
                stats.learned_literal_total += len(learnt)
                since_restart += 1
                if policy is RestartPolicy.EVERY_CONFLICT:
                    restart = True
                elif policy is RestartPolicy.GEOMETRIC:
                    restart = since_restart >= restart_limit
                    if restart:
                        restart_limit *= cfg.restart_factor
                else:
                    restart = False
                if restart:
                    stats.restarts += 1
                    since_restart = 0
                    self.cancel_until(0)
                else:
                    self.cancel_until(bj)
                cid = self._attach(learnt, root=False)
                if len(learnt) == 1 or not restart:
                    self._assign(learnt[0], cid)
                if cfg.max_conflicts is not None and stats.conflicts >= cfg.max_conflicts:
                    break
                continue
            if not self.free:
                status = "SAT"
                break
            stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(self._pick_branch(), -1)
        stats.propagations = self.propagations
        model = None
        if status == "SAT":
            model = [v + 1 if self.value[2 * v] == 1 else -(v + 1) for v in range(self.num_vars)]
        return SolveResult(status, model, stats, time.perf_counter() - t0)


try:
    from . import _kernel
except ImportError:  # numba missing: pure Python only
    _kernel = None


def compiled_available() -> bool:
    return _kernel is not None


def _solve_compiled(solver: CDCLSolver) -> SolveResult:
    t0 = time.perf_counter()
    cfg = solver.config
    scheme = 1 if cfg.learning_scheme is LearningScheme.DECISION else 0
    policy = {RestartPolicy.EVERY_CONFLICT: 0, RestartPolicy.GEOMETRIC: 1, RestartPolicy.NEVER: 2}[cfg.restart_policy]
    code, arr, value = _kernel.run(solver, scheme, cfg.minimize_conflict_clause, policy)
    if code >= _kernel.ERR_NOT_ASSERTING:
        msg = {
            _kernel.ERR_NOT_ASSERTING: "learnt clause is not asserting",
            _kernel.ERR_NOT_FALSIFIED: "learnt clause is not falsified by the current trail",
            _kernel.ERR_NON_DECISION: "DECISION clause contains a non-decision literal",
        }[code]
        raise SolverInvariantError(msg)
    stats = SolverStats(*(int(x) for x in arr))
    status = {_kernel.SAT: "SAT", _kernel.UNSAT: "UNSAT"}.get(code, "UNKNOWN")
    model = None
    if status == "SAT":
        model = [v + 1 if value[2 * v] == 1 else -(v + 1) for v in range(solver.num_vars)]
    return SolveResult(status, model, stats, time.perf_counter() - t0)


def solve(
    cnf: CnfFormula,
    config: SolverConfig = SolverConfig(),
    observer: Callable[[LearnEvent], None] | None = None,
    backend: str = "auto",
) -> SolveResult:
    """Solve `cnf`.

    backend "python" forces the reference engine; "compiled" requires numba;
    "auto" uses the compiled loop whenever it applies (random branching, no
    observer). Both produce identical statistics for the same seed.
    """
    if backend not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown backend {backend!r}")
    eligible = observer is None and config.branching is Branching.RANDOM_TRUE
    if backend == "compiled" and (_kernel is None or not eligible):
        raise ValueError("compiled backend unavailable for this configuration")
    solver = CDCLSolver(cnf, config, observer)
    # a root-level conflict is decided before the first decision either way
    if backend != "python" and eligible and _kernel is not None and not solver.conflict_at_root:
        return _solve_compiled(solver)
    return solver.solve()


# --- absorption ------------------------------------------------------------------------


@dataclass
class AbsorptionReport:
    clause: Clause
    per_literal: dict[int, str]

    @property
    def absorbed(self) -> bool:
        return all(s.startswith("absorbed") for s in self.per_literal.values())

    def format(self) -> str:
        lines = [f"{lit}: {status}" for lit, status in self.per_literal.items()]
        lines.append(f"overall: {'absorbed (operational)' if self.absorbed else 'not absorbed'}")
        return "\n".join(lines)


def is_absorbed(db: Sequence[Sequence[int]], clause: Sequence[int], num_vars: int | None = None) -> AbsorptionReport:
    """Operational absorption test by unit propagation.

    For each literal l of the clause, the other literals are falsified one at
    a time as decisions (canonical order), propagating after each. The clause
    is absorbed at l if propagation satisfies l or runs into a conflict; a
    literal of the rest that propagation already satisfied also counts as
    absorbed, since no such round falsifies the rest of the clause.
    """
    c = make_clause(clause)
    if not c:
        raise ValueError("absorption is defined for non-empty clauses")
    if any(len(d) == 0 for d in db):
        raise ValueError("database contains the empty clause")
    if num_vars is None:
        num_vars = max([abs(lit) for d in db for lit in d] + [abs(lit) for lit in c])
    report: dict[int, str] = {}
    for l in c:
        eng = Engine(num_vars, db)
        if eng.propagate() >= 0:
            report[l] = "absorbed (no inconclusive round)"
            continue
        status = None
        for m in c:
            if m == l:
                continue
            val = eng.lit_value(m)
            if val is True:
                status = f"absorbed (literal {m} already satisfied)"
                break
            if val is False:
                continue
            eng.decide(-m)
            if eng.propagate() >= 0:
                status = "absorbed (conflict)"
                break
        if status is None:
            val = eng.lit_value(l)
            if val is True:
                status = "absorbed (implied)"
            elif val is None:
                status = "not absorbed (literal left unassigned)"
            else:
                status = "not absorbed (clause falsified)"
        report[l] = status
    return AbsorptionReport(c, report)
