"""k-consistency closure, strategy checking and closure-guided solution search.

The closure is computed on an explicit set H of small partial solutions.
Internally an assignment is a tuple of (variable index, value index) pairs
sorted by variable index; results are translated back to instance terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .csp import (
    Assignment,
    Constraint,
    CspError,
    CspInstance,
    Var,
    is_partial_solution,
    require_valid,
)

Key = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class RemovalRecord:
    assignment: Assignment
    blocked_on: Var
    # the assignment whose blocking triggered this removal (itself for a direct removal)
    root: Assignment

    def format(self) -> str:
        bindings = ", ".join(f"{v}:{a}" for v, a in self.assignment)
        return f"REMOVE {{{bindings}}} BLOCKED-ON {self.blocked_on}"


@dataclass
class ClosureResult:
    k: int
    surviving: frozenset[Assignment]
    removal_trace: list[RemovalRecord] = field(default_factory=list)
    iterations: int = 0

    @property
    def empty(self) -> bool:
        return not self.surviving


class _Closure:
    """Mutable working state for one closure computation."""

    def __init__(self, inst: CspInstance, k: int):
        self.inst = inst
        self.k = k
        self.n = inst.n
        self.doms = [inst.domains[v] for v in inst.variables]
        self.max_size = min(k + 1, self.n)
        # constraints in index terms, grouped by their highest-index scope variable
        vidx = {v: i for i, v in enumerate(inst.variables)}
        self.by_last: list[list[tuple[tuple[int, ...], set]]] = [[] for _ in range(self.n)]
        self.nullary_ok = True
        for c in inst.constraints:
            scope = tuple(vidx[v] for v in c.scope)
            if not scope:
                self.nullary_ok = () in c.relation
                continue
            vpos = [{a: j for j, a in enumerate(self.doms[s])} for s in scope]
            rel = {tuple(p[x] for p, x in zip(vpos, t)) for t in c.relation}
            self.by_last[max(scope)].append((scope, rel))
        # constraints touching each variable, for checking one-variable extensions
        self.touching: list[list[tuple[tuple[int, ...], set]]] = [[] for _ in range(self.n)]
        for group in self.by_last:
            for scope, rel in group:
                for s in scope:
                    self.touching[s].append((scope, rel))

    def _extension_ok(self, f: dict[int, int], v: int) -> bool:
        for scope, rel in self.touching[v]:
            if all(s in f for s in scope) and tuple(f[s] for s in scope) not in rel:
                return False
        return True

    def initial_h(self) -> set[Key]:
        """All partial solutions with at most k+1 bound variables."""
        if not self.nullary_ok:
            return set()
        h: set[Key] = {()}
        frontier: list[Key] = [()]
        for _ in range(self.max_size):
            nxt = []
            for f in frontier:
                start = f[-1][0] + 1 if f else 0
                fd = dict(f)
                for v in range(start, self.n):
                    for a in range(len(self.doms[v])):
                        fd[v] = a
                        if self._extension_ok(fd, v):
                            g = f + ((v, a),)
                            h.add(g)
                            nxt.append(g)
                    fd.pop(v, None)
            frontier = nxt
        return h

    def to_assignment(self, f: Key) -> Assignment:
        vs = self.inst.variables
        return tuple((vs[v], self.doms[v][a]) for v, a in f)


def k_consistency_closure(
    inst: CspInstance, k: int, *, order_seed: int | None = None, trace: bool = True
) -> ClosureResult:
    """Compute the k-consistency closure of `inst`.

    Starting from every partial solution on at most k+1 variables, an
    assignment f on at most k variables is removed (with all of its
    extensions) whenever some variable v has no extension of f in H that
    binds v. Because H stays closed under restriction, it suffices to track
    one-variable extensions: a counter per (f, v) holds the number of values
    of v that extend f inside H.

    `order_seed` shuffles the processing order; the fixpoint does not depend
    on it.
    """
    if not isinstance(k, int) or k < 1:
        raise CspError(f"k must be a positive integer, got {k!r}")
    require_valid(inst)
    st = _Closure(inst, k)
    h = st.initial_h()
    rng = random.Random(order_seed) if order_seed is not None else None

    children: dict[Key, list[Key]] = {f: [] for f in h}
    support: dict[Key, list[int]] = {}
    for f in h:
        if len(f) <= k:
            support[f] = [0] * st.n
    for g in h:
        for i, (u, _) in enumerate(g):
            p = g[:i] + g[i + 1 :]
            children[p].append(g)
            if p in support:
                support[p][u] += 1

    alive = set(h)
    result = ClosureResult(k=k, surviving=frozenset())

    def blocked(f: Key) -> list[tuple[Key, int]]:
        bound = {v for v, _ in f}
        return [(f, v) for v in range(st.n) if v not in bound and support[f][v] == 0]

    wave = [item for f in sorted(support) for item in blocked(f)]
    while wave:
        if rng is not None:
            rng.shuffle(wave)
        nxt: list[tuple[Key, int]] = []
        removed_any = False
        for root, v in wave:
            if root not in alive:
                continue
            removed_any = True
            blocker = inst.variables[v]
            root_a = st.to_assignment(root) if trace else ()
            stack = [root]
            while stack:
                g = stack.pop()
                if g not in alive:
                    continue
                alive.discard(g)
                if trace:
                    result.removal_trace.append(RemovalRecord(st.to_assignment(g), blocker, root_a))
                stack.extend(c for c in children[g] if c in alive)
                for i, (u, _) in enumerate(g):
                    p = g[:i] + g[i + 1 :]
                    if p in alive and p in support:
                        cnt = support[p]
                        cnt[u] -= 1
                        if cnt[u] == 0:
                            nxt.append((p, u))
        if removed_any:
            result.iterations += 1
        wave = nxt

    result.surviving = frozenset(st.to_assignment(f) for f in alive)
    return result


# --- strategies ---------------------------------------------------------------


@dataclass
class StrategyCheckReport:
    ok: bool
    violated_condition: str | None = None
    witness: object = None


def is_strategy(
    inst: CspInstance, family: Iterable[Mapping[Var, object] | Assignment], k: int
) -> StrategyCheckReport:
    """Check the three strategy conditions for a family of partial solutions.

    Conditions are tested in the order non-empty, size-bound (with
    membership as a partial solution), downward-closure, extension.
    """
    members = {inst.canonical(f) for f in family}
    if not members:
        return StrategyCheckReport(False, "non-empty")
    for f in sorted(members, key=len):
        if len(f) > k + 1:
            return StrategyCheckReport(False, "size-bound", f)
        if not is_partial_solution(inst, f):
            return StrategyCheckReport(False, "partial-solution", f)
    for f in sorted(members, key=len):
        for i in range(len(f)):
            p = f[:i] + f[i + 1 :]
            if p not in members:
                return StrategyCheckReport(False, "downward-closure", (f, p))
    for f in sorted(members, key=len):
        if len(f) > k:
            continue
        bound = {v for v, _ in f}
        for v in inst.variables:
            if v in bound:
                continue
            if not any(inst.canonical(dict(f) | {v: a}) in members for a in inst.domains[v]):
                return StrategyCheckReport(False, "extension", (f, v))
    return StrategyCheckReport(True)


# --- solution construction ------------------------------------------------------


@dataclass
class ClosureSolveOutcome:
    status: str  # "solution" | "closure-empty" | "inconclusive"
    assignment: dict = field(default_factory=dict)
    stuck_on: Var | None = None


def solve_via_closure(inst: CspInstance, k: int) -> ClosureSolveOutcome:
    """Fix variables one at a time, keeping the first value whose closure stays non-empty."""
    if k_consistency_closure(inst, k, trace=False).empty:
        return ClosureSolveOutcome("closure-empty")
    current = inst
    fixed: dict = {}
    for v in inst.variables:
        for a in inst.domains[v]:
            trial = current.with_constraint(Constraint((v,), [(a,)]))
            if not k_consistency_closure(trial, k, trace=False).empty:
                current = trial
                fixed[v] = a
                break
        else:
            return ClosureSolveOutcome("inconclusive", fixed, stuck_on=v)
    violated = [c for c in inst.constraints if tuple(fixed[v] for v in c.scope) not in c.relation]
    if violated:
        # a closure over k+1 variables cannot see a wider constraint; anything narrower is a defect
        if any(c.arity <= k + 1 for c in violated):
            raise AssertionError(f"closure-guided construction produced a non-solution: {fixed}")
        return ClosureSolveOutcome("inconclusive", fixed, stuck_on=violated[0].scope[-1])
    return ClosureSolveOutcome("solution", fixed)
