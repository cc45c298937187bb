"""Negative-hyper-resolution: the rule, width-bounded saturation, and bounds.

A step takes a nucleus ``C0 v x1 v ... v xr`` (C0 purely negative) and one
purely negative side clause ``Ci v ~xi`` per positive literal, and derives
``C0 v C1 v ... v Cr``.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .encode import Clause, CnfFormula, format_clause, is_negative, is_positive, make_clause


class RuleViolation(ValueError):
    def __init__(self, msg: str, clause: Clause | None = None):
        self.clause = clause
        super().__init__(msg if clause is None else f"{msg}: {format_clause(clause)}")


class ShapeError(ValueError):
    pass


def negative_hyper_resolve(nucleus: Clause, side_clauses: Sequence[Clause]) -> Clause:
    """Apply the rule once.

    ``side_clauses[i]`` is matched to the i-th positive literal of the nucleus
    in canonical (variable) order and must contain its negation.
    """
    nucleus = make_clause(nucleus)
    pivots = [lit for lit in nucleus if lit > 0]
    if not pivots:
        raise RuleViolation("nucleus has no positive literal", nucleus)
    if len(side_clauses) != len(pivots):
        raise RuleViolation(f"expected {len(pivots)} side clauses, got {len(side_clauses)}", nucleus)
    out = {lit for lit in nucleus if lit < 0}
    for x, side in zip(pivots, side_clauses):
        side = make_clause(side)
        if not is_negative(side):
            raise RuleViolation("side clause has a positive literal", side)
        if -x not in side:
            raise RuleViolation(f"side clause does not contain pivot {-x}", side)
        out.update(lit for lit in side if lit != -x)
    return make_clause(out)


@dataclass(frozen=True)
class NhrStep:
    nucleus: Clause
    side_clauses: tuple[Clause, ...]
    resolvent: Clause

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(lit for lit in self.nucleus if lit > 0)


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[NhrStep, ...]

    @property
    def width(self) -> int:
        return max((len(s.resolvent) for s in self.steps), default=0)

    @property
    def refutation(self) -> bool:
        return bool(self.steps) and not self.steps[-1].resolvent

    def format(self, clause_ids: dict[Clause, int] | None = None) -> str:
        """One line per step; side clauses shown by id when `clause_ids` is given."""
        lines = []
        for i, s in enumerate(self.steps, start=1):
            if clause_ids is not None:
                sides = ", ".join(str(clause_ids.get(c, "?")) for c in s.side_clauses)
            else:
                sides = ", ".join(format_clause(c) for c in s.side_clauses)
            lines.append(
                f"STEP {i}: nucleus={format_clause(s.nucleus)} sides=[{sides}] resolvent={format_clause(s.resolvent)}"
            )
        return "\n".join(lines)


def check_trace(inputs: Iterable[Clause], trace: DerivationTrace) -> None:
    """Re-verify every step of a trace against the inputs; raises RuleViolation."""
    available = {make_clause(c) for c in inputs}
    for s in trace.steps:
        if s.nucleus not in available:
            raise RuleViolation("nucleus is neither an input nor derived earlier", s.nucleus)
        for side in s.side_clauses:
            if side not in available:
                raise RuleViolation("side clause is neither an input nor derived earlier", side)
        if negative_hyper_resolve(s.nucleus, s.side_clauses) != s.resolvent:
            raise RuleViolation("recorded resolvent does not match the rule", s.resolvent)
        available.add(s.resolvent)


@dataclass
class NhrOutcome:
    refuted: bool
    k: int
    trace: DerivationTrace | None = None
    # every derived clause (width <= k), in derivation order
    derived: list[Clause] = field(default_factory=list)

    @property
    def saturated(self) -> bool:
        return not self.refuted


def check_shape(cnf: CnfFormula | Sequence[Clause], strict: bool = False) -> None:
    """Reject clauses that cannot take part in negative-hyper-resolution.

    Every non-tautological clause is a legal nucleus or side clause, so the
    lenient check only re-validates clause form. With ``strict`` the formula
    must be a negative sparse encoding: every clause purely positive or
    purely negative.
    """
    clauses = cnf.clauses if isinstance(cnf, CnfFormula) else cnf
    for c in clauses:
        try:
            canon = make_clause(c)
        except ValueError as exc:
            raise ShapeError(f"{exc}: {c}") from None
        if strict and not (is_negative(canon) or is_positive(canon)):
            raise ShapeError(f"clause is neither purely positive nor purely negative: {format_clause(canon)}")


def refute_width_k(
    cnf: CnfFormula | Sequence[Clause],
    k: int,
    *,
    stop_on_empty: bool = True,
    strict: bool = False,
    order_seed: int | None = None,
) -> NhrOutcome:
    """Saturate under negative-hyper-resolution keeping derived clauses of size <= k.

    Complete for width-k refutations: the space of negative clauses with at
    most k literals is finite and every combination of side clauses is tried
    once, at the moment its last member becomes available. Input clauses of
    any size may serve as side clauses; only derived clauses are bounded.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    check_shape(cnf, strict)
    inputs = [make_clause(c) for c in (cnf.clauses if isinstance(cnf, CnfFormula) else cnf)]
    out = NhrOutcome(refuted=False, k=k)
    if any(not c for c in inputs):
        out.refuted = True
        out.trace = DerivationTrace(())
        return out

    rng = random.Random(order_seed) if order_seed is not None else None
    nuclei: list[tuple[Clause, frozenset, tuple[int, ...]]] = []
    for c in inputs:
        pos = tuple(lit for lit in c if lit > 0)
        if pos:
            c0 = frozenset(lit for lit in c if lit < 0)
            if len(c0) <= k:
                nuclei.append((c, c0, pos))
    if rng is not None:
        rng.shuffle(nuclei)
    by_pivot: dict[int, list[int]] = {}
    for ni, (_, _, pos) in enumerate(nuclei):
        for x in pos:
            by_pivot.setdefault(x, []).append(ni)

    # remainders of negative clauses, per pivot variable x (clause minus ~x)
    sides: dict[int, list[frozenset]] = {x: [] for x in by_pivot}
    side_seen: dict[int, set[frozenset]] = {x: set() for x in by_pivot}
    known: set[frozenset] = set()
    steps: dict[frozenset, NhrStep] = {}
    order: list[frozenset] = []
    queue: deque[frozenset] = deque()

    def register(clause: frozenset) -> list[tuple[int, frozenset]]:
        fresh = []
        for lit in clause:
            x = -lit
            if x in sides:
                rem = clause - {lit}
                if len(rem) <= k and rem not in side_seen[x]:
                    side_seen[x].add(rem)
                    sides[x].append(rem)
                    fresh.append((x, rem))
        return fresh

    for c in inputs:
        if is_negative(c):
            fc = frozenset(c)
            known.add(fc)
            register(fc)

    empty = frozenset()

    def combos(ni: int, fixed: tuple[int, frozenset] | None):
        nucleus, c0, pos = nuclei[ni]
        pools = []
        for x in pos:
            if fixed is not None and x == fixed[0]:
                pools.append((x, [fixed[1]]))
            else:
                pools.append((x, sides[x]))
        if any(not p for _, p in pools):
            return
        pools.sort(key=lambda xp: len(xp[1]))
        chosen: list[frozenset] = [empty] * len(pools)

        def dfs(i: int, acc: frozenset):
            if i == len(pools):
                yield acc, tuple(chosen)
                return
            for rem in pools[i][1]:
                nxt = acc | rem
                if len(nxt) <= k:
                    chosen[i] = rem
                    yield from dfs(i + 1, nxt)

        for acc, rems in dfs(0, c0):
            picked = {x: r for (x, _), r in zip(pools, rems)}
            yield acc, picked

    def derive(ni: int, fixed) -> bool:
        nucleus, _, pos = nuclei[ni]
        hit = False
        for res, picked in combos(ni, fixed):
            if res in known:
                continue
            known.add(res)
            side_cl = tuple(make_clause(picked[x] | {-x}) for x in pos)
            steps[res] = NhrStep(nucleus, side_cl, make_clause(res))
            order.append(res)
            if not res:
                hit = True
                if stop_on_empty:
                    return True
                continue
            queue.append(res)
        return hit

    def run() -> bool:
        # returns early only when the empty clause is found and stop_on_empty is set
        found = False
        for ni in range(len(nuclei)):
            found = derive(ni, None) or found
            if found and stop_on_empty:
                return True
        while queue:
            clause = queue.popleft()
            for x, rem in register(clause):
                for ni in by_pivot[x]:
                    found = derive(ni, (x, rem)) or found
                    if found and stop_on_empty:
                        return True
        return found

    run()

    out.derived = [make_clause(c) for c in order]
    if empty in steps:
        out.refuted = True
        out.trace = _extract(empty, steps, order)
    return out


def _extract(target: frozenset, steps: dict[frozenset, NhrStep], order: list[frozenset]) -> DerivationTrace:
    """The sub-derivation of `target`, in derivation order."""
    pos = {c: i for i, c in enumerate(order)}
    need: set[frozenset] = set()
    stack = [target]
    while stack:
        c = stack.pop()
        if c in need or c not in steps:
            continue
        need.add(c)
        for side in steps[c].side_clauses:
            fs = frozenset(side)
            if fs in steps:
                stack.append(fs)
    return DerivationTrace(tuple(steps[c] for c in sorted(need, key=pos.__getitem__)))


@dataclass(frozen=True)
class ResolutionStep:
    """Binary resolution of `left` (contains +pivot) with `right` (contains -pivot).

    Clauses here are sorted literal tuples that may be tautological: an
    intermediate can hold a pending pivot next to its negation.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]
    pivot: int
    resolvent: tuple[int, ...]


def _lits(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(s), key=lambda lit: (abs(lit), lit)))


def expand_to_resolution(step: NhrStep) -> list[ResolutionStep]:
    """Replay a hyper-step as binary resolutions, highest pivot first."""
    pivots = list(step.pivots)
    sides = dict(zip(pivots, step.side_clauses))
    current = set(step.nucleus)
    out = []
    for x in reversed(pivots):
        side = sides[x]
        nxt = (current - {x}) | (set(side) - {-x})
        out.append(ResolutionStep(_lits(current), _lits(side), x, _lits(nxt)))
        current = nxt
    final = _lits(current)
    if final != _lits(step.resolvent):
        raise AssertionError(f"expansion ended at {final}, expected {step.resolvent}")
    limit = len(step.resolvent) + len(pivots) - 1
    for rs in out[:-1]:
        if len(rs.resolvent) > limit:
            raise AssertionError(f"intermediate clause of size {len(rs.resolvent)} exceeds {limit}")
    return out


@dataclass(frozen=True)
class BoundsReport:
    n: int
    d: int
    k: int
    m: int
    thm2: int
    thm3: int
    thm3_halfprob: int
    thm4: int

    def format(self) -> str:
        return (
            f"n={self.n} d={self.d} k={self.k} m={self.m}\n"
            f"restarts (any asserting scheme) < {self.thm2}\n"
            f"restarts (DECISION scheme) < {self.thm3}\n"
            f"restarts (DECISION, success prob > 1/2) <= {self.thm3_halfprob}\n"
            f"restarts (DECISION, from k-consistency) <= {self.thm4}"
        )


def nogood_count_bound(n: int, d: int, k: int) -> int:
    """Number of possible no-goods on at most k of n variables with domain size d."""
    return sum(d**i * math.comb(n, i) for i in range(1, k + 1))


def theoretical_bounds(n: int, d: int, k: int, m: int) -> BoundsReport:
    """Restart bounds with exact integer arithmetic.

    thm2 = m n k^2 C(n,k); thm3 = m C(n,k); thm3_halfprob = (m + ceil(sqrt m)) C(n,k);
    thm4 = (sum_{i<=k} d^i C(n,i)) C(nd, k).
    """
    for name, val in (("n", n), ("d", d), ("k", k), ("m", m)):
        if val < 1:
            raise ValueError(f"{name} must be >= 1, got {val}")
    cnk = math.comb(n, k)
    root = math.isqrt(m)
    ceil_root = root if root * root == m else root + 1
    return BoundsReport(
        n=n,
        d=d,
        k=k,
        m=m,
        thm2=m * n * k * k * cnk,
        thm3=m * cnk,
        thm3_halfprob=(m + ceil_root) * cnk,
        thm4=nogood_count_bound(n, d, k) * math.comb(n * d, k),
    )
