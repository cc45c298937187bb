"""Sparse CNF encodings of CSP instances and DIMACS I/O.

Literals are DIMACS integers: Boolean variable ``b`` is ``b`` (true) or
``-b`` (false). A clause is a tuple of literals without duplicates, sorted by
variable index; tautologies are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping

from .csp import Assignment, CspInstance, Var, Value, require_valid

Literal = int
Clause = tuple[int, ...]

TAG_ALO = "at-least-one"
TAG_AMO = "at-most-one"
TAG_NOGOOD = "no-good"
TAG_SUPPORT = "support"
TAG_LEARNED = "learned"
TAG_DERIVED = "derived"


class EncodingError(ValueError):
    pass


class DimacsError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class DecodeError(ValueError):
    pass


def make_clause(lits: Iterable[int]) -> Clause:
    """Canonical clause from literals; merges duplicates, rejects tautologies and 0."""
    s = set(lits)
    if 0 in s:
        raise ValueError("0 is not a literal")
    for lit in s:
        if -lit in s:
            raise ValueError(f"tautological clause (contains {abs(lit)} and {-abs(lit)})")
    return tuple(sorted(s, key=abs))


def is_negative(c: Clause) -> bool:
    return all(lit < 0 for lit in c)


def is_positive(c: Clause) -> bool:
    return all(lit > 0 for lit in c)


def format_clause(c: Clause) -> str:
    return " ".join(map(str, c)) if c else "[]"


@dataclass(frozen=True)
class VarMap:
    """Bijection between Boolean variables 1..N and (CSP variable, value) pairs."""

    pairs: tuple[tuple[Var, Value], ...]
    index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        idx = {p: i + 1 for i, p in enumerate(self.pairs)}
        if len(idx) != len(self.pairs):
            raise ValueError("VarMap pairs must be distinct")
        object.__setattr__(self, "index", idx)

    @classmethod
    def for_instance(cls, inst: CspInstance) -> "VarMap":
        return cls(tuple((v, a) for v in inst.variables for a in inst.domains[v]))

    def __len__(self) -> int:
        return len(self.pairs)

    def var(self, v: Var, a: Value) -> int:
        return self.index[(v, a)]

    def pair(self, b: int) -> tuple[Var, Value]:
        return self.pairs[b - 1]

    def csp_variables(self) -> list[Var]:
        seen: dict = {}
        for v, _ in self.pairs:
            seen.setdefault(v, None)
        return list(seen)

    def literal_name(self, lit: int) -> str:
        v, a = self.pair(abs(lit))
        return f"{'' if lit > 0 else '~'}x[{v},{a}]"


@dataclass
class CnfFormula:
    clauses: list[Clause]
    num_vars: int
    tags: list[str] | None = field(default=None, compare=False)
    varmap: VarMap | None = None

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
        if self.tags is not None and len(self.tags) != len(self.clauses):
            raise ValueError("tags must align with clauses")

    def __len__(self) -> int:
        return len(self.clauses)

    def tagged(self, tag: str) -> list[Clause]:
        if self.tags is None:
            return []
        return [c for c, t in zip(self.clauses, self.tags) if t == tag]

    def assignment_clause(self, f: Iterable[tuple[Var, Value]]) -> Clause:
        """The no-good clause forbidding the partial assignment `f`."""
        assert self.varmap is not None
        return make_clause(-self.varmap.var(v, a) for v, a in f)


class _Builder:
    def __init__(self, varmap: VarMap):
        self.varmap = varmap
        self.clauses: list[Clause] = []
        self.tags: list[str] = []
        self._seen: set[Clause] = set()

    def add(self, lits: Iterable[int], tag: str) -> None:
        c = make_clause(lits)
        if c in self._seen:
            return
        self._seen.add(c)
        self.clauses.append(c)
        self.tags.append(tag)

    def formula(self) -> CnfFormula:
        return CnfFormula(self.clauses, len(self.varmap), self.tags, self.varmap)


def _domain_clauses(inst: CspInstance, b: _Builder, at_most_one: bool) -> None:
    vm = b.varmap
    for v in inst.variables:
        b.add((vm.var(v, a) for a in inst.domains[v]), TAG_ALO)
    if at_most_one:
        for v in inst.variables:
            for a, c in combinations(inst.domains[v], 2):
                b.add((-vm.var(v, a), -vm.var(v, c)), TAG_AMO)


def direct_encode(inst: CspInstance, include_at_most_one: bool = True) -> tuple[CnfFormula, VarMap]:
    """Direct encoding: one no-good per disallowed tuple of each constraint scope."""
    require_valid(inst)
    vm = VarMap.for_instance(inst)
    b = _Builder(vm)
    _domain_clauses(inst, b, include_at_most_one)
    for con in inst.constraints:
        doms = [inst.domains[v] for v in con.scope]
        for t in product(*doms):
            if t not in con.relation:
                b.add((-vm.var(v, a) for v, a in zip(con.scope, t)), TAG_NOGOOD)
    return b.formula(), vm


def negative_sparse_encode(
    inst: CspInstance,
    nogoods: Iterable[Iterable[tuple[Var, Value]] | Mapping[Var, Value]],
    include_at_most_one: bool = False,
) -> tuple[CnfFormula, VarMap]:
    """At-least-one clauses plus caller-supplied purely negative no-goods.

    Each no-good is a partial assignment; it becomes the clause of its negated
    literals. Optional at-most-one clauses are also purely negative, so the
    result is a negative sparse encoding either way.
    """
    require_valid(inst)
    vm = VarMap.for_instance(inst)
    b = _Builder(vm)
    _domain_clauses(inst, b, include_at_most_one)
    for f in nogoods:
        items = f.items() if isinstance(f, Mapping) else f
        b.add((-vm.var(v, a) for v, a in items), TAG_NOGOOD)
    return b.formula(), vm


def support_encode(inst: CspInstance, include_at_most_one: bool = True) -> tuple[CnfFormula, VarMap]:
    """Support encoding of a binary instance, emitting both directions per scope."""
    require_valid(inst)
    for i, con in enumerate(inst.constraints):
        if con.arity != 2:
            raise EncodingError(
                f"support encoding is defined for binary CSP instances only (constraint {i} has arity {con.arity})"
            )
    vm = VarMap.for_instance(inst)
    b = _Builder(vm)
    _domain_clauses(inst, b, include_at_most_one)
    for con in inst.constraints:
        v, w = con.scope
        for src, dst, pos in ((v, w, 0), (w, v, 1)):
            for i in inst.domains[src]:
                compatible = [
                    j for j in inst.domains[dst] if ((i, j) if pos == 0 else (j, i)) in con.relation
                ]
                b.add([-vm.var(src, i)] + [vm.var(dst, j) for j in compatible], TAG_SUPPORT)
    return b.formula(), vm


def encode(inst: CspInstance, encoding: str) -> tuple[CnfFormula, VarMap]:
    if encoding == "direct":
        return direct_encode(inst, True)
    if encoding == "direct-no-amo":
        return direct_encode(inst, False)
    if encoding == "support":
        return support_encode(inst, True)
    raise ValueError(f"unknown encoding {encoding!r}")


def direct_clause_count(inst: CspInstance, include_at_most_one: bool = True) -> int:
    """Clause count of the direct encoding by formula, without building it.

    Assumes no two constraints produce the same no-good.
    """
    total = inst.n
    if include_at_most_one:
        total += sum(len(d) * (len(d) - 1) // 2 for d in inst.domains.values())
    for con in inst.constraints:
        size = 1
        for v in con.scope:
            size *= len(inst.domains[v])
        total += size - len(con.relation)
    return total


def decode_model(varmap: VarMap, model: Mapping[int, bool] | Iterable[int]) -> dict:
    """Read a CSP assignment off a total Boolean model.

    When several values of a variable are true, the first in domain order
    wins. A variable with no true value raises DecodeError.
    """
    if isinstance(model, Mapping):
        truth = {b: bool(val) for b, val in model.items()}
    else:
        truth = {abs(lit): lit > 0 for lit in model}
    missing = [b for b in range(1, len(varmap) + 1) if b not in truth]
    if missing:
        raise DecodeError(f"model does not assign Boolean variable {missing[0]}")
    out: dict = {}
    for b, (v, a) in enumerate(varmap.pairs, start=1):
        if truth[b] and v not in out:
            out[v] = a
    for v in varmap.csp_variables():
        if v not in out:
            raise DecodeError(f"no value is true for variable {v}")
    return out


def assignment_literals(varmap: VarMap, f: Assignment | Mapping) -> list[int]:
    items = f.items() if isinstance(f, Mapping) else f
    return [varmap.var(v, a) for v, a in items]


# --- DIMACS -----------------------------------------------------------------------


def _token(x) -> str:
    s = x if isinstance(x, str) else json.dumps(x)
    if not s or any(ch.isspace() for ch in s):
        raise ValueError(f"cannot write {x!r} in a DIMACS map comment")
    return s


def _untoken(s: str):
    try:
        val = json.loads(s)
    except ValueError:
        return s
    return val if isinstance(val, (int, float, bool)) or val is None else s


def write_dimacs(cnf: CnfFormula) -> str:
    lines = []
    if cnf.varmap is not None:
        for b, (v, a) in enumerate(cnf.varmap.pairs, start=1):
            lines.append(f"c map {b} {_token(v)} {_token(a)}")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for c in cnf.clauses:
        lines.append(" ".join(map(str, c)) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header: tuple[int, int] | None = None
    pairs: dict[int, tuple] = {}
    clauses: list[Clause] = []
    current: list[int] = []
    current_line = 0
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 5 and parts[1] == "map":
                try:
                    pairs[int(parts[2])] = (_untoken(parts[3]), _untoken(parts[4]))
                except ValueError:
                    raise DimacsError("malformed map comment", lineno) from None
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"malformed header {line!r}", lineno)
            continue
        if line.startswith("%"):
            break
        if header is None:
            raise DimacsError("clause before header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                try:
                    clauses.append(make_clause(current))
                except ValueError as exc:
                    raise DimacsError(str(exc), current_line or lineno) from None
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} out of range 1..{header[0]}", lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if header is None:
        raise DimacsError("missing header", last_line or 1)
    if current:
        raise DimacsError("missing clause terminator 0", current_line)
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}", last_line)
    varmap = None
    if pairs:
        if sorted(pairs) != list(range(1, header[0] + 1)):
            raise DimacsError("map comments do not cover every variable", last_line)
        varmap = VarMap(tuple(pairs[b] for b in range(1, header[0] + 1)))
    return CnfFormula(clauses, header[0], None, varmap)


def read_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def save_dimacs(cnf: CnfFormula, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_dimacs(cnf))

