"""CSP instances, partial assignments and a brute-force solution enumerator.

Relations are stored extensionally as sets of allowed tuples. Variable order
and domain order are fixed at construction and drive every deterministic
tie-break in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Hashable, Iterable, Iterator, Mapping

Var = Hashable
Value = Hashable
# canonical partial assignment: (variable, value) pairs in instance variable order
Assignment = tuple[tuple[Var, Value], ...]


class CspError(ValueError):
    """Raised for malformed instances or assignments."""


@dataclass(frozen=True)
class Constraint:
    scope: tuple[Var, ...]
    relation: frozenset[tuple[Value, ...]]

    def __init__(self, scope: Iterable[Var], relation: Iterable[Iterable[Value]]):
        object.__setattr__(self, "scope", tuple(scope))
        object.__setattr__(self, "relation", frozenset(tuple(t) for t in relation))

    @property
    def arity(self) -> int:
        return len(self.scope)


@dataclass(frozen=True)
class CspInstance:
    variables: tuple[Var, ...]
    domains: Mapping[Var, tuple[Value, ...]]
    constraints: tuple[Constraint, ...] = ()
    _var_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(
        self,
        variables: Iterable[Var],
        domains: Mapping[Var, Iterable[Value]],
        constraints: Iterable[Constraint] = (),
    ):
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "domains", {v: tuple(domains.get(v, ())) for v in self.variables})
        object.__setattr__(self, "constraints", tuple(constraints))
        object.__setattr__(self, "_var_index", {v: i for i, v in enumerate(self.variables)})

    def __hash__(self) -> int:
        return hash((self.variables, tuple(self.domains[v] for v in self.variables), self.constraints))

    def var_index(self, var: Var) -> int:
        try:
            return self._var_index[var]
        except KeyError:
            raise CspError(f"unknown variable: {var!r}") from None

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def max_domain_size(self) -> int:
        return max((len(d) for d in self.domains.values()), default=0)

    def with_constraint(self, constraint: Constraint) -> "CspInstance":
        return CspInstance(self.variables, self.domains, self.constraints + (constraint,))

    def canonical(self, f: Mapping[Var, Value] | Iterable[tuple[Var, Value]]) -> Assignment:
        """Return `f` as (variable, value) pairs sorted by instance variable order."""
        items = dict(f).items()
        for v, _ in items:
            self.var_index(v)
        return tuple(sorted(items, key=lambda kv: self._var_index[kv[0]]))


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: CspInstance) -> ValidationReport:
    violations = []
    if len(set(inst.variables)) != len(inst.variables):
        violations.append("duplicate variable names")
    for v in inst.variables:
        dom = inst.domains[v]
        if not dom:
            violations.append(f"empty domain: {v}")
        elif len(set(dom)) != len(dom):
            violations.append(f"duplicate domain values: {v}")
    known = set(inst.variables)
    for ci, c in enumerate(inst.constraints):
        if len(set(c.scope)) != len(c.scope):
            violations.append(f"constraint {ci}: repeated variable in scope")
        missing = [v for v in c.scope if v not in known]
        if missing:
            violations.append(f"constraint {ci}: unknown scope variables {missing}")
            continue
        doms = [set(inst.domains[v]) for v in c.scope]
        for t in sorted(c.relation, key=repr):
            if len(t) != c.arity:
                violations.append(f"constraint {ci}: tuple {t!r} has arity {len(t)}, scope has {c.arity}")
                continue
            bad = [x for x, d in zip(t, doms) if x not in d]
            if bad:
                violations.append(f"constraint {ci}: tuple {t!r} has out-of-domain value {bad[0]!r}")
    return ValidationReport(violations)


def require_valid(inst: CspInstance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise CspError("invalid instance: " + "; ".join(report.violations))


def _check_assignment(inst: CspInstance, f: Mapping[Var, Value]) -> None:
    for v, a in f.items():
        inst.var_index(v)
        if a not in inst.domains[v]:
            raise CspError(f"value {a!r} not in domain of {v!r}")


def is_partial_solution(inst: CspInstance, f: Mapping[Var, Value] | Iterable[tuple[Var, Value]]) -> bool:
    """True iff every constraint whose scope is fully bound by `f` is satisfied."""
    f = dict(f)
    _check_assignment(inst, f)
    for c in inst.constraints:
        if all(v in f for v in c.scope):
            if tuple(f[v] for v in c.scope) not in c.relation:
                return False
    return True


def extends(g: Mapping[Var, Value] | Iterable, f: Mapping[Var, Value] | Iterable) -> bool:
    g, f = dict(g), dict(f)
    return all(v in g and g[v] == a for v, a in f.items())


def restrict(f: Mapping[Var, Value] | Iterable, variables: Iterable[Var]) -> dict:
    f = dict(f)
    return {v: f[v] for v in variables if v in f}


def iter_solutions(inst: CspInstance) -> Iterator[dict]:
    """Yield all solutions in lexicographic order (variable order, then domain order).

    Exhaustive backtracking: a constraint is checked once its last scope
    variable (in instance order) is bound, so the output equals filtering the
    full Cartesian product.
    """
    require_valid(inst)
    order = inst.variables
    idx = {v: i for i, v in enumerate(order)}
    checks: list[list[Constraint]] = [[] for _ in order]
    for c in inst.constraints:
        if c.scope:
            checks[max(idx[v] for v in c.scope)].append(c)
        elif () not in c.relation:
            return
    values: dict = {}

    def rec(i: int) -> Iterator[dict]:
        if i == len(order):
            yield dict(values)
            return
        v = order[i]
        for a in inst.domains[v]:
            values[v] = a
            if all(tuple(values[u] for u in c.scope) in c.relation for c in checks[i]):
                yield from rec(i + 1)
        values.pop(v, None)

    yield from rec(0)


def enumerate_solutions(inst: CspInstance, limit: int | None = None) -> list[dict]:
    out = []
    if limit is not None and limit <= 0:
        return out
    for sol in iter_solutions(inst):
        out.append(sol)
        if limit is not None and len(out) >= limit:
            break
    return out


# --- JSON interchange -------------------------------------------------------


def instance_to_json(inst: CspInstance) -> dict[str, Any]:
    return {
        "variables": list(inst.variables),
        "domains": {str(v): list(inst.domains[v]) for v in inst.variables},
        "constraints": [
            {"scope": list(c.scope), "allowed": [list(t) for t in sorted(c.relation)]}
            for c in inst.constraints
        ],
    }


def instance_from_json(data: Mapping[str, Any]) -> CspInstance:
    try:
        variables = list(data["variables"])
        domains = {v: data["domains"][str(v)] for v in variables}
        constraints = [Constraint(c["scope"], c["allowed"]) for c in data.get("constraints", [])]
    except (KeyError, TypeError) as exc:
        raise CspError(f"malformed CSP JSON: {exc}") from exc
    return CspInstance(variables, domains, constraints)


def load_instance(path: str | Path) -> CspInstance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def save_instance(inst: CspInstance, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=1)
        fh.write("\n")


def ternary_example() -> CspInstance:
    """Ternary u <= v < w over D_u = D_v = {0,1}, D_w = {0,1,2}."""
    doms = {"u": (0, 1), "v": (0, 1), "w": (0, 1, 2)}
    allowed = [(a, b, c) for a in doms["u"] for b in doms["v"] for c in doms["w"] if a <= b < c]
    return CspInstance(["u", "v", "w"], doms, [Constraint(("u", "v", "w"), allowed)])


def ternary_example_decomposed() -> CspInstance:
    """The ternary example split into the binary constraints u <= v and v < w."""
    doms = {"u": (0, 1), "v": (0, 1), "w": (0, 1, 2)}
    le = [(a, b) for a in doms["u"] for b in doms["v"] if a <= b]
    lt = [(b, c) for b in doms["v"] for c in doms["w"] if b < c]
    return CspInstance(["u", "v", "w"], doms, [Constraint(("u", "v"), le), Constraint(("v", "w"), lt)])

