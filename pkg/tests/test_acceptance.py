"""Acceptance checks, one test per criterion.

Each test prints a single ``PASS`` / ``FAIL`` line with the measured value and
its tolerance; the lines are repeated in the pytest terminal summary.
"""

from __future__ import annotations

import functools
import random
import statistics
import time

from localsat.bench import ChainSpec, generate_chain, loglog_slope, overlay_growth, scheme_config
from localsat.cdcl import LearningScheme, RestartPolicy, SolverConfig, is_absorbed, propagate, solve
from localsat.consistency import k_consistency_closure
from localsat.csp import Constraint, CspInstance, ternary_example_decomposed, ternary_example
from localsat.encode import TAG_ALO, TAG_AMO, TAG_NOGOOD, CnfFormula, direct_encode, make_clause, support_encode
from localsat.hyperres import negative_hyper_resolve, refute_width_k
from localsat.reference import MINISAT_LIKE_RESTARTS, SCHEME_RESTARTS
from oracles import random_cnf, random_csp, sat_oracle, satisfies

REPORT: list[str] = []


def report(num: int, name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} [{num}] {name}: {detail}"
    REPORT.append(line)
    print(line)
    assert ok, line


class LearnChecker:
    """Observer recording learnt clauses that break the structural rules."""

    def __init__(self, decision_only: bool = False):
        self.decision_only = decision_only
        self.checked = 0
        self.violations: list[str] = []

    def __call__(self, ev):
        self.checked += 1
        top = [l for l, lv in zip(ev.learned, ev.literal_levels) if lv == ev.conflict_level]
        if len(top) != 1 or ev.learned[0] != top[0]:
            self.violations.append(f"not asserting: {ev.learned}")
        if self.decision_only and not set(ev.learned) <= {-d for d in ev.decisions}:
            self.violations.append(f"non-decision literal in {ev.learned}")


# --- 1, 2: generator and encoding sizes -----------------------------------------------


def test_c1_direct_clause_counts():
    t0 = time.perf_counter()
    bad = []
    for (w, d), (_, clauses, _, _) in sorted(SCHEME_RESTARTS.items()):
        cnf, _ = direct_encode(generate_chain(ChainSpec(w, d)))
        if len(cnf) != clauses:
            bad.append(f"({w},{d}) {len(cnf)} != {clauses}")
    dt = time.perf_counter() - t0
    report(1, "direct-encoding clause counts", not bad and dt < 60,
           f"{len(SCHEME_RESTARTS) - len(bad)}/{len(SCHEME_RESTARTS)} rows exact, {dt:.1f}s (limit 60s) {' '.join(bad)}")


def test_c2_variable_counts():
    t0 = time.perf_counter()
    bad = []
    for (w, d), (n, *_rest) in sorted(MINISAT_LIKE_RESTARTS.items()):
        spec = ChainSpec(w, d)
        if spec.n != n or ((d - 1) * w + 2) * w != n:
            bad.append(f"({w},{d})")
    dt = time.perf_counter() - t0
    # the generated instances agree with the formula (outside the timed part)
    for (w, d), (n, *_rest) in sorted(MINISAT_LIKE_RESTARTS.items()):
        if generate_chain(ChainSpec(w, d)).n != n:
            bad.append(f"generated ({w},{d})")
    report(2, "chain variable counts", not bad and dt < 1,
           f"{len(MINISAT_LIKE_RESTARTS) - len(bad)}/{len(MINISAT_LIKE_RESTARTS)} rows exact, {dt * 1000:.2f}ms (limit 1s)")


# --- 3: worked encodings -----------------------------------------------------------------


def test_c3_worked_example_clauses():
    u0, u1, v0, v1, w0, w1, w2 = range(1, 8)
    cnf, vm = direct_encode(ternary_example())
    alo_ok = cnf.tagged(TAG_ALO) == [(u0, u1), (v0, v1), (w0, w1, w2)]
    amo_ok = cnf.tagged(TAG_AMO) == [(-u0, -u1), (-v0, -v1), (-w0, -w1), (-w0, -w2), (-w1, -w2)]
    nogoods = {
        (-u0, -v0, -w0), (-u0, -v1, -w0), (-u0, -v1, -w1), (-u1, -v0, -w0),
        (-u1, -v0, -w1), (-u1, -v0, -w2), (-u1, -v1, -w0), (-u1, -v1, -w1),
    }
    ng_ok = sorted(cnf.tagged(TAG_NOGOOD)) == sorted(nogoods)
    sup, _ = support_encode(ternary_example_decomposed())
    expected = {make_clause(c) for c in [
        (-u0, v0, v1), (-u1, v1), (-v0, u0), (-v1, u0, u1),
        (-v0, w1, w2), (-v1, w2), (-w0,), (-w1, v0), (-w2, v0, v1),
    ]}
    got = sup.tagged("support")
    sup_ok = set(got) == expected and len(got) == 9 and (-w0,) in got
    report(3, "worked-example clauses", alo_ok and amo_ok and ng_ok and sup_ok and len(vm) == 7,
           f"at-least-one={alo_ok} at-most-one={amo_ok} no-goods={ng_ok} support(9, unit ~x_w0)={sup_ok}")


# --- 4: closure vs width-k refutation ------------------------------------------------------


def test_c4_closure_refutation_equivalence():
    rng = random.Random(2024)
    instances = [random_csp(rng, n_max=5, d_max=3, max_constraints=6, arity_max=3) for _ in range(500)]
    disagreements = []
    empties = 0
    for i, inst in enumerate(instances):
        for k in (1, 2, 3):
            empty = k_consistency_closure(inst, k, trace=False).empty
            empties += empty
            for amo in (True, False):
                cnf, _ = direct_encode(inst, include_at_most_one=amo)
                if refute_width_k(cnf, k).refuted != empty:
                    disagreements.append((i, k, amo))
    report(4, "closure empty <=> width-k refutation", not disagreements,
           f"{len(instances)} instances x k=1,2,3 x (with/without at-most-one), "
           f"{empties} empty closures, {len(disagreements)} disagreements (limit 0)")


# --- 5: solver against oracles -------------------------------------------------------------------


def _configs():
    for scheme in (LearningScheme.ONE_UIP, LearningScheme.DECISION):
        for policy in (RestartPolicy.EVERY_CONFLICT, RestartPolicy.NEVER):
            yield scheme, policy


def test_c5_solver_matches_oracle():
    rng = random.Random(77)
    wrong = []
    counts = {"SAT": 0, "UNSAT": 0}
    runs = 0
    for i in range(1000):
        n, clauses = random_cnf(rng, n_max=30)
        cnf = CnfFormula(clauses, n)
        truth = sat_oracle(clauses, n)
        counts["SAT" if truth else "UNSAT"] += 1
        for scheme, policy in _configs():
            res = solve(cnf, SolverConfig(scheme, restart_policy=policy, rng_seed=i))
            runs += 1
            if res.sat != truth or (res.sat and not satisfies(res.model, clauses)):
                wrong.append(("cnf", i, scheme.value, policy.value))
    csp_counts = {"SAT": 0, "UNSAT": 0}
    for i in range(200):
        inst = random_csp(rng, n_max=6, d_max=3, max_constraints=6, arity_max=3)
        cnf, _ = direct_encode(inst)
        truth = sat_oracle(cnf.clauses, cnf.num_vars)
        csp_counts["SAT" if truth else "UNSAT"] += 1
        for scheme, policy in _configs():
            res = solve(cnf, SolverConfig(scheme, restart_policy=policy, rng_seed=i))
            runs += 1
            if res.sat != truth:
                wrong.append(("csp", i, scheme.value, policy.value))
    report(5, "solver verdicts vs brute force", not wrong,
           f"1000 CNFs {counts} + 200 CSP encodings {csp_counts}, {runs} runs, {len(wrong)} disagreements (limit 0)")


# --- 6: absorption -----------------------------------------------------------------------------


def _absorption_instance() -> CspInstance:
    dom = (1, 2)
    cons = [
        Constraint(["u", "v"], [(a, b) for a in dom for b in dom if (a, b) != (1, 1)]),
        Constraint(["u", "w"], [(a, b) for a in dom for b in dom if (a, b) != (2, 1)]),
        Constraint(["u", "v", "w"], [(a, b, c) for a in dom for b in dom for c in dom if (a, b, c) != (2, 2, 2)]),
    ]
    return CspInstance(["u", "v", "w"], {x: dom for x in "uvw"}, cons)


def test_c6_absorption():
    cnf, vm = direct_encode(_absorption_instance())
    x = vm.var
    db = cnf.clauses
    expected_db = {make_clause(c) for c in [
        (x("u", 1), x("u", 2)), (x("v", 1), x("v", 2)), (x("w", 1), x("w", 2)),
        (-x("u", 1), -x("u", 2)), (-x("v", 1), -x("v", 2)), (-x("w", 1), -x("w", 2)),
        (-x("u", 1), -x("v", 1)), (-x("u", 2), -x("w", 1)), (-x("u", 2), -x("v", 2), -x("w", 2)),
    ]}
    db_ok = set(db) == expected_db and len(db) == 9
    yes = is_absorbed(db, (-x("v", 1), -x("w", 1))).absorbed
    no = not is_absorbed(db, (-x("u", 2), -x("v", 2))).absorbed
    members = all(is_absorbed(db, c).absorbed for c in db)
    rng = random.Random(5)
    steps = 0
    failures = 0
    while steps < 200:
        fresh = iter(range(1, 500))
        xs = [next(fresh) for _ in range(rng.randint(1, 4))]
        c0 = [-next(fresh) for _ in range(rng.randint(0, 3))]
        sides = [tuple([-v] + [-next(fresh) for _ in range(rng.randint(0, 3))]) for v in xs]
        res = negative_hyper_resolve(tuple(c0 + xs), sides)
        if not res:
            continue
        steps += 1
        failures += not is_absorbed([tuple(c0 + xs)] + sides, res).absorbed
    report(6, "absorption fixtures", db_ok and yes and no and members and failures == 0,
           f"database={db_ok} derived clause absorbed={yes} non-disjoint resolvent not absorbed={no} "
           f"members absorbed={members} disjoint steps {steps - failures}/{steps} absorbed")


# --- 7, 8: restart statistics -------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _chain_cnf(w: int, d: int):
    return direct_encode(generate_chain(ChainSpec(w, d)))[0]


@functools.lru_cache(maxsize=None)
def _restarts(w: int, d: int, scheme: str, seeds: tuple[int, ...]) -> tuple[int, ...]:
    cnf = _chain_cnf(w, d)
    out = []
    for s in seeds:
        res = solve(cnf, scheme_config(scheme, s))
        assert res.status == "UNSAT"
        out.append(res.stats.restarts)
    return tuple(out)


SEEDS_25 = tuple(range(1, 26))


def test_c7_restart_reproduction():
    lines = []
    ok = True
    for d in (2, 3, 4, 5):
        _, _, pub_1uip, pub_dec = SCHEME_RESTARTS[(2, d)]
        pub_ms = MINISAT_LIKE_RESTARTS[(2, d)][1]
        for scheme, pub in (("1uip", pub_1uip), ("decision", pub_dec), ("minisat", pub_ms)):
            mean = statistics.fmean(_restarts(2, d, scheme, SEEDS_25))
            ratio = mean / pub
            good = 1 / 3 <= ratio <= 3
            ok &= good
            lines.append(f"d={d} {scheme}={mean:.0f}/{pub} (x{ratio:.2f})")
    report(7, "mean restarts within factor 3 (w=2, 25 seeds)", ok, "; ".join(lines))


# seeds per d for the slope fit; the largest instances get fewer runs on one CPU
SLOPE_SEEDS = {2: SEEDS_25, 3: SEEDS_25, 4: SEEDS_25, 5: SEEDS_25, 6: tuple(range(1, 6)), 7: tuple(range(1, 4)), 8: tuple(range(1, 4))}


def test_c8_slope_below_bound():
    w = 2
    ds = sorted(SLOPE_SEEDS)
    xs = [ChainSpec(w, d).n * d for d in ds]
    means = [statistics.fmean(_restarts(w, d, "decision", SLOPE_SEEDS[d])) for d in ds]
    slope = loglog_slope(xs, means)
    table_ds = [d for (ww, d) in sorted(SCHEME_RESTARTS) if ww == w]
    txs = [ChainSpec(w, d).n * d for d in table_ds]
    pub_1uip = loglog_slope(txs, [SCHEME_RESTARTS[(w, d)][2] for d in table_ds])
    pub_dec = loglog_slope(txs, [SCHEME_RESTARTS[(w, d)][3] for d in table_ds])
    overlay = loglog_slope(xs, [overlay_growth(w, d) for d in ds])
    bound = 4 * w - 2
    report(8, "log-log restart slope below 4w-2", slope < bound and pub_1uip < bound and pub_dec < bound,
           f"measured DECISION slope {slope:.3f} over d=2..8 (means {[round(m) for m in means]}); "
           f"published slopes 1uip {pub_1uip:.3f}, decision {pub_dec:.3f}; bound {bound}; overlay slope {overlay:.3f} (reported only)")


# --- 9: unit propagation on support encodings ---------------------------------------------------


def test_c9_support_encoding_needs_no_search():
    lines = []
    ok = True
    for d in (2, 3, 4, 5):
        inst = generate_chain(ChainSpec(1, d))
        assert inst.n > d
        cnf, _ = support_encode(inst)
        for scheme in ("1uip", "decision"):
            res = solve(cnf, scheme_config(scheme, 1))
            good = res.status == "UNSAT" and res.stats.decisions == 0 and res.stats.restarts == 0
            ok &= good
        lines.append(f"d={d} n={inst.n}: {res.status} decisions={res.stats.decisions} restarts={res.stats.restarts}")
    report(9, "support encodings of w=1 chains refuted by propagation", ok, "; ".join(lines))


# --- 10: structural invariants ------------------------------------------------------------------


def test_c10_structural_invariants():
    violations = []
    learnt = 0
    # learnt-clause structure on chains and random formulas, both schemes, python engine
    for scheme in ("1uip", "decision", "minisat"):
        for d in (2, 3):
            for s in (1, 2, 3):
                chk = LearnChecker(scheme == "decision")
                solve(_chain_cnf(2, d), scheme_config(scheme, s), observer=chk)
                learnt += chk.checked
                violations += chk.violations
    rng = random.Random(10)
    for i in range(300):
        n, clauses = random_cnf(rng, n_max=25)
        for scheme, policy in _configs():
            chk = LearnChecker(scheme is LearningScheme.DECISION)
            solve(CnfFormula(clauses, n), SolverConfig(scheme, restart_policy=policy, rng_seed=i), observer=chk)
            learnt += chk.checked
            violations += chk.violations
    # propagation fixpoints do not depend on clause order
    order_diffs = 0
    for i in range(500):
        n, clauses = random_cnf(rng, n_max=20)
        decisions = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), min(n, 4))]
        a = propagate(clauses, decisions, n)
        shuffled = list(clauses)
        rng.shuffle(shuffled)
        b = propagate([tuple(reversed(c)) for c in shuffled], decisions, n)
        if (a.conflict is None) != (b.conflict is None) or (a.conflict is None and set(a.implied) != set(b.implied)):
            order_diffs += 1
    report(10, "structural invariants", not violations and order_diffs == 0,
           f"{learnt} learnt clauses checked, {len(violations)} violations; "
           f"{order_diffs}/500 propagation order differences (limit 0)")
