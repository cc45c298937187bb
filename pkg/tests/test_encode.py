import random

import pytest
from hypothesis import given, settings, strategies as st

from localsat.bench import ChainSpec, generate_chain
from localsat.csp import Constraint, CspInstance, ternary_example_decomposed, ternary_example
from localsat.encode import (
    TAG_ALO,
    TAG_AMO,
    TAG_NOGOOD,
    CnfFormula,
    DecodeError,
    DimacsError,
    EncodingError,
    VarMap,
    decode_model,
    direct_clause_count,
    direct_encode,
    make_clause,
    negative_sparse_encode,
    parse_dimacs,
    support_encode,
    write_dimacs,
)
from oracles import csp_solutions, random_csp, sat_oracle

# index map for the ternary example: u0 u1 v0 v1 w0 w1 w2 -> 1..7
U0, U1, V0, V1, W0, W1, W2 = range(1, 8)


def test_make_clause():
    assert make_clause([3, -1, 3]) == (-1, 3)
    with pytest.raises(ValueError):
        make_clause([1, -1])
    with pytest.raises(ValueError):
        make_clause([0])


def test_direct_encoding_of_ternary_example():
    cnf, vm = direct_encode(ternary_example())
    assert cnf.num_vars == 7
    assert vm.var("w", 2) == W2
    assert cnf.tagged(TAG_ALO) == [(U0, U1), (V0, V1), (W0, W1, W2)]
    assert cnf.tagged(TAG_AMO) == [(-U0, -U1), (-V0, -V1), (-W0, -W1), (-W0, -W2), (-W1, -W2)]
    expected = {
        (-U0, -V0, -W0), (-U0, -V1, -W0), (-U0, -V1, -W1), (-U1, -V0, -W0),
        (-U1, -V0, -W1), (-U1, -V0, -W2), (-U1, -V1, -W0), (-U1, -V1, -W1),
    }
    assert set(cnf.tagged(TAG_NOGOOD)) == expected and len(cnf.tagged(TAG_NOGOOD)) == 8


def test_support_encoding_of_decomposed_example():
    cnf, _ = support_encode(ternary_example_decomposed())
    support = set(cnf.tagged("support"))
    expected = {
        (-U0, V0, V1), (-U1, V1), (U0, -V0), (U0, U1, -V1),
        (-V0, W1, W2), (-V1, W2), (-W0,), (V0, -W1), (V0, V1, -W2),
    }
    assert support == {make_clause(c) for c in expected}


def test_support_rejects_non_binary():
    with pytest.raises(EncodingError, match="binary CSP instances only"):
        support_encode(ternary_example())


def test_support_full_relation_lists_whole_domain():
    inst = CspInstance(["a", "b"], {"a": (0, 1), "b": (0, 1, 2)}, [Constraint(["a", "b"], [(i, j) for i in range(2) for j in range(3)])])
    cnf, vm = support_encode(inst)
    for c in cnf.tagged("support"):
        assert len(c) in (3, 4)  # one negative source literal plus the full target domain


def test_single_value_domain():
    cnf, _ = direct_encode(CspInstance(["v"], {"v": (0,)}))
    assert cnf.clauses == [(1,)]


def test_chain_clause_count():
    inst = generate_chain(ChainSpec(2, 2))
    cnf, _ = direct_encode(inst)
    assert len(cnf) == 49 == direct_clause_count(inst)


def test_support_chain_has_end_units():
    cnf, vm = support_encode(generate_chain(ChainSpec(1, 2)))
    units = {c for c in cnf.clauses if len(c) == 1}
    assert (-vm.var("x1", 1),) in units
    assert (-vm.var("x3", 0),) in units


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_direct_encoding_models_are_solutions(seed, amo):
    # model count of the encoding (with at-most-one) equals the solution count
    inst = random_csp(random.Random(seed), n_max=4, d_max=3)
    cnf, vm = direct_encode(inst, include_at_most_one=amo)
    sols = csp_solutions(inst)
    assert sat_oracle(cnf.clauses, cnf.num_vars) == bool(sols)
    for s in sols[:3]:
        lits = {vm.var(v, a) for v, a in s.items()}
        model = [b if b in lits else -b for b in range(1, cnf.num_vars + 1)]
        assert all(any(l in model for l in c) for c in cnf.clauses)
        assert decode_model(vm, model) == s


def test_decode():
    vm = VarMap.for_instance(ternary_example())
    model = {b: b in (U0, V1, W2) for b in range(1, 8)}
    assert decode_model(vm, model) == {"u": 0, "v": 1, "w": 2}
    model[W1] = True
    assert decode_model(vm, model)["w"] == 1
    with pytest.raises(DecodeError, match="u"):
        decode_model(vm, {b: False for b in range(1, 8)})


def test_dimacs_empty():
    assert write_dimacs(CnfFormula([], 0)).strip() == "p cnf 0 0"


def test_dimacs_alo_line():
    cnf, _ = direct_encode(ternary_example())
    assert "5 6 7 0" in write_dimacs(cnf).splitlines()


def test_dimacs_round_trip_keeps_map():
    cnf, vm = direct_encode(ternary_example())
    back = parse_dimacs(write_dimacs(cnf))
    assert back == cnf
    assert back.varmap == vm


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6).filter(bool), min_size=1, max_size=4), max_size=12))
def test_dimacs_round_trip_random(raw):
    clauses = []
    for c in raw:
        try:
            clauses.append(make_clause(c))
        except ValueError:
            pass
    cnf = CnfFormula(clauses, 6)
    assert parse_dimacs(write_dimacs(cnf)) == cnf


@pytest.mark.parametrize(
    "text, line",
    [
        ("p cnf x 1\n1 0\n", 1),
        ("1 0\n", 1),
        ("p cnf 2 1\n1 3 0\n", 2),
        ("p cnf 2 1\n1 2\n", 2),
        ("p cnf 2 2\n1 0\n", 2),
        ("p cnf 2 1\np cnf 2 1\n", 2),
        ("p cnf 2 1\n1 -1 0\n", 2),
    ],
)
def test_dimacs_errors_carry_line(text, line):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    assert err.value.line == line


def test_negative_sparse():
    inst = ternary_example()
    cnf, _ = negative_sparse_encode(inst, [{"u": 1, "v": 0}])
    assert (-U1, -V0) in cnf.clauses
    assert all(all(l < 0 for l in c) or all(l > 0 for l in c) for c in cnf.clauses)
