import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mvlaws.algebra import (AlgebraError, algebra_to_json, check_algebra, demorgan_check, demorgan_constants,
                            get_algebra, is_distributive, make_boolean, make_godel_chain, make_mv_chain,
                            product, reduct, term_range_finite, validate_algebra)
from mvlaws.syntax import parse_term

NAMES = ["B2", "L3", "L4", "L6", "G3", "G4", "prod(G3,L4)", "prod(B2,B2)"]


@pytest.mark.parametrize("name", NAMES)
def test_builtin_algebras_satisfy_lattice_axioms(name):
    assert check_algebra(get_algebra(name)) == []


@pytest.mark.parametrize("name", NAMES)
def test_json_round_trip(name):
    A = get_algebra(name)
    B = validate_algebra(json.loads(json.dumps(algebra_to_json(A))))
    assert B.labels == A.labels
    assert {k: v.table for k, v in B.ops.items()} == {k: v.table for k, v in A.ops.items()}
    assert (B.bottom, B.top) == (A.bottom, A.top)


def test_boolean_from_table():
    B = validate_algebra({"carrier": ["0", "1"],
                          "ops": {"and": [[0, 0], [0, 1]], "or": [[0, 1], [1, 1]], "not": [1, 0]}})
    assert B.size == 2 and B.apply("not", 0) == 1


def test_noncommutative_meet_is_diagnosed():
    with pytest.raises(AlgebraError) as exc:
        validate_algebra({"carrier": ["a", "b"],
                          "ops": {"and": [["a", "a"], ["b", "b"]], "or": [["a", "b"], ["b", "b"]]}})
    assert any("commutativity fails at (a,b)" in d for d in exc.value.diagnostics)


def _lattice_json(labels, leq):
    n = len(labels)
    up = lambda a: {b for b in range(n) if leq(a, b)}
    def meet(a, b):
        lows = [c for c in range(n) if leq(c, a) and leq(c, b)]
        return next(c for c in lows if all(leq(d, c) for d in lows))
    def join(a, b):
        ups = up(a) & up(b)
        return next(c for c in ups if all(leq(c, d) for d in ups))
    return {"carrier": labels,
            "ops": {"and": [[meet(a, b) for b in range(n)] for a in range(n)],
                    "or": [[join(a, b) for b in range(n)] for a in range(n)]}}


def test_non_distributive_lattice_is_valid():
    # M3: bottom, three atoms, top
    leq = lambda a, b: a == b or a == 0 or b == 4
    M3 = validate_algebra(_lattice_json(["0", "a", "b", "c", "1"], leq))
    assert check_algebra(M3) == []
    assert is_distributive(M3) is not None


def test_diamond_is_distributive():
    leq = lambda a, b: a == b or a == 0 or b == 3
    D = validate_algebra(_lattice_json(["0", "a", "b", "1"], leq))
    assert is_distributive(D) is None


def test_validation_collects_several_diagnostics():
    with pytest.raises(AlgebraError) as exc:
        validate_algebra({"carrier": ["0", "1"], "ops": {"and": [[0, 5], [0, 1]]}, "top": "x"})
    assert len(exc.value.diagnostics) >= 2


def test_mv_chain():
    L = make_mv_chain(3)
    assert L.labels == ("0", "1/3", "2/3", "1")
    assert L.label(L.apply("imp", L.index("2/3"), L.index("1/3"))) == "2/3"
    B = make_mv_chain(1)
    assert B.labels == make_boolean().labels
    for op in ("and", "or", "not"):
        assert B.ops[op].table == make_boolean().ops[op].table


@given(st.integers(1, 6), st.data())
def test_mv_chain_formulas(N, data):
    L = make_mv_chain(N)
    a, b = data.draw(st.integers(0, N)), data.draw(st.integers(0, N))
    x, y = Fraction(a, N), Fraction(b, N)
    val = lambda op: L.value(L.apply(op, a, b))
    assert val("imp") == min(1, 1 - x + y)
    assert val("oplus") == min(1, x + y)
    assert val("odot") == max(0, x + y - 1)
    assert L.value(L.apply("not", a)) == 1 - x


def test_godel_chain():
    G3 = make_godel_chain(3)
    g = G3.index
    assert G3.apply("imp", g("g1"), g("0")) == g("0")
    assert G3.apply("imp", g("0"), g("g1")) == g("1")
    G4 = make_godel_chain(4)
    assert G4.label(G4.apply("imp", G4.index("g2"), G4.index("g1"))) == "g1"


@given(st.integers(2, 6), st.data())
def test_godel_residuation(n, data):
    G = make_godel_chain(n)
    a, b, c = (data.draw(st.integers(0, n - 1)) for _ in range(3))
    assert G.leq(G.meet(a, b), c) == G.leq(a, G.apply("imp", b, c))


def test_product_sizes():
    assert get_algebra("prod(B2,B2)").size == 4
    assert check_algebra(get_algebra("prod(B2,B2)")) == []
    assert get_algebra("prod(G3,L4)").size == 12
    assert product(make_boolean(), make_boolean()).size == 4


def test_reduct():
    R = reduct(get_algebra("L3"), ["and", "or", "not"])
    assert set(R.ops) == {"and", "or", "not"}
    meet_only = reduct(make_boolean(), ["and"])
    assert {"and", "or"} <= set(meet_only.ops)
    assert check_algebra(meet_only) == []


@pytest.mark.parametrize("name", ["L3", "L4", "L5", "G3", "G4", "G5"])
def test_demorgan_conditions_hold_on_chains(name):
    assert demorgan_check(reduct(get_algebra(name), ["and", "or", "not"])).conditions_hold


def test_demorgan_failure_has_witness():
    A = validate_algebra({"carrier": ["0", "1"],
                          "ops": {"and": [[0, 0], [0, 1]], "or": [[0, 1], [1, 1]], "not": [1, 1]}})
    rep = demorgan_check(A)
    assert not rep.conditions_hold
    assert rep.law("3").witness == ("1",)


def test_godel_constants_and_note():
    G3 = get_algebra("G3")
    c = demorgan_constants(G3)
    assert [G3.labels[i] for i in c.as_tuple()] == ["0", "0", "g1", "1"]
    assert any("delta' = 1" in n for n in demorgan_check(G3).notes)


@pytest.mark.parametrize("name", ["L3", "L4", "G3", "prod(G3,L4)[and,or,not]"])
def test_constants_match_brute_force(name):
    A = get_algebra(name)
    N = lambda v: A.apply("not", v)
    E = list(A.elements)
    c = demorgan_constants(A)
    assert c.eps == A.join_all(A.meet(v, N(v)) for v in E)
    assert c.delta == A.meet_all(A.join(v, N(v)) for v in E)


@pytest.mark.parametrize("N,k", [(3, 1), (3, 2)])
def test_lukasiewicz_term_minimum(N, k):
    L = make_mv_chain(N)
    t = parse_term("oplus(pow(v,3), not v)") if k == 1 else parse_term("times(2, oplus(pow(v,3), not v))")
    r = term_range_finite(L, t)
    assert L.value(r.min) == Fraction(k, N)
    if k == 1:
        assert r.argmin == (L.index("2/3"),)


def test_godel_term_minimum():
    G4 = get_algebra("G4")
    r = term_range_finite(G4, parse_term("v2 | (v2 -> (v1 | not v1))"))
    assert G4.labels[r.min] == "g2"
    assert r.argmin == (G4.index("g1"), G4.index("g2"))


def test_term_range_matches_enumeration():
    A = get_algebra("L4")
    t = parse_term("(v1 -> v2) & oplus(v1, not v2)")
    r = term_range_finite(A, t)
    vals = [A.apply("and", A.apply("imp", a, b), A.apply("oplus", a, A.apply("not", b)))
            for a, b in itertools.product(A.elements, repeat=2)]
    assert r.min == min(vals) and r.max == max(vals)


def test_unknown_algebra():
    with pytest.raises(AlgebraError):
        get_algebra("Q7")
