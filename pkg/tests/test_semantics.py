import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvlaws.algebra import get_algebra
from mvlaws.generators import random_formula
from mvlaws.profiles import parse_profile
from mvlaws.semantics import (StructureError, check_constraints, evaluate, load_structure, make_structure,
                              permute_structure, structure_to_json)
from mvlaws.syntax import Exists, Forall, Vocabulary, free_variables, parse_formula

from oracle import boolean_value, naive_value

V = Vocabulary.parse("P/1,R/2")


def random_structure(rng, n, A, vocab):
    return make_structure(n, A, vocab, {r: np.array(rng.choices(range(A.size), k=n ** k)).reshape((n,) * k)
                                         for r, k in vocab.relations})


def test_examples():
    B = get_algebra("B2")
    M = make_structure(2, B, Vocabulary.parse("P/1"), {"P": [1, 0]})
    assert evaluate(M, parse_formula("exists x. P(x)")) == B.top

    L3 = get_algebra("L3")
    M = make_structure(2, L3, Vocabulary.parse("P/1"), {"P": ["1/2", "1"]})
    assert L3.label(evaluate(M, parse_formula("forall x. (P(x) | not P(x))"))) == "1/2"

    L4 = get_algebra("L4")
    M = make_structure(1, L4, Vocabulary.parse("P/1"), {"P": ["2/3"]})
    assert L4.label(evaluate(M, parse_formula("forall x. oplus(pow(P(x),3), not P(x))"))) == "1/3"


def test_unbound_variable():
    M = make_structure(1, get_algebra("B2"), Vocabulary.parse("P/1"), {"P": [1]})
    with pytest.raises(StructureError, match="unbound free variable x"):
        evaluate(M, parse_formula("P(x)"))


def test_unknown_constant():
    M = make_structure(1, get_algebra("B2"), Vocabulary.parse("P/1"), {"P": [1]})
    with pytest.raises(Exception):
        evaluate(M, parse_formula("P(x) & #1/2"), {"x": 0})


def test_structure_validation():
    A = get_algebra("L3")
    with pytest.raises(StructureError, match="non-empty"):
        make_structure(0, A, Vocabulary.parse("P/1"), {"P": []})
    with pytest.raises(StructureError, match="missing entry"):
        make_structure(2, A, Vocabulary.parse("P/1"), {"P": {0: "1"}})
    M = make_structure(3, A, Vocabulary.parse("P/1", crisp_identity=True), {"P": [0, 1, 2]})
    assert np.array_equal(M.tables["~"], np.eye(3, dtype=int) * A.top)
    with pytest.raises(StructureError, match="diagonal"):
        make_structure(2, A, Vocabulary.parse("R/2"), {"R": [[2, 0], [0, 0]]}, parse_profile("graph"))


def test_check_constraints():
    A = get_algebra("L3")
    g = parse_profile("graph")
    ok = make_structure(2, A, Vocabulary.parse("R/2"), {"R": [[0, 1], [1, 0]]})
    assert check_constraints(ok, g) == []
    bad = make_structure(2, A, Vocabulary.parse("R/2"), {"R": [[0, 1], [2, 0]]})
    v = check_constraints(bad, g)
    assert [(x.rel, x.cell) for x in v] == [("R", (0, 1))]
    assert str(v[0]).startswith("R(1,2)")


def test_crisp_identity_violation_detected():
    A = get_algebra("L3")
    with pytest.raises(StructureError):
        make_structure(2, A, Vocabulary.parse("P/1", crisp_identity=True),
                       {"P": [0, 0], "~": [[2, 2], [2, 2]]})


def test_json_round_trip():
    A = get_algebra("L3")
    data = {"n": 2, "algebra": "L3", "relations": {"R": {"(1,1)": "0", "(1,2)": "1/2", "(2,1)": "1", "(2,2)": "0"}}}
    M = load_structure(data)
    assert M.value("R", 0, 1) == A.index("1/2")
    assert structure_to_json(M)["relations"] == data["relations"]
    del data["relations"]["R"]["(2,2)"]
    with pytest.raises(StructureError):
        load_structure(data)


@given(st.integers(0, 10**9), st.sampled_from(["L3", "G3", "L4"]))
def test_quantifier_monotonicity(seed, name):
    rng = random.Random(seed)
    A = get_algebra(name)
    n = rng.randint(1, 4)
    M = random_structure(rng, n, A, V)
    phi = random_formula(rng, 3, V, A.signature, scope=("x", "y"))
    rest = {v: rng.randrange(n) for v in free_variables(phi) if v != "x"}
    lo = evaluate(M, Forall("x", phi), {k: v for k, v in rest.items() if k in free_variables(Forall("x", phi))})
    hi = evaluate(M, Exists("x", phi), {k: v for k, v in rest.items() if k in free_variables(Exists("x", phi))})
    for i in range(n):
        mid = evaluate(M, phi, {**rest, "x": i} if "x" in free_variables(phi) else rest)
        assert A.leq(lo, mid) and A.leq(mid, hi)


@given(st.integers(0, 10**9))
def test_permutation_invariance(seed):
    rng = random.Random(seed)
    A = get_algebra("L4")
    n = rng.randint(1, 4)
    M = random_structure(rng, n, A, V)
    phi = random_formula(rng, 3, V, A.signature, scope=("x", "y"))
    perm = list(range(n))
    rng.shuffle(perm)
    asg = {v: rng.randrange(n) for v in free_variables(phi)}
    assert evaluate(M, phi, asg) == evaluate(permute_structure(M, perm), phi, {v: perm[i] for v, i in asg.items()})


def test_boolean_agrees_with_classical_evaluator():
    rng = random.Random(11)
    B = get_algebra("B2")
    for _ in range(500):
        n = rng.randint(1, 3)
        M = random_structure(rng, n, B, V)
        phi = random_formula(rng, 4, V, B.signature, scope=("x",), identity=True)
        asg = {v: rng.randrange(n) for v in free_variables(phi)}
        tables = {r: t.tolist() for r, t in M.tables.items()}
        assert (evaluate(M, phi, asg) == B.top) == boolean_value(tables, phi, asg, n)


@given(st.integers(0, 10**9), st.sampled_from(["L3", "G4", "prod(G3,L4)"]))
def test_compiled_matches_naive(seed, name):
    rng = random.Random(seed)
    A = get_algebra(name)
    n = rng.randint(1, 5)
    vocab = Vocabulary.parse("P/1,Q/1") if rng.random() < 0.5 else V
    M = random_structure(rng, n, A, vocab)
    phi = random_formula(rng, 4, vocab, A.signature, scope=("x",))
    asg = {v: rng.randrange(n) for v in free_variables(phi)}
    assert evaluate(M, phi, asg) == naive_value(M, phi, asg)


def test_unary_fast_path_with_repeated_profiles():
    A = get_algebra("L3")
    vocab = Vocabulary.parse("P/1,Q/1")
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 12)
        M = make_structure(n, A, vocab, {"P": rng.choices(range(2), k=n), "Q": rng.choices(range(3), k=n)})
        phi = random_formula(rng, 4, vocab, A.signature)
        assert evaluate(M, phi) == naive_value(M, phi, {})
