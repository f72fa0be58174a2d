import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvlaws.algebra import get_algebra
from mvlaws.generators import random_formula
from mvlaws.profiles import parse_profile
from mvlaws.semantics import evaluate, make_structure
from mvlaws.syntax import Op, Vocabulary, _walk, free_variables, parse_formula, to_text
from mvlaws.translator import (check_parametric, classical_name, classical_evaluate, classical_relations, custom_profile,
                               inverse_transform, partition_axioms, transform_model, translate)

L3 = get_algebra("L3")


def test_negation_translation():
    b = translate(parse_formula("not P(x)"), L3)
    assert to_text(b["1/2"]) == "P^1/2(x)"
    assert to_text(b["0"]) == "P^1(x)"
    assert len(b.lines()) == 3


def test_universal_clause_shape():
    f = translate(parse_formula("forall x. P(x)"), L3)["1/2"]
    assert isinstance(f, Op) and f.name == "and"
    guard = f.args[1]
    assert to_text(guard) == "forall x. (P^1/2(x) | P^1(x))"


def test_classical_vocabulary_size():
    V = Vocabulary.parse("P/1,R/2")
    assert len(classical_relations(V, L3)) == 2 * 3


def test_transform_and_inverse():
    V = Vocabulary.parse("P/1")
    M = make_structure(1, L3, V, {"P": ["1/2"]})
    C = transform_model(M)
    assert C.relations["P^1/2"] == {(0,)}
    assert C.relations["P^0"] == frozenset() and C.relations["P^1"] == frozenset()
    back = inverse_transform(C, L3, V)
    assert np.array_equal(back.tables["P"], M.tables["P"])


def test_crisp_identity_transform():
    M = make_structure(2, L3, Vocabulary.parse("P/1", crisp_identity=True), {"P": [0, 1]})
    C = transform_model(M)
    assert C.relations[classical_name("~", "1")] == {(0, 0), (1, 1)}
    assert C.relations[classical_name("~", "0")] == {(0, 1), (1, 0)}


def test_partition_axioms():
    V = Vocabulary.parse("R/1")
    ax = partition_axioms(V, L3)
    assert len(ax) == 2
    assert to_text(ax[0]) == "forall x1. ((R^0(x1) | R^1/2(x1)) | R^1(x1))"
    assert sum(isinstance(n, Op) and n.name == "not" for n in _walk(ax[1])) == 3
    g = partition_axioms(Vocabulary.parse("R/2"), L3, parse_profile("graph"))
    assert "forall x1. R^0(x1, x1)" in [to_text(a) for a in g]


@given(st.integers(0, 10**9))
def test_transformed_models_satisfy_partition_axioms(seed):
    rng = random.Random(seed)
    V = Vocabulary.parse("P/1,R/2")
    n = rng.randint(1, 3)
    M = make_structure(n, L3, V, {"P": rng.choices(range(3), k=n),
                                  "R": np.array(rng.choices(range(3), k=n * n)).reshape(n, n)})
    C = transform_model(M)
    assert all(classical_evaluate(C, a) for a in partition_axioms(V, L3))


def test_parametric_examples():
    ok = parse_formula("(forall x. not R(x,x)) & (forall x. forall y. (not (x ~ y) -> (R(x,y) -> R(y,x))))")
    assert check_parametric(ok)
    trans = parse_formula("forall x. forall y. forall z. ((not (x ~ y) & (not (x ~ z) & not (y ~ z))) "
                          "-> ((R(x,y) & R(y,z)) -> R(x,z)))")
    v = check_parametric(trans)
    assert not v and v.atom is not None
    assert check_parametric(parse_formula("forall x. (P(x) -> not R(x,x))"))
    with pytest.raises(ValueError):
        custom_profile([trans])


def test_classical_evaluate_truth_tables():
    M = make_structure(2, get_algebra("B2"), Vocabulary.parse("P/1"), {"P": [1, 0]})
    C = transform_model(M)
    assert classical_evaluate(C, parse_formula("exists x. P^1(x)"))
    assert not classical_evaluate(C, parse_formula("forall x. P^1(x)"))
    assert classical_evaluate(C, parse_formula("forall x. (P^1(x) | P^0(x))"))


def _disjuncts(node):
    if isinstance(node, Op) and node.name == "or":
        return _disjuncts(node.args[0]) + _disjuncts(node.args[1])
    return [node]


@pytest.mark.parametrize("name", ["L3", "L4", "G4"])
def test_quantifier_clause_subset_bound(name):
    A = get_algebra(name)
    b = translate(parse_formula("forall x. P(x)"), A)
    for a in A.elements:
        f = b[A.labels[a]]
        witnesses = _disjuncts(f.args[0])
        assert 1 <= len(witnesses) <= 2 ** A.size - 1
        # on a chain the meet of a subset is its least element
        expected = sum(1 for r in range(1, A.size + 1) for s in itertools.combinations(A.elements, r)
                       if A.meet_all(s) == a)
        assert len(witnesses) == expected
        assert free_variables(f) == ()


def test_equivalence_and_partition_random():
    rng = random.Random(2)
    V = Vocabulary.parse("R/2")
    A = get_algebra("G3")
    for _ in range(150):
        n = rng.randint(1, 2)
        M = make_structure(n, A, V, {"R": np.array(rng.choices(range(3), k=n * n)).reshape(n, n)})
        phi = random_formula(rng, 3, V, A.signature, scope=("x", "y"))
        asg = {v: rng.randrange(n) for v in free_variables(phi)}
        val = evaluate(M, phi, asg)
        C = transform_model(M)
        b = translate(phi, A)
        holds = [classical_evaluate(C, b[a], asg) for a in A.labels]
        assert holds.count(True) == 1 and holds[val]
