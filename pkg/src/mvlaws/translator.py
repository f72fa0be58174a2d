"""Multi-translation of A-valued formulas into classical logic over ``tau x A``.

Each formula ``theta`` becomes one classical formula ``theta^a`` per carrier
element ``a``; on the transformed model exactly one of them holds. Classical
formulas reuse the ordinary node types: relation ``R`` at value ``a`` is the
atom ``R^a``, crisp identity at value ``a`` is ``Id^a``, ``Ident`` is true
equality, and ``Const("1")``/``Const("0")`` are truth and falsity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .algebra import LatticeAlgebra
from .profiles import NONE, ConstraintProfile
from .semantics import StructureError, WeightedStructure, make_structure
from .syntax import (Atom, Const, Exists, Forall, Ident, Node, Op, Thresh, Vocabulary, _children, _fv,
                     conj, disj, forall_many, neg, to_text)

__all__ = [
    "TRUE", "FALSE", "IDENTITY", "ClassicalStructure", "TranslationBundle", "ParametricVerdict",
    "ConstraintProfile", "translate", "transform_model", "inverse_transform", "partition_axioms",
    "check_parametric", "classical_evaluate", "forall_distinct", "classical_name",
    "classical_relations", "custom_profile",
]

TRUE = Const("1")
FALSE = Const("0")
IDENTITY = "Id"


def classical_name(rel: str, label: str) -> str:
    return f"{IDENTITY if rel == '~' else rel}^{label}"


def classical_relations(vocab: Vocabulary, A: LatticeAlgebra) -> list[tuple[str, int]]:
    """The vocabulary ``tau x A`` as (name, arity) pairs."""
    rels = [(classical_name(r, a), k) for r, k in vocab.relations for a in A.labels]
    if vocab.has_crisp_identity:
        rels += [(classical_name("~", a), 2) for a in A.labels]
    return rels


def _and(a: Node, b: Node) -> Node:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return Op("and", (a, b))


def _or(a: Node, b: Node) -> Node:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    return Op("or", (a, b))


def _big(parts: Iterable[Node], op) -> Node:
    out = None
    for p in parts:
        out = p if out is None else op(out, p)
    return out


def _big_and(parts):
    out = _big(parts, _and)
    return TRUE if out is None else out


def _big_or(parts):
    out = _big(parts, _or)
    return FALSE if out is None else out


@dataclass(frozen=True)
class TranslationBundle:
    source: Node
    algebra: LatticeAlgebra
    formulas: Mapping[str, Node]

    def __getitem__(self, label: str) -> Node:
        return self.formulas[label]

    def lines(self) -> list[str]:
        return [f"{a}: {to_text(self.formulas[a])}" for a in self.algebra.labels]


def translate(theta: Node, A: LatticeAlgebra) -> TranslationBundle:
    """``a -> theta^a`` for every element ``a``; shared subformulas are shared nodes."""
    memo: dict[tuple[int, int], Node] = {}
    keep: list[Node] = []
    subsets = [s for r in range(1, A.size + 1) for s in itertools.combinations(A.elements, r)]
    meet_of = {s: A.meet_all(s) for s in subsets}
    join_of = {s: A.join_all(s) for s in subsets}

    def tr(node: Node, a: int) -> Node:
        key = (id(node), a)
        hit = memo.get(key)
        if hit is not None:
            return hit
        keep.append(node)
        memo[key] = out = build(node, a)
        return out

    def build(node: Node, a: int) -> Node:
        lab = A.labels[a]
        if isinstance(node, Atom):
            return Atom(classical_name(node.rel, lab), node.args)
        if isinstance(node, Ident):
            return Atom(classical_name("~", lab), (node.left, node.right))
        if isinstance(node, Const):
            return TRUE if A.index(node.label) == a else FALSE
        if isinstance(node, Op):
            if node.name not in A.ops:
                raise StructureError(f"connective {node.name!r} is not in the signature of {A.name}")
            op = A.ops[node.name]
            disjuncts = []
            for bs in itertools.product(A.elements, repeat=len(node.args)):
                if op(*bs) == a:
                    disjuncts.append(_big_and(tr(c, b) for c, b in zip(node.args, bs)))
            return _big_or(disjuncts)
        if isinstance(node, (Forall, Exists)):
            x, body = node.var, node.body
            if isinstance(node, Forall):
                fold, guard = meet_of, [b for b in A.elements if A.leq(a, b)]
            else:
                fold, guard = join_of, [b for b in A.elements if A.leq(b, a)]
            witnesses = _big_or(_big_and(Exists(x, tr(body, b)) for b in s)
                                for s in subsets if fold[s] == a)
            bound = Forall(x, _big_or(tr(body, b) for b in guard))
            return _and(witnesses, bound)
        if isinstance(node, Thresh):
            raise StructureError("threshold events have no finite-valued translation")
        raise StructureError(f"cannot translate node {node!r}")

    return TranslationBundle(theta, A, {A.labels[a]: tr(theta, a) for a in A.elements})


# ---------------------------------------------------------------- classical models


@dataclass(frozen=True, eq=False)
class ClassicalStructure:
    """Two-valued structure: each relation is a set of 0-based tuples."""

    n: int
    relations: Mapping[str, frozenset]

    def holds(self, rel: str, cell: tuple) -> bool:
        return cell in self.relations.get(rel, frozenset())


def transform_model(M: WeightedStructure) -> ClassicalStructure:
    A = M.algebra
    rels: dict[str, set] = {}
    for rel, t in M.tables.items():
        for a in A.elements:
            rels[classical_name(rel, A.labels[a])] = set()
        for cell in itertools.product(range(M.n), repeat=t.ndim):
            rels[classical_name(rel, A.labels[int(t[cell])])].add(cell)
    return ClassicalStructure(M.n, {k: frozenset(v) for k, v in rels.items()})


def inverse_transform(C: ClassicalStructure, A: LatticeAlgebra, vocab: Vocabulary,
                      profile: ConstraintProfile = NONE) -> WeightedStructure:
    """Back to an A-valued structure; fails unless the relations partition every cell."""
    tables = {}
    for rel, k in vocab.relations:
        t = np.full((C.n,) * k, -1, dtype=np.int16)
        for a in A.elements:
            for cell in C.relations.get(classical_name(rel, A.labels[a]), ()):
                if t[cell] >= 0:
                    raise StructureError(f"{rel}{tuple(c + 1 for c in cell)} has two values")
                t[cell] = a
        if (t < 0).any():
            cell = tuple(int(c) + 1 for c in np.argwhere(t < 0)[0])
            raise StructureError(f"{rel}{cell} has no value")
        tables[rel] = t
    return make_structure(C.n, A, vocab, tables, profile)


def classical_evaluate(C: ClassicalStructure, phi: Node, asg: Optional[Mapping[str, int]] = None) -> bool:
    """Two-valued truth of ``phi`` in ``C``; subformula results are memoized."""
    memo: dict = {}
    dom = range(C.n)
    rels = C.relations

    def ev(node: Node, env: Mapping[str, int]) -> bool:
        fv = _fv(node)
        key = (id(node), tuple(sorted((v, env[v]) for v in fv)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Atom):
            out = tuple(env[v] for v in node.args) in rels.get(node.rel, ())
        elif isinstance(node, Ident):
            out = env[node.left] == env[node.right]
        elif isinstance(node, Const):
            if node.label not in ("0", "1"):
                raise StructureError(f"constant {node.label!r} in a classical formula")
            out = node.label == "1"
        elif isinstance(node, Op):
            if node.name == "and":
                out = ev(node.args[0], env) and ev(node.args[1], env)
            elif node.name == "or":
                out = ev(node.args[0], env) or ev(node.args[1], env)
            elif node.name == "not":
                out = not ev(node.args[0], env)
            elif node.name == "imp":
                out = (not ev(node.args[0], env)) or ev(node.args[1], env)
            else:
                raise StructureError(f"connective {node.name!r} in a classical formula")
        elif isinstance(node, Forall):
            out = all(ev(node.body, {**env, node.var: i}) for i in dom)
        elif isinstance(node, Exists):
            out = any(ev(node.body, {**env, node.var: i}) for i in dom)
        else:
            raise StructureError(f"cannot evaluate node {node!r} classically")
        memo[key] = out
        return out

    asg = dict(asg or {})
    missing = sorted(_fv(phi) - set(asg))
    if missing:
        raise StructureError(f"unbound free variable {missing[0]}")
    return ev(phi, asg)


# ---------------------------------------------------------------- axioms


def forall_distinct(variables: Sequence[str], body: Node) -> Node:
    """``forall x1..xk (pairwise distinct -> body)``; no antecedent when k < 2."""
    pairs = [neg(Ident(x, y)) for x, y in itertools.combinations(variables, 2)]
    inner = Op("imp", (conj(pairs), body)) if pairs else body
    for v in reversed(variables):
        inner = Forall(v, inner)
    return inner


def _vars(k: int) -> list[str]:
    return [f"x{i + 1}" for i in range(k)]


def partition_axioms(vocab: Vocabulary, A: LatticeAlgebra, profile: ConstraintProfile = NONE) -> list[Node]:
    """Parametric sentences whose models are exactly the transforms of admitted structures."""
    out = []
    rels = list(vocab.relations)
    crisp = vocab.has_crisp_identity or profile.crisp_identity
    if crisp:
        rels.append(("~", 2))
    for rel, k in rels:
        xs = _vars(k)
        atoms = [Atom(classical_name(rel, a), tuple(xs)) for a in A.labels]
        out.append(forall_many(xs, disj(atoms)))
        excl = [neg(Op("and", (p, q))) for p, q in itertools.combinations(atoms, 2)]
        out.append(forall_many(xs, conj(excl, TRUE)))
    if crisp:
        out.append(Forall("x1", Atom(classical_name("~", A.labels[A.top]), ("x1", "x1"))))
        out.append(forall_distinct(["x1", "x2"], Atom(classical_name("~", A.labels[A.bottom]), ("x1", "x2"))))
    for rel in sorted(profile.graph_rels(vocab)):
        out.append(Forall("x1", Atom(classical_name(rel, A.labels[A.bottom]), ("x1", "x1"))))
        sym = []
        for a in A.labels:
            p, q = Atom(classical_name(rel, a), ("x1", "x2")), Atom(classical_name(rel, a), ("x2", "x1"))
            sym.append(Op("and", (Op("imp", (p, q)), Op("imp", (q, p)))))
        out.append(forall_distinct(["x1", "x2"], conj(sym)))
    for rel, bad in sorted(profile.forbidden.items()):
        if rel not in vocab:
            continue
        xs = _vars(vocab.arity(rel))
        for a in sorted(bad):
            out.append(forall_many(xs, neg(Atom(classical_name(rel, a), tuple(xs)))))
    out.extend(profile.custom)
    return out


@dataclass(frozen=True)
class ParametricVerdict:
    ok: bool
    reason: str = ""
    atom: Optional[Node] = None

    def __bool__(self):
        return self.ok


def _conjuncts(node: Node) -> list[Node]:
    if isinstance(node, Op) and node.name == "and":
        return _conjuncts(node.args[0]) + _conjuncts(node.args[1])
    return [node]


def _is_distinctness(node: Node, xs: set) -> bool:
    for c in _conjuncts(node):
        if not (isinstance(c, Op) and c.name == "not" and isinstance(c.args[0], Ident)):
            return False
        if {c.args[0].left, c.args[0].right} - xs:
            return False
    return True


def check_parametric(sentence: Node) -> ParametricVerdict:
    """Conjunction of blocks ``forall x1..xk [distinct ->] qf`` whose
    non-identity atoms each mention exactly ``x1..xk``."""
    for block in _conjuncts(sentence):
        xs = []
        body = block
        while isinstance(body, Forall):
            xs.append(body.var)
            body = body.body
        if not xs:
            return ParametricVerdict(False, "block is not universally quantified", block)
        if len(set(xs)) != len(xs):
            return ParametricVerdict(False, "repeated quantified variable", block)
        vs = set(xs)
        if isinstance(body, Op) and body.name == "imp" and _is_distinctness(body.args[0], vs):
            body = body.args[1]
        stack = [body]
        while stack:
            n = stack.pop()
            if isinstance(n, (Forall, Exists)):
                return ParametricVerdict(False, "quantifier inside the matrix", n)
            if isinstance(n, Atom) and set(n.args) != vs:
                return ParametricVerdict(False, f"atom {to_text(n)} does not use exactly {sorted(vs)}", n)
            if isinstance(n, Ident) and {n.left, n.right} - vs:
                return ParametricVerdict(False, "identity on an unquantified variable", n)
            stack.extend(_children(n))
        if _fv(block):
            return ParametricVerdict(False, "block has free variables", block)
    return ParametricVerdict(True)


def custom_profile(sentences: Sequence[Node], base: ConstraintProfile = NONE) -> ConstraintProfile:
    """``base`` extended by classical parametric sentences; non-parametric input is rejected."""
    for s in sentences:
        v = check_parametric(s)
        if not v:
            raise ValueError(f"not parametric: {v.reason}")
    return ConstraintProfile(base.crisp_identity, base.graph, base.graph_relations, base.forbidden,
                             tuple(base.custom) + tuple(sentences))
