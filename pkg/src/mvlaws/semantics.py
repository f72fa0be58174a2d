"""Finite A-valued structures and Tarski-style evaluation.

Quantifiers are folded meets/joins over the domain in index order. Formulas
are compiled once into closures over a slot environment (one slot per
binder), so the same compiled formula can be run on many structures.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from .algebra import LatticeAlgebra, get_algebra
from .profiles import NONE, ConstraintProfile
from .syntax import (Atom, Const, Exists, Forall, Ident, Node, Op, Thresh, Var, Vocabulary,
                     free_variables, relations_of)

__all__ = [
    "WeightedStructure", "StructureError", "Violation", "make_structure", "check_constraints",
    "evaluate", "Evaluator", "compile_formula", "load_structure", "structure_to_json",
    "permute_structure",
]


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    rel: str
    cell: tuple[int, ...]
    message: str

    def __str__(self):
        cell = ",".join(str(i + 1) for i in self.cell)
        return f"{self.rel}({cell}): {self.message}"


@dataclass(frozen=True, eq=False)
class WeightedStructure:
    """Domain ``{0..n-1}`` (printed 1-based) with relation tables of element indices."""

    n: int
    algebra: LatticeAlgebra
    vocab: Vocabulary
    tables: Mapping[str, np.ndarray]
    profile: ConstraintProfile = NONE

    def value(self, rel: str, *cell: int) -> int:
        return int(self.tables[rel][cell])


def _coerce_table(rel: str, k: int, n: int, raw: Any, A: LatticeAlgebra) -> np.ndarray:
    shape = (n,) * k
    if isinstance(raw, np.ndarray):
        arr = np.asarray(raw)
        if arr.shape != shape:
            raise StructureError(f"{rel}: table shape {arr.shape}, expected {shape}")
        if arr.dtype.kind not in "iu":
            raise StructureError(f"{rel}: table must hold element indices")
        out = arr.astype(np.int16)
    elif isinstance(raw, Mapping):
        out = np.full(shape, -1, dtype=np.int16)
        for cell, v in raw.items():
            cell = (cell,) if isinstance(cell, int) else tuple(cell)
            if len(cell) != k or any(not 0 <= c < n for c in cell):
                raise StructureError(f"{rel}: bad cell {cell}")
            out[cell] = A.index(v) if isinstance(v, str) else int(v)
        missing = np.argwhere(out < 0)
        if len(missing):
            raise StructureError(f"{rel}: missing entry at {tuple(int(c) + 1 for c in missing[0])}")
    else:
        arr = np.array(raw, dtype=object)
        if arr.shape != shape:
            raise StructureError(f"{rel}: table shape {arr.shape}, expected {shape}")
        out = np.vectorize(lambda v: A.index(v) if isinstance(v, str) else int(v), otypes=[np.int16])(arr)
    if out.size and (out.min() < 0 or out.max() >= A.size):
        raise StructureError(f"{rel}: entry out of range for {A.name}")
    return out


def make_structure(n: int, algebra: LatticeAlgebra, vocab: Vocabulary, tables: Mapping[str, Any],
                   profile: ConstraintProfile = NONE) -> WeightedStructure:
    """Validate and build a structure; crisp identity is installed automatically."""
    if n < 1:
        raise StructureError("domain must be non-empty (n >= 1)")
    out = {}
    for rel, k in vocab.relations:
        if rel not in tables:
            raise StructureError(f"missing table for relation {rel}")
        out[rel] = _coerce_table(rel, k, n, tables[rel], algebra)
    extra = set(tables) - set(vocab.names) - {"~"}
    if extra:
        raise StructureError(f"tables for unknown relations {sorted(extra)}")
    if vocab.has_crisp_identity or profile.crisp_identity:
        ident = np.full((n, n), algebra.bottom, dtype=np.int16)
        np.fill_diagonal(ident, algebra.top)
        if "~" in tables:
            given = _coerce_table("~", 2, n, tables["~"], algebra)
            if not np.array_equal(given, ident):
                raise StructureError("crisp identity table must be the characteristic function of the diagonal")
        out["~"] = ident
        if not vocab.has_crisp_identity:
            vocab = Vocabulary(vocab.relations, True)
    for t in out.values():
        t.setflags(write=False)
    M = WeightedStructure(n, algebra, vocab, out, profile)
    bad = check_constraints(M, profile)
    if bad:
        raise StructureError("profile violation: " + "; ".join(str(v) for v in bad[:5]))
    return M


def check_constraints(M: WeightedStructure, profile: ConstraintProfile) -> list[Violation]:
    """Every cell violating the profile."""
    out: list[Violation] = []
    A = M.algebra
    for rel in sorted(profile.graph_rels(M.vocab)):
        t = M.tables[rel]
        for i in range(M.n):
            if t[i, i] != A.bottom:
                out.append(Violation(rel, (i, i), "diagonal must be bottom (irreflexive)"))
            for j in range(i + 1, M.n):
                if t[i, j] != t[j, i]:
                    out.append(Violation(rel, (i, j), f"asymmetric: {A.labels[t[i, j]]} vs {A.labels[t[j, i]]}"))
    for rel, bad in profile.forbidden.items():
        if rel not in M.tables:
            continue
        bad_idx = {A.index(b) for b in bad}
        for cell in itertools.product(range(M.n), repeat=M.tables[rel].ndim):
            if int(M.tables[rel][cell]) in bad_idx:
                out.append(Violation(rel, cell, f"value {A.labels[M.tables[rel][cell]]} outside support"))
    if "~" in M.tables:
        t = M.tables["~"]
        for i, j in itertools.product(range(M.n), repeat=2):
            want = A.top if i == j else A.bottom
            if t[i, j] != want:
                out.append(Violation("~", (i, j), "identity is not crisp"))
    if profile.custom:
        from .translator import classical_evaluate, transform_model
        C = transform_model(M)
        for s in profile.custom:
            if not classical_evaluate(C, s, {}):
                out.append(Violation("*", (), "custom condition fails"))
    return out


# ---------------------------------------------------------------- compilation


class _FiniteBackend:
    def __init__(self, A: LatticeAlgebra):
        self.A = A
        self.bottom, self.top = A.bottom, A.top
        self.meet_t = A.ops["and"].table
        self.join_t = A.ops["or"].table

    def op(self, name: str, k: int):
        if name not in self.A.ops:
            raise StructureError(f"connective {name!r} is not in the signature of {self.A.name}")
        o = self.A.ops[name]
        if o.arity != k:
            raise StructureError(f"connective {name!r} has arity {o.arity}, used with {k}")
        return ("table", o.table)

    def const(self, label: str):
        try:
            return self.A.index(label)
        except KeyError as e:
            raise StructureError(str(e)) from None

    def thresh(self, kind, bound):
        raise StructureError("threshold events are only defined for [0,1]-valued structures")


class _Ctx:
    __slots__ = ("tables", "domain")

    def __init__(self):
        self.tables = {}
        self.domain = range(0)


def _compile(node: Node, backend, ctx: _Ctx, scope: Mapping[str, int], counter: list) -> Callable:
    if isinstance(node, Atom):
        rel = node.rel
        slots = [scope[a] for a in node.args]
        if len(slots) == 1:
            s0 = slots[0]
            return lambda env: ctx.tables[rel][env[s0]]
        if len(slots) == 2:
            s0, s1 = slots
            return lambda env: ctx.tables[rel][env[s0]][env[s1]]

        def atom(env):
            t = ctx.tables[rel]
            for s in slots:
                t = t[env[s]]
            return t
        return atom
    if isinstance(node, Ident):
        s0, s1 = scope[node.left], scope[node.right]
        hi, lo = backend.top, backend.bottom
        return lambda env: hi if env[s0] == env[s1] else lo
    if isinstance(node, Const):
        c = backend.const(node.label)
        return lambda env: c
    if isinstance(node, Op):
        subs = [_compile(a, backend, ctx, scope, counter) for a in node.args]
        kind, impl = backend.op(node.name, len(subs))
        if kind == "table":
            t = impl
            if len(subs) == 1:
                f0 = subs[0]
                return lambda env: t[f0(env)]
            if len(subs) == 2:
                f0, f1 = subs
                return lambda env: t[f0(env)][f1(env)]
            f0, f1, f2 = subs
            return lambda env: t[f0(env)][f1(env)][f2(env)]
        fn = impl
        if len(subs) == 1:
            f0 = subs[0]
            return lambda env: fn(f0(env))
        if len(subs) == 2:
            f0, f1 = subs
            return lambda env: fn(f0(env), f1(env))
        return lambda env: fn(*(f(env) for f in subs))
    if isinstance(node, Thresh):
        f0 = _compile(node.body, backend, ctx, scope, counter)
        g = backend.thresh(node.kind, node.bound)
        return lambda env: g(f0(env))
    if isinstance(node, (Forall, Exists)):
        slot = counter[0]
        counter[0] += 1
        body = _compile(node.body, backend, ctx, {**scope, node.var: slot}, counter)
        if isinstance(node, Forall):
            start, stop, comb = backend.top, backend.bottom, _combiner(backend, "meet")
        else:
            start, stop, comb = backend.bottom, backend.top, _combiner(backend, "join")

        def quant(env):
            acc = start
            for i in ctx.domain:
                env[slot] = i
                acc = comb(acc, body(env))
                if acc == stop:
                    break
            return acc
        return quant
    if isinstance(node, Var):
        raise StructureError(f"term variable {node.name!r} in a first-order formula")
    raise StructureError(f"cannot evaluate node {node!r}")


def _combiner(backend, which: str):
    if hasattr(backend, "meet_t"):
        t = backend.meet_t if which == "meet" else backend.join_t
        return lambda a, b: t[a][b]
    return backend.meet if which == "meet" else backend.join


class Evaluator:
    """A formula compiled for repeated evaluation over structures of one algebra."""

    def __init__(self, formula: Node, algebra: LatticeAlgebra, backend=None):
        self.formula = formula
        self.algebra = algebra
        self.free = free_variables(formula)
        self.ctx = _Ctx()
        counter = [len(self.free)]
        scope = {v: i for i, v in enumerate(self.free)}
        self._fn = _compile(formula, backend or _FiniteBackend(algebra), self.ctx, scope, counter)
        self.n_slots = counter[0]
        rels = relations_of(formula)
        # Identity-free formulas over unary relations only see each element's
        # profile of values, so quantifiers may range over one element per profile.
        self.unary_rels = None if "~" in rels else tuple(sorted(rels))
        self._unary_ok = None

    def _domain(self, M) -> Sequence[int]:
        if self.unary_rels is None:
            return range(M.n)
        if any(M.tables[r].ndim != 1 for r in self.unary_rels):
            return range(M.n)
        if not self.unary_rels:
            return range(min(M.n, 1))
        seen = {}
        cols = [M.tables[r].tolist() for r in self.unary_rels]
        for i in range(M.n):
            seen.setdefault(tuple(c[i] for c in cols), i)
        return sorted(seen.values())

    def __call__(self, M, assignment: Optional[Mapping[str, int]] = None):
        assignment = assignment or {}
        missing = [v for v in self.free if v not in assignment]
        if missing:
            raise StructureError(f"unbound free variable {missing[0]}")
        for v in self.free:
            if not 0 <= assignment[v] < M.n:
                raise StructureError(f"assignment {v} -> {assignment[v]} outside the domain")
        self.ctx.tables = {r: t.tolist() for r, t in M.tables.items()}
        self.ctx.domain = self._domain(M)
        env = [0] * self.n_slots
        for i, v in enumerate(self.free):
            env[i] = assignment[v]
        return self._fn(env)


def compile_formula(formula: Node, algebra: LatticeAlgebra) -> Evaluator:
    return Evaluator(formula, algebra)


def evaluate(M: WeightedStructure, formula: Node, asg: Optional[Mapping[str, int]] = None) -> int:
    """The value (element index) of ``formula`` in ``M`` under ``asg`` (0-based elements)."""
    return Evaluator(formula, M.algebra)(M, asg)


def permute_structure(M: WeightedStructure, perm: Sequence[int]) -> WeightedStructure:
    """Image of ``M`` under the domain bijection ``i -> perm[i]``."""
    inv = np.argsort(perm)
    tables = {}
    for rel, t in M.tables.items():
        idx = np.ix_(*([inv] * t.ndim))
        tables[rel] = t[idx]
    return make_structure(M.n, M.algebra, M.vocab, {r: t for r, t in tables.items() if r != "~"}, M.profile)


# ---------------------------------------------------------------- files


_CELL = re.compile(r"^\(?\s*(\d+(?:\s*,\s*\d+)*)\s*\)?$")


def load_structure(data: Mapping, algebra: Optional[LatticeAlgebra] = None,
                   vocab: Optional[Vocabulary] = None, profile: ConstraintProfile = NONE) -> WeightedStructure:
    """Build from ``{"n": 3, "algebra": "L3", "relations": {"R": {"(1,2)": "1/2", ...}}}``.

    Cells are 1-based; every cell must be given.
    """
    n = int(data["n"])
    A = algebra or get_algebra(data["algebra"])
    tables = {}
    arities = {}
    for rel, cells in data["relations"].items():
        parsed = {}
        for key, val in cells.items():
            m = _CELL.match(str(key))
            if not m:
                raise StructureError(f"{rel}: bad cell key {key!r}")
            cell = tuple(int(x) - 1 for x in m.group(1).split(","))
            arities.setdefault(rel, len(cell))
            if arities[rel] != len(cell):
                raise StructureError(f"{rel}: inconsistent cell arity at {key!r}")
            parsed[cell] = str(val)
        tables[rel] = parsed
    if vocab is None:
        vocab = Vocabulary(tuple(sorted(arities.items())), bool(data.get("crisp_identity", False)))
    return make_structure(n, A, vocab, tables, profile)


def structure_to_json(M: WeightedStructure) -> dict:
    rels = {}
    for rel, k in M.vocab.relations:
        t = M.tables[rel]
        rels[rel] = {"(" + ",".join(str(i + 1) for i in cell) + ")": M.algebra.labels[int(t[cell])]
                     for cell in itertools.product(range(M.n), repeat=k)}
    out = {"n": M.n, "algebra": M.algebra.name, "relations": rels}
    if M.vocab.has_crisp_identity:
        out["crisp_identity"] = True
    return out
