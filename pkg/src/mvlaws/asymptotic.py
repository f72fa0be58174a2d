"""Almost-sure values by complete descriptions, and De Morgan quantifier elimination.

A complete description over positions ``0..k-1`` (pairwise distinct
elements) fixes the value of every relational atom whose arguments are
among those positions. With the extension axioms such a description
settles every formula, so the value of a formula is computed recursively:
connectives read the algebra tables, and a quantifier over ``x`` folds the
set of values achieved when ``x`` is one of the old positions or a fresh
element realising some consistent expansion.

Expansions are not enumerated blindly. The body of a quantifier depends on
a fresh element only through the atoms that mention it, and subformulas
reading disjoint sets of such atoms are combined by products of their
achieved-value sets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .algebra import LatticeAlgebra, demorgan_check, demorgan_constants, is_distributive
from .config import DEFAULT_BUDGETS, BudgetExceeded, Budgets
from .profiles import NONE, ConstraintProfile
from .semantics import StructureError, make_structure
from .syntax import (Atom, Const, Exists, Forall, Ident, Node, Op, Thresh, Var, Vocabulary, _fv,
                     conj, free_variables, infer_vocabulary, neg, parse_term,
                     quantifier_depth, relations_of, to_text, witness_sentences)

__all__ = [
    "CompleteDescription", "ChoiceUnit", "Decider", "AsymptoticReport", "enumerate_expansions",
    "generic_value", "almost_sure_value", "decide", "extension_atoms", "extension_axiom",
    "qe_demorgan", "almost_sure_set_demorgan", "demorgan_witnesses", "lukasiewicz_witness_term",
    "godel_witness_term", "QEError",
]


class QEError(ValueError):
    pass


Cell = tuple[int, ...]
Key = tuple[str, Cell]


@dataclass(frozen=True)
class ChoiceUnit:
    """One free choice in an expansion: cells that must share a value, and the admissible values."""

    rel: str
    cells: tuple[Cell, ...]
    allowed: tuple[int, ...]

    @property
    def positions(self) -> frozenset:
        return frozenset(self.cells[0])


@dataclass(frozen=True)
class CompleteDescription:
    """Values of all atoms over ``k`` distinct positions (identity atoms excluded)."""

    k: int
    values: Mapping[Key, int]
    algebra: LatticeAlgebra
    vocab: Vocabulary
    profile: ConstraintProfile = NONE

    def __post_init__(self):
        for rel, r in self.vocab.relations:
            for cell in itertools.product(range(self.k), repeat=r):
                if (rel, cell) not in self.values:
                    raise StructureError(f"description misses {rel}{cell}")

    @classmethod
    def empty(cls, algebra, vocab, profile=NONE) -> "CompleteDescription":
        return cls(0, {}, algebra, vocab, profile)

    def describe(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.k)]
        parts = [f"{rel}({','.join(names[c] for c in cell)})={self.algebra.labels[v]}"
                 for (rel, cell), v in sorted(self.values.items())]
        return "{" + ", ".join(parts) + "}"


def _units(k: int, rels: Sequence[tuple[str, int]], A: LatticeAlgebra,
           profile: ConstraintProfile, vocab: Vocabulary) -> tuple[list[ChoiceUnit], dict[Key, int]]:
    """Choice units and forced cells for the atoms mentioning the new position ``k``."""
    graph = profile.graph_rels(vocab)
    units, forced = [], {}
    for rel, r in rels:
        allowed = tuple(profile.allowed(rel, A))
        if not allowed:
            raise StructureError(f"profile leaves no admissible value for {rel}")
        for cell in itertools.product(range(k + 1), repeat=r):
            if k not in cell:
                continue
            if rel in graph:
                i, j = cell
                if i == j:
                    if A.bottom not in allowed:
                        raise StructureError(f"graph profile forces {rel}(x,x)=bottom, which is excluded")
                    forced[(rel, cell)] = A.bottom
                    continue
                if j == k:
                    units.append(ChoiceUnit(rel, ((i, j), (j, i)), allowed))
                continue
            units.append(ChoiceUnit(rel, (cell,), allowed))
    return units, forced


def extension_atoms(k: int, vocab: Vocabulary, variables: Optional[Sequence[str]] = None) -> list[Atom]:
    """Atoms over ``x1..x_{k+1}`` that mention ``x_{k+1}`` (identity excluded)."""
    xs = list(variables or [f"x{i + 1}" for i in range(k + 1)])
    out = []
    for rel, r in vocab.relations:
        for cell in itertools.product(range(k + 1), repeat=r):
            if k in cell:
                out.append(Atom(rel, tuple(xs[c] for c in cell)))
    return out


def enumerate_expansions(delta: CompleteDescription, budgets: Budgets = DEFAULT_BUDGETS
                         ) -> Iterator[CompleteDescription]:
    """Every consistent description over ``k+1`` positions extending ``delta`` (lexicographic)."""
    A, vocab, profile = delta.algebra, delta.vocab, delta.profile
    _check_budgets(A, vocab, budgets)
    units, forced = _units(delta.k, vocab.relations, A, profile, vocab)
    total = 1
    for u in units:
        total *= len(u.allowed)
    if total > budgets.max_expansions:
        raise BudgetExceeded(f"{total} expansions exceed the budget of {budgets.max_expansions}")
    for choice in itertools.product(*(u.allowed for u in units)):
        vals = dict(delta.values)
        vals.update(forced)
        for u, v in zip(units, choice):
            for cell in u.cells:
                vals[(u.rel, cell)] = v
        out = CompleteDescription(delta.k + 1, vals, A, vocab, profile)
        if profile.custom and not _satisfies_custom(out):
            continue
        yield out


def _satisfies_custom(d: CompleteDescription) -> bool:
    from .translator import classical_evaluate, transform_model
    tables = {}
    for rel, r in d.vocab.relations:
        t = np.zeros((d.k,) * r, dtype=np.int16)
        for cell in itertools.product(range(d.k), repeat=r):
            t[cell] = d.values[(rel, cell)]
        tables[rel] = t
    M = make_structure(d.k, d.algebra, d.vocab, tables, ConstraintProfile(d.profile.crisp_identity))
    C = transform_model(M)
    return all(classical_evaluate(C, s, {}) for s in d.profile.custom)


def _check_budgets(A: LatticeAlgebra, vocab: Vocabulary, budgets: Budgets):
    if A.size > budgets.max_algebra_size:
        raise BudgetExceeded(f"|A| = {A.size} exceeds the budget of {budgets.max_algebra_size}")
    if vocab.max_arity > budgets.max_arity:
        raise BudgetExceeded(f"arity {vocab.max_arity} exceeds the budget of {budgets.max_arity}")


# ---------------------------------------------------------------- decider


@dataclass
class TraceEntry:
    depth: int
    formula: str
    context: str
    achieved: tuple[str, ...]
    value: str

    def __str__(self):
        pad = "  " * self.depth
        return f"{pad}{self.formula}  given {self.context}: achieved {{{', '.join(self.achieved)}}} -> {self.value}"


class Decider:
    """Evaluator of formulas relative to complete descriptions.

    ``memo=False`` recomputes every quantifier step (streaming discipline);
    ``explain=True`` records the achieved set at each quantifier step.
    """

    def __init__(self, algebra: LatticeAlgebra, vocab: Vocabulary, profile: ConstraintProfile = NONE,
                 budgets: Budgets = DEFAULT_BUDGETS, memo: bool = True, explain: bool = False):
        _check_budgets(algebra, vocab, budgets)
        self.A = algebra
        self.vocab = vocab
        self.profile = profile
        self.budgets = budgets
        self.use_memo = memo
        self.explain = explain
        self.trace: list[TraceEntry] = []
        self.memo: dict = {}
        self.steps = 0
        self._units_cache: dict = {}
        self._depth = 0
        self._meet = algebra.ops["and"].table
        self._join = algebra.ops["or"].table

    # -- helpers

    def _rels(self, node: Node) -> tuple[tuple[str, int], ...]:
        if self.profile.custom:
            return self.vocab.relations
        names = relations_of(node)
        return tuple((r, k) for r, k in self.vocab.relations if r in names)

    def _units(self, k: int, rels) -> tuple[list[ChoiceUnit], dict]:
        key = (k, rels)
        hit = self._units_cache.get(key)
        if hit is None:
            hit = self._units_cache[key] = _units(k, rels, self.A, self.profile, self.vocab)
        return hit

    def _restrict(self, node: Node, env: Mapping[str, int], delta: Mapping[Key, int]):
        """Canonical (env, delta, k) over the positions of the free variables of ``node``."""
        fv = sorted(_fv(node))
        pos = sorted({env[v] for v in fv})
        remap = {p: i for i, p in enumerate(pos)}
        new_env = {v: remap[env[v]] for v in fv}
        new_delta = {}
        for rel, r in self._rels(node):
            for cell in itertools.product(pos, repeat=r):
                new_delta[(rel, tuple(remap[c] for c in cell))] = delta[(rel, cell)]
        return new_env, new_delta, len(pos)

    # -- values

    def value(self, node: Node, env: Mapping[str, int], delta: Mapping[Key, int]) -> int:
        if isinstance(node, Atom):
            return delta[(node.rel, tuple(env[a] for a in node.args))]
        if isinstance(node, Op):
            t = self.A.ops[node.name].table
            vals = [self.value(c, env, delta) for c in node.args]
            for v in vals:
                t = t[v]
            return t
        if isinstance(node, Ident):
            return self.A.top if env[node.left] == env[node.right] else self.A.bottom
        if isinstance(node, Const):
            return self.A.index(node.label)
        if isinstance(node, (Forall, Exists)):
            env2, delta2, k = self._restrict(node, env, delta)
            if not self.use_memo:
                return self._quantifier(node, env2, delta2, k)
            key = (id(node), tuple(sorted(env2.items())), tuple(sorted(delta2.items())))
            hit = self.memo.get(key)
            if hit is not None:
                return hit[1]
            out = self._quantifier(node, env2, delta2, k)
            if len(self.memo) >= self.budgets.memo_cap:
                self.memo.clear()
            self.memo[key] = (node, out)
            return out
        if isinstance(node, Thresh):
            raise StructureError("threshold events are only defined for [0,1]-valued structures")
        raise StructureError(f"cannot decide node {node!r}")

    def _quantifier(self, node, env, delta, k) -> int:
        self.steps += 1
        x, body = node.var, node.body
        achieved = {self.value(body, {**env, x: p}, delta) for p in range(k)}
        env_new = {**env, x: k}
        rels = self._rels(body)
        units, forced = self._units(k, rels)
        base = {**delta, **forced}
        self._depth += 1
        try:
            if self.profile.custom:
                achieved |= self._achieved_custom(body, env_new, base, units, k)
            else:
                achieved |= self._achieved(body, env_new, base, units, k, {})
        finally:
            self._depth -= 1
        if not achieved:
            raise StructureError("no admissible expansion: the profile is contradictory")
        fold = self._meet if isinstance(node, Forall) else self._join
        acc = self.A.top if isinstance(node, Forall) else self.A.bottom
        for v in achieved:
            acc = fold[acc][v]
        if self.explain:
            names = {p: v for v, p in env.items()}
            ctx = ", ".join(f"{rel}({','.join(names.get(c, '?') for c in cell)})={self.A.labels[v]}"
                            for (rel, cell), v in sorted(delta.items()))
            self.trace.append(TraceEntry(self._depth, to_text(node), "{" + ctx + "}",
                                         tuple(self.A.labels[v] for v in sorted(achieved)),
                                         self.A.labels[acc]))
        return acc

    def _achieved_custom(self, body, env, base, units, k) -> set:
        vocab = self.vocab
        d0 = CompleteDescription(k, {key: v for key, v in base.items() if k not in key[1]},
                                 self.A, vocab, self.profile)
        out = set()
        for d in enumerate_expansions(d0, self.budgets):
            out.add(self.value(body, env, d.values))
        return out

    def _deps(self, node: Node, env, units, k, fixed) -> frozenset:
        """Indices of the choice units that ``node`` may read (minus the fixed ones)."""
        if isinstance(node, Atom):
            cell = tuple(env[a] for a in node.args)
            if k not in cell:
                return frozenset()
            for i, u in enumerate(units):
                if u.rel == node.rel and cell in u.cells:
                    return frozenset() if i in fixed else frozenset((i,))
            return frozenset()  # forced cell
        if isinstance(node, Op):
            return frozenset().union(*(self._deps(c, env, units, k, fixed) for c in node.args))
        if isinstance(node, (Ident, Const)):
            return frozenset()
        pos = {env[v] for v in _fv(node)}
        if k not in pos:
            return frozenset()
        rels = relations_of(node)
        return frozenset(i for i, u in enumerate(units)
                         if i not in fixed and u.rel in rels and u.positions <= pos)

    def _with(self, base, units, fixed):
        d = dict(base)
        for i, v in fixed.items():
            u = units[i]
            for cell in u.cells:
                d[(u.rel, cell)] = v
        return d

    def _enum(self, idx: Sequence[int], units) -> Iterator[tuple[int, ...]]:
        total = 1
        for i in idx:
            total *= len(units[i].allowed)
        if total > self.budgets.max_expansions:
            raise BudgetExceeded(f"{total} joint choices exceed the budget of {self.budgets.max_expansions}")
        return itertools.product(*(units[i].allowed for i in idx))

    def _achieved(self, node, env, base, units, k, fixed) -> set:
        deps = self._deps(node, env, units, k, fixed)
        if not deps:
            return {self.value(node, env, self._with(base, units, fixed))}
        if isinstance(node, Atom):
            (i,) = deps
            return set(units[i].allowed)
        if isinstance(node, Op):
            child_deps = [self._deps(c, env, units, k, fixed) for c in node.args]
            seen, shared = set(), set()
            for d in child_deps:
                shared |= seen & d
                seen |= d
            shared = sorted(shared)
            table = self.A.ops[node.name].table
            out = set()
            for choice in self._enum(shared, units):
                fx = {**fixed, **dict(zip(shared, choice))}
                parts = [self._achieved(c, env, base, units, k, fx) for c in node.args]
                for combo in itertools.product(*parts):
                    t = table
                    for v in combo:
                        t = t[v]
                    out.add(t)
            return out
        idx = sorted(deps)
        out = set()
        for choice in self._enum(idx, units):
            fx = {**fixed, **dict(zip(idx, choice))}
            out.add(self.value(node, env, self._with(base, units, fx)))
        return out


@dataclass
class AsymptoticReport:
    sentence: Node
    algebra: LatticeAlgebra
    value: int
    trace: list = field(default_factory=list)
    steps: int = 0

    @property
    def label(self) -> str:
        return self.algebra.labels[self.value]

    @property
    def exact(self) -> Optional[Fraction]:
        return self.algebra.value(self.value)

    def lines(self) -> list[str]:
        out = [str(t) for t in self.trace]
        ex = self.exact
        tail = f" (= {ex})" if ex is not None and str(ex) != self.label else ""
        out.append(f"{self.label}{tail}")
        return out


def _prepare(phi: Node, A: LatticeAlgebra, vocab: Optional[Vocabulary], profile: ConstraintProfile,
             budgets: Budgets) -> Vocabulary:
    if vocab is None:
        vocab = infer_vocabulary(phi)
    if profile.crisp_identity and not vocab.has_crisp_identity:
        vocab = Vocabulary(vocab.relations, True)
    qd = quantifier_depth(phi)
    if qd > budgets.max_quantifier_depth:
        raise BudgetExceeded(f"quantifier depth {qd} exceeds the budget of {budgets.max_quantifier_depth}")
    return vocab


def generic_value(phi: Node, delta: CompleteDescription, assignment: Optional[Mapping[str, int]] = None,
                  budgets: Budgets = DEFAULT_BUDGETS, memo: bool = True) -> int:
    """Value of ``phi`` forced by the extension axioms together with ``delta``.

    ``assignment`` maps the free variables of ``phi`` to positions of ``delta``.
    """
    assignment = dict(assignment or {})
    missing = [v for v in free_variables(phi) if v not in assignment]
    if missing:
        raise StructureError(f"free variable {missing[0]} is not assigned a position")
    if any(not 0 <= p < delta.k for p in assignment.values()):
        raise StructureError("assignment outside the description's positions")
    _prepare(phi, delta.algebra, delta.vocab, delta.profile, budgets)
    dec = Decider(delta.algebra, delta.vocab, delta.profile, budgets, memo=memo)
    return dec.value(phi, assignment, dict(delta.values))


def decide(phi: Node, A: LatticeAlgebra, profile: ConstraintProfile = NONE,
           vocab: Optional[Vocabulary] = None, budgets: Budgets = DEFAULT_BUDGETS,
           memo: bool = True, explain: bool = False) -> AsymptoticReport:
    fv = free_variables(phi)
    if fv:
        raise StructureError(f"free variable {fv[0]} in sentence")
    vocab = _prepare(phi, A, vocab, profile, budgets)
    dec = Decider(A, vocab, profile, budgets, memo=memo, explain=explain)
    v = dec.value(phi, {}, {})
    return AsymptoticReport(phi, A, v, dec.trace, dec.steps)


def almost_sure_value(phi: Node, A: LatticeAlgebra, profile: ConstraintProfile = NONE,
                      vocab: Optional[Vocabulary] = None, budgets: Budgets = DEFAULT_BUDGETS,
                      memo: bool = True) -> int:
    """Element index ``a`` with ``mu_n(phi = a) -> 1``."""
    return decide(phi, A, profile, vocab, budgets, memo).value


# ---------------------------------------------------------------- extension axioms


def extension_axiom(k: int, f: Mapping, vocab: Vocabulary, A: LatticeAlgebra,
                    profile: ConstraintProfile = NONE) -> Node:
    """Classical sentence: any ``k`` distinct elements have a new one realising ``f``.

    ``f`` maps each atom of ``extension_atoms(k, vocab)`` (or its text) to a label.
    """
    from .translator import classical_name, forall_distinct
    atoms = extension_atoms(k, vocab)
    xs = [f"x{i + 1}" for i in range(k + 1)]
    table = {}
    for key, lab in f.items():
        atom = key if isinstance(key, Atom) else None
        if atom is None:
            matches = [a for a in atoms if to_text(a) == str(key).replace(" ", "").replace(",", ", ")]
            if not matches:
                raise StructureError(f"{key!r} is not an atom mentioning {xs[-1]}")
            atom = matches[0]
        table[atom] = A.index(lab) if isinstance(lab, str) else int(lab)
    missing = [a for a in atoms if a not in table]
    if missing:
        raise StructureError(f"f is not total: missing {to_text(missing[0])}")
    extra = [a for a in table if a not in atoms]
    if extra:
        raise StructureError(f"{to_text(extra[0])} does not mention {xs[-1]}")
    graph = profile.graph_rels(vocab)
    for a, v in table.items():
        if A.labels[v] in profile.forbidden.get(a.rel, ()):
            raise StructureError(f"{to_text(a)} = {A.labels[v]} lies outside the support")
        if a.rel in graph:
            i, j = a.args
            if i == j and v != A.bottom:
                raise StructureError(f"graph profile requires {to_text(a)} = {A.labels[A.bottom]}")
            twin = Atom(a.rel, (j, i))
            if table[twin] != v:
                raise StructureError(f"graph profile requires {to_text(a)} = {to_text(twin)}")
    new = xs[-1]
    body = conj([Atom(classical_name(a.rel, A.labels[table[a]]), a.args) for a in atoms]
                or [Const("1")])
    fresh = [neg(Ident(new, x)) for x in xs[:-1]]
    inner = Exists(new, conj(fresh + [body]))
    return forall_distinct(xs[:-1], inner)


# ---------------------------------------------------------------- quantifier elimination


def _demorgan_ready(A: LatticeAlgebra):
    rep = demorgan_check(A)
    if not rep.conditions_hold:
        raise QEError("De Morgan conditions fail: " + "; ".join(l for l in rep.lines() if l.startswith("FAIL")))
    bad = is_distributive(A)
    if bad is not None:
        raise QEError(f"lattice is not distributive (witness {tuple(A.labels[i] for i in bad)})")
    return demorgan_constants(A)


@dataclass(frozen=True)
class _Lit:
    atom: Node
    depth: int


def _nnf(node: Node, A: LatticeAlgebra, negs: int = 0) -> Node:
    """``not^negs node`` with negations pushed onto atoms, at most two deep."""
    negs = _reduce_depth(negs)
    if isinstance(node, Const):
        v = A.index(node.label)
        for _ in range(negs):
            v = A.ops["not"](v)
        return Const(A.labels[v])
    if isinstance(node, Atom):
        return _lit_node(node, negs)
    if isinstance(node, Ident):
        raise QEError("crisp identity is not supported by quantifier elimination")
    if isinstance(node, Op):
        if node.name == "not":
            return _nnf(node.args[0], A, negs + 1)
        if node.name in ("and", "or"):
            name = node.name
            if negs == 1:
                name = "or" if name == "and" else "and"
            return Op(name, tuple(_nnf(c, A, negs) for c in node.args))
        raise QEError(f"connective {node.name!r} is outside {{and, or, not}}")
    if isinstance(node, (Forall, Exists)):
        if negs == 0:
            return type(node)(node.var, _nnf(node.body, A, 0))
        # eliminate first, then negate the quantifier-free result
        return _nnf(qe_formula(type(node)(node.var, _nnf(node.body, A, 0)), A), A, negs)
    raise QEError(f"unsupported node {node!r}")


def _reduce_depth(n: int) -> int:
    """``not^n`` equals ``not^(n-2)`` once ``n >= 3``."""
    while n >= 3:
        n -= 2
    return n


def _lit_node(atom: Node, d: int) -> Node:
    for _ in range(d):
        atom = Op("not", (atom,))
    return atom


def _as_lit(node: Node) -> Optional[_Lit]:
    d = 0
    while isinstance(node, Op) and node.name == "not":
        d += 1
        node = node.args[0]
    if isinstance(node, Atom):
        return _Lit(node, d)
    return None


def _clauses(node: Node, A: LatticeAlgebra, dual: bool):
    """DNF (``dual=False``) or CNF clauses as (constant, frozenset of literals)."""
    inner, outer = ("and", "or") if not dual else ("or", "and")
    unit = A.top if not dual else A.bottom
    absorbing = A.bottom if not dual else A.top
    combine = A.meet if not dual else A.join
    if isinstance(node, Const):
        v = A.index(node.label)
        return [] if v == absorbing else [(v, frozenset())]
    lit = _as_lit(node)
    if lit is not None:
        return [(unit, frozenset([lit]))]
    if isinstance(node, Op) and node.name == outer:
        return _clauses(node.args[0], A, dual) + _clauses(node.args[1], A, dual)
    if isinstance(node, Op) and node.name == inner:
        left, right = _clauses(node.args[0], A, dual), _clauses(node.args[1], A, dual)
        out = []
        for (c1, l1), (c2, l2) in itertools.product(left, right):
            c = combine(c1, c2)
            if c != absorbing:
                out.append((c, l1 | l2))
        return list(dict.fromkeys(out))
    raise QEError(f"unexpected node in normal form: {node!r}")


def _eliminate(x: str, clauses, A: LatticeAlgebra, E, dual: bool) -> Node:
    """Replace the literal groups mentioning ``x`` by constants."""
    inner_join = A.meet if not dual else A.join
    out_parts = []
    for c, lits in clauses:
        groups: dict[Node, set] = {}
        rest = []
        for l in lits:
            if x in l.atom.args:
                groups.setdefault(l.atom, set()).add(l.depth)
            else:
                rest.append(l)
        for ds in groups.values():
            if not dual:
                if 0 in ds:
                    ds.discard(2)
                if len(ds) == 1:
                    v = A.top
                elif ds == {0, 1}:
                    v = E.eps
                else:
                    v = E.eps_prime
            else:
                if 2 in ds:
                    ds.discard(0)
                if len(ds) == 1:
                    v = A.bottom
                elif ds == {0, 1}:
                    v = E.delta
                else:
                    v = E.delta_prime
            c = inner_join(c, v)
        out_parts.append((c, rest))
    return _rebuild(out_parts, A, dual)


def _rebuild(parts, A: LatticeAlgebra, dual: bool) -> Node:
    inner, outer = ("and", "or") if not dual else ("or", "and")
    unit, absorbing = (A.top, A.bottom) if not dual else (A.bottom, A.top)
    fold = A.join if not dual else A.meet
    K = absorbing  # constant-only parts, folded with the outer operation
    terms = []
    for c, lits in parts:
        if c == absorbing:
            continue
        nodes = [_lit_node(l.atom, l.depth) for l in sorted(lits, key=lambda l: (to_text(l.atom), l.depth))]
        if not nodes:
            K = fold(K, c)
            continue
        if c != unit:
            nodes.insert(0, Const(A.labels[c]))
        terms.append(_chain(inner, nodes))
    if K == unit or not terms:
        return Const(A.labels[K])
    if K != absorbing:
        terms.insert(0, Const(A.labels[K]))
    return _chain(outer, terms)


def _chain(name: str, items: Sequence[Node]) -> Node:
    node = items[0]
    for it in items[1:]:
        node = Op(name, (node, it))
    return node


def _fold_constants(node: Node, A: LatticeAlgebra) -> Node:
    """Evaluate a closed quantifier-free formula to a constant when possible."""
    if isinstance(node, Const):
        return node
    if isinstance(node, Op):
        args = tuple(_fold_constants(c, A) for c in node.args)
        if all(isinstance(a, Const) for a in args):
            return Const(A.labels[A.apply(node.name, *(A.index(a.label) for a in args))])
        return Op(node.name, args)
    return node


def qe_formula(node: Node, A: LatticeAlgebra, E=None) -> Node:
    E = E or _demorgan_ready(A)
    if isinstance(node, (Forall, Exists)):
        body = qe_formula(node.body, A, E)
        body = _nnf(body, A, 0)
        dual = isinstance(node, Forall)
        clauses = _clauses(body, A, dual)
        return _eliminate(node.var, clauses, A, E, dual)
    if isinstance(node, Op):
        return Op(node.name, tuple(qe_formula(c, A, E) for c in node.args))
    return node


def qe_demorgan(phi: Node, A: LatticeAlgebra) -> Node:
    """Quantifier-free formula with the same almost-sure value as ``phi`` (profile ``none``)."""
    E = _demorgan_ready(A)
    for n in _walk_nodes(phi):
        if isinstance(n, Op) and n.name not in ("and", "or", "not"):
            raise QEError(f"connective {n.name!r} is outside {{and, or, not}}")
        if isinstance(n, Ident):
            raise QEError("crisp identity is not supported by quantifier elimination")
        if isinstance(n, Const):
            A.index(n.label)
        if isinstance(n, Thresh):
            raise QEError("threshold events are not supported by quantifier elimination")
    out = qe_formula(_nnf(phi, A, 0), A, E)
    return _fold_constants(_nnf(out, A, 0), A)


def _walk_nodes(node: Node):
    from .syntax import _walk
    return _walk(node)


def almost_sure_set_demorgan(A: LatticeAlgebra) -> tuple[int, ...]:
    """``{0, eps, eps', delta, delta', 1}`` as element indices in carrier order."""
    E = _demorgan_ready(A)
    return tuple(sorted({A.bottom, A.top, *E.as_tuple()}))


def demorgan_witnesses(A: LatticeAlgebra, predicate: str = "P") -> dict[int, list[Node]]:
    """Sentences realising each element of the De Morgan almost-sure set."""
    E = _demorgan_ready(A)
    terms = {
        "forall": [("v", A.bottom), ("v | not v", E.delta), ("not v | not not v", E.delta_prime)],
        "exists": [("v", A.top), ("v & not v", E.eps), ("not v & not not v", E.eps_prime)],
    }
    out: dict[int, list[Node]] = {}
    for which, items in terms.items():
        for text, expected in items:
            t = parse_term(text)
            univ, exist = witness_sentences(t, predicate=predicate, prefix="x")
            out.setdefault(expected, []).append(univ if which == "forall" else exist)
    return out


# ---------------------------------------------------------------- witness terms


def lukasiewicz_witness_term(N: int, k: int) -> Node:
    """A term over ``v`` whose minimum on the (N+1)-element MV-chain is ``k/N``.

    ``k >= 1`` gives ``k(v^N + not v)``; ``k = 0`` gives ``v``.
    """
    if not 0 <= k <= N:
        raise ValueError("need 0 <= k <= N")
    if k == 0:
        return Var("v")
    v = Var("v")
    p = v
    for _ in range(N - 1):
        p = Op("odot", (p, v))
    base = Op("oplus", (p, Op("not", (v,))))
    out = base
    for _ in range(k - 1):
        out = Op("oplus", (out, base))
    return out


def godel_witness_term(k: int) -> Node:
    """``t_1 = v1 | not v1``, ``t_{j+1} = v_{j+1} | (v_{j+1} -> t_j)``; ``k = 0`` gives ``v1``."""
    if k < 0:
        raise ValueError("need k >= 0")
    if k == 0:
        return Var("v1")
    t = Op("or", (Var("v1"), Op("not", (Var("v1"),))))
    for j in range(2, k + 1):
        vj = Var(f"v{j}")
        t = Op("or", (vj, Op("imp", (vj, t))))
    return t
