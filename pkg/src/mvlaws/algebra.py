"""Finite lattice algebras: construction, validation, De Morgan constants, term ranges."""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .config import Budgets, BudgetExceeded, DEFAULT_BUDGETS
from .syntax import Const, Node, Op, Var, term_variables

__all__ = [
    "Operation", "LatticeAlgebra", "AlgebraError", "DeMorganConstants", "DeMorganReport",
    "LawResult", "TermRange", "validate_algebra", "check_algebra", "make_mv_chain",
    "make_godel_chain", "make_boolean", "make_trivial", "product", "reduct",
    "demorgan_check", "demorgan_constants", "term_range_finite", "compile_term",
    "get_algebra", "algebra_to_json", "algebra_names", "is_distributive",
    "DE_MORGAN_SIGNATURE",
]

DE_MORGAN_SIGNATURE = frozenset({"and", "or", "not"})


class AlgebraError(ValueError):
    """Raised for an invalid algebra description; ``diagnostics`` lists every violation."""

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics) if self.diagnostics else "invalid algebra")


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple  # nested tuples, depth == arity

    def __call__(self, *args: int) -> int:
        t = self.table
        for a in args:
            t = t[a]
        return t


@dataclass(frozen=True, eq=False)
class LatticeAlgebra:
    """A finite algebra with a lattice reduct.

    Elements are indices into ``labels``. ``ops`` always contains ``and``
    (meet) and ``or`` (join); further connectives are optional.
    ``values`` carries exact rational annotations for chains.
    """

    name: str
    labels: tuple[str, ...]
    ops: Mapping[str, Operation]
    bottom: int
    top: int
    values: Optional[tuple[Fraction, ...]] = None
    _index: Mapping[str, int] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    @property
    def signature(self) -> dict[str, int]:
        return {n: o.arity for n, o in self.ops.items()}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} is not an element of {self.name}") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    def meet(self, a: int, b: int) -> int:
        return self.ops["and"].table[a][b]

    def join(self, a: int, b: int) -> int:
        return self.ops["or"].table[a][b]

    def leq(self, a: int, b: int) -> bool:
        return self.ops["and"].table[a][b] == a

    def apply(self, name: str, *args: int) -> int:
        return self.ops[name](*args)

    def has(self, name: str) -> bool:
        return name in self.ops

    def meet_all(self, xs: Iterable[int]) -> int:
        t = self.ops["and"].table
        acc = self.top
        for x in xs:
            acc = t[acc][x]
        return acc

    def join_all(self, xs: Iterable[int]) -> int:
        t = self.ops["or"].table
        acc = self.bottom
        for x in xs:
            acc = t[acc][x]
        return acc

    def value(self, i: int) -> Optional[Fraction]:
        return None if self.values is None else self.values[i]

    def describe(self, i: int) -> str:
        """Label, plus the exact rational when it differs from the label."""
        lab = self.labels[i]
        v = self.value(i)
        if v is not None and str(v) != lab:
            return f"{lab} ({v})"
        return lab

    def __repr__(self) -> str:
        return f"LatticeAlgebra({self.name!r}, {len(self.labels)} elements, ops={sorted(self.ops)})"


# ---------------------------------------------------------------- building


def _table_from_fn(n: int, arity: int, fn: Callable[..., int]) -> tuple:
    if arity == 1:
        return tuple(fn(a) for a in range(n))
    if arity == 2:
        return tuple(tuple(fn(a, b) for b in range(n)) for a in range(n))
    if arity == 3:
        return tuple(tuple(tuple(fn(a, b, c) for c in range(n)) for b in range(n)) for a in range(n))
    raise ValueError(f"arity {arity} not supported (1..3)")


def _from_functions(name: str, labels: Sequence[str], fns: Mapping[str, tuple[int, Callable]],
                    values=None) -> LatticeAlgebra:
    n = len(labels)
    ops = {op: Operation(op, ar, _table_from_fn(n, ar, fn)) for op, (ar, fn) in fns.items()}
    return _finish(name, tuple(labels), ops, None, None, values)


def _finish(name, labels, ops, bottom, top, values) -> LatticeAlgebra:
    n = len(labels)
    meet = ops["and"].table
    if bottom is None:
        bottom = 0
        for x in range(n):
            bottom = meet[bottom][x]
    if top is None:
        join = ops["or"].table
        top = 0
        for x in range(n):
            top = join[top][x]
    return LatticeAlgebra(name, tuple(labels), dict(ops), bottom, top,
                          tuple(values) if values is not None else None)


def _frac_label(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def make_mv_chain(N: int) -> LatticeAlgebra:
    """The Lukasiewicz chain {0, 1/N, ..., 1} with min/max, imp, not, oplus, odot."""
    if not isinstance(N, int) or N < 1:
        raise AlgebraError([f"MV-chain needs N >= 1, got {N!r}"])
    vals = [Fraction(j, N) for j in range(N + 1)]
    idx = {v: j for j, v in enumerate(vals)}
    one, zero = Fraction(1), Fraction(0)

    def lift(f):
        return lambda *a: idx[f(*(vals[x] for x in a))]

    fns = {
        "and": (2, lift(min)),
        "or": (2, lift(max)),
        "not": (1, lift(lambda a: one - a)),
        "imp": (2, lift(lambda a, b: min(one, one - a + b))),
        "oplus": (2, lift(lambda a, b: min(one, a + b))),
        "odot": (2, lift(lambda a, b: max(zero, a + b - one))),
    }
    return _from_functions(f"L{N + 1}", [_frac_label(v) for v in vals], fns, vals)


def make_godel_chain(labels) -> LatticeAlgebra:
    """Goedel chain with residuated implication and ``not a = a -> 0``.

    ``labels`` is an ascending sequence of element names, or an integer
    element count (names ``0, g1, ..., 1``).
    """
    if isinstance(labels, int):
        m = labels
        if m < 2:
            raise AlgebraError([f"G-chain needs at least 2 elements, got {m}"])
        labels = ["0"] + [f"g{j}" for j in range(1, m - 1)] + ["1"]
    labels = list(labels)
    if len(labels) < 2:
        raise AlgebraError([f"G-chain needs at least 2 elements, got {len(labels)}"])
    if len(set(labels)) != len(labels):
        raise AlgebraError(["duplicate chain labels"])
    top = len(labels) - 1
    fns = {
        "and": (2, min),
        "or": (2, max),
        "imp": (2, lambda a, b: top if a <= b else b),
        "not": (1, lambda a: top if a == 0 else 0),
    }
    return _from_functions(f"G{len(labels)}", labels, fns)


def make_boolean() -> LatticeAlgebra:
    fns = {
        "and": (2, min),
        "or": (2, max),
        "not": (1, lambda a: 1 - a),
        "imp": (2, lambda a, b: max(1 - a, b)),
    }
    return _from_functions("B2", ["0", "1"], fns, [Fraction(0), Fraction(1)])


def make_trivial(signature: Mapping[str, int], label: str = "*") -> LatticeAlgebra:
    """One-element algebra over the given signature (identity for ``product``)."""
    ops = {n: Operation(n, k, _table_from_fn(1, k, lambda *a: 0)) for n, k in signature.items()}
    return _finish("T1", (label,), ops, 0, 0, None)


def product(A: LatticeAlgebra, B: LatticeAlgebra, name: Optional[str] = None) -> LatticeAlgebra:
    """Componentwise product; both factors must have identical signatures."""
    if A.signature != B.signature:
        raise AlgebraError([f"signature mismatch: {sorted(A.signature.items())} vs {sorted(B.signature.items())}"])
    pairs = [(a, b) for a in A.elements for b in B.elements]
    if A.size == 1:
        labels = [B.labels[b] for _, b in pairs]
    elif B.size == 1:
        labels = [A.labels[a] for a, _ in pairs]
    else:
        labels = [f"({A.labels[a]},{B.labels[b]})" for a, b in pairs]
    pidx = {p: i for i, p in enumerate(pairs)}

    def lift(na: str):
        oa, ob = A.ops[na], B.ops[na]
        return lambda *xs: pidx[(oa(*(pairs[x][0] for x in xs)), ob(*(pairs[x][1] for x in xs)))]

    n = len(pairs)
    ops = {na: Operation(na, o.arity, _table_from_fn(n, o.arity, lift(na))) for na, o in A.ops.items()}
    values = None
    if A.size == 1 and B.values is not None:
        values = B.values
    elif B.size == 1 and A.values is not None:
        values = A.values
    return _finish(name or f"prod({A.name},{B.name})", labels, ops,
                   pidx[(A.bottom, B.bottom)], pidx[(A.top, B.top)], values)


def reduct(A: LatticeAlgebra, keep: Iterable[str]) -> LatticeAlgebra:
    """Restrict the signature to ``keep``; the lattice operations are always retained."""
    keep = set(keep)
    unknown = keep - set(A.ops)
    if unknown:
        raise AlgebraError([f"unknown connective(s) {sorted(unknown)} for {A.name}"])
    keep |= {"and", "or"}
    ops = {n: o for n, o in A.ops.items() if n in keep}
    name = A.name if set(ops) == set(A.ops) else f"{A.name}[{','.join(sorted(keep))}]"
    return LatticeAlgebra(name, A.labels, ops, A.bottom, A.top, A.values)


# ---------------------------------------------------------------- validation


def check_algebra(A: LatticeAlgebra) -> list[str]:
    """Every violated lattice axiom, with a witnessing pair or triple."""
    diags: list[str] = []
    n = A.size
    L = A.labels
    m, j = A.ops["and"].table, A.ops["or"].table
    for nm, t in (("meet", m), ("join", j)):
        for a in range(n):
            if t[a][a] != a:
                diags.append(f"{nm}: idempotency fails at ({L[a]})")
            for b in range(n):
                if t[a][b] != t[b][a]:
                    diags.append(f"{nm}: commutativity fails at ({L[a]},{L[b]})")
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        diags.append(f"{nm}: associativity fails at ({L[a]},{L[b]},{L[c]})")
    for a in range(n):
        for b in range(n):
            if m[a][j[a][b]] != a:
                diags.append(f"absorption a and (a or b) = a fails at ({L[a]},{L[b]})")
            if j[a][m[a][b]] != a:
                diags.append(f"absorption a or (a and b) = a fails at ({L[a]},{L[b]})")
    for x in range(n):
        if m[A.bottom][x] != A.bottom:
            diags.append(f"declared bottom {L[A.bottom]} is not below {L[x]}")
        if m[x][A.top] != x:
            diags.append(f"declared top {L[A.top]} is not above {L[x]}")
    return diags


def _parse_table(raw, arity: int, n: int, idx: Mapping[str, int], name: str, diags: list) -> Optional[tuple]:
    def entry(v, where):
        if isinstance(v, bool):
            diags.append(f"{name}: non-element entry {v!r} at {where}")
            return None
        if isinstance(v, int):
            if 0 <= v < n:
                return v
            diags.append(f"{name}: index {v} out of range at {where}")
            return None
        if isinstance(v, str) and v in idx:
            return idx[v]
        diags.append(f"{name}: unknown element {v!r} at {where}")
        return None

    def go(t, level, where):
        if level == arity:
            return entry(t, where)
        if not isinstance(t, (list, tuple)) or len(t) != n:
            diags.append(f"{name}: table is not total (row {where or '()'} has "
                         f"{len(t) if isinstance(t, (list, tuple)) else 'no'} entries, need {n})")
            return None
        return tuple(go(x, level + 1, where + (i,)) for i, x in enumerate(t))

    before = len(diags)
    out = go(raw, 0, ())
    return out if len(diags) == before else None


def validate_algebra(desc: Mapping, name: str = "custom") -> LatticeAlgebra:
    """Build an algebra from its JSON-style description or raise ``AlgebraError``.

    ``desc`` = ``{"carrier": [...], "ops": {"and": [[...]], "or": ..., "not": [...]},
    "bottom": label, "top": label, "values": {label: "p/q"}, "arity": {op: k}}``.
    Table entries may be labels or indices.
    """
    diags: list[str] = []
    carrier = desc.get("carrier")
    if not isinstance(carrier, list) or not carrier:
        raise AlgebraError(["carrier must be a non-empty list of labels"])
    labels = [str(c) for c in carrier]
    if len(set(labels)) != len(labels):
        raise AlgebraError(["carrier labels must be distinct"])
    n = len(labels)
    idx = {l: i for i, l in enumerate(labels)}
    raw_ops = desc.get("ops") or {}
    for req in ("and", "or"):
        if req not in raw_ops:
            diags.append(f"missing lattice operation {req!r}")
    arities = dict(desc.get("arity", {}))
    ops = {}
    for op_name, raw in raw_ops.items():
        ar = arities.get(op_name)
        if ar is None:
            ar, t = 0, raw
            while isinstance(t, (list, tuple)):
                ar += 1
                t = t[0] if t else None
        if ar < 1 or ar > 3:
            diags.append(f"{op_name}: arity {ar} not supported (1..3)")
            continue
        table = _parse_table(raw, ar, n, idx, op_name, diags)
        if table is not None:
            ops[op_name] = Operation(op_name, ar, table)
    for key in ("bottom", "top"):
        if key in desc and desc[key] not in idx:
            diags.append(f"declared {key} {desc[key]!r} is not in the carrier")
    if diags:
        raise AlgebraError(diags)
    if "and" in ops and "or" in ops:
        meet = ops["and"].table
        if "leq" in desc:
            raw = desc["leq"]
            if not isinstance(raw, list) or len(raw) != n or any(len(r) != n for r in raw):
                diags.append("leq: table is not total")
            else:
                for a in range(n):
                    for b in range(n):
                        if bool(raw[a][b]) != (meet[a][b] == a):
                            diags.append(f"leq disagrees with meet at ({labels[a]},{labels[b]})")
    values = None
    if "values" in desc:
        try:
            values = tuple(Fraction(str(desc["values"][l])) for l in labels)
        except (KeyError, ValueError) as e:
            diags.append(f"values: {e}")
    bottom = idx[desc["bottom"]] if "bottom" in desc else None
    top = idx[desc["top"]] if "top" in desc else None
    A = _finish(desc.get("name", name), labels, ops, bottom if bottom is not None else 0,
                top if top is not None else 0, values)
    if bottom is None or top is None:
        # bounds of a finite lattice: fold meet/join over the carrier
        b, t = 0, 0
        for x in range(n):
            b = ops["and"].table[b][x]
            t = ops["or"].table[t][x]
        A = LatticeAlgebra(A.name, A.labels, A.ops, bottom if bottom is not None else b,
                           top if top is not None else t, A.values)
    diags.extend(check_algebra(A))
    if diags:
        raise AlgebraError(diags)
    return A


def algebra_to_json(A: LatticeAlgebra) -> dict:
    def lab(t, k):
        if k == 0:
            return A.labels[t]
        return [lab(x, k - 1) for x in t]

    out = {
        "name": A.name,
        "carrier": list(A.labels),
        "ops": {n: lab(o.table, o.arity) for n, o in A.ops.items()},
        "bottom": A.labels[A.bottom],
        "top": A.labels[A.top],
    }
    if A.values is not None:
        out["values"] = {l: str(v) for l, v in zip(A.labels, A.values)}
    return out


def is_distributive(A: LatticeAlgebra) -> Optional[tuple[int, int, int]]:
    """``None`` if distributive, else a failing triple."""
    for a, b, c in itertools.product(A.elements, repeat=3):
        if A.meet(a, A.join(b, c)) != A.join(A.meet(a, b), A.meet(a, c)):
            return (a, b, c)
    return None


# ---------------------------------------------------------------- named algebras

_NAME = re.compile(r"^(B2|L(\d+)|G(\d+))$")


def _split_args(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def get_algebra(name: str) -> LatticeAlgebra:
    """Resolve ``B2``, ``L<n>``, ``G<n>``, ``prod(X,Y)``, ``X[op,op]`` or a JSON file path.

    ``L<n>`` and ``G<n>`` have ``n`` elements. ``prod`` takes the product over the
    shared signature of its factors. ``X[and,or,not]`` is a reduct.
    """
    name = name.strip()
    m = re.match(r"^(.*)\[([A-Za-z_,\s]*)\]$", name)
    if m:
        return reduct(get_algebra(m.group(1)), [s.strip() for s in m.group(2).split(",") if s.strip()])
    if name.startswith("prod(") and name.endswith(")"):
        args = _split_args(name[5:-1])
        if len(args) < 2:
            raise AlgebraError([f"prod needs at least two factors: {name}"])
        factors = [get_algebra(a) for a in args]
        shared = set.intersection(*(set(f.ops) for f in factors))
        for f in factors[1:]:
            for op in shared:
                if f.ops[op].arity != factors[0].ops[op].arity:
                    raise AlgebraError([f"connective {op} has different arities in {name}"])
        factors = [reduct(f, shared) for f in factors]
        out = factors[0]
        for f in factors[1:]:
            out = product(out, f)
        return LatticeAlgebra(name, out.labels, out.ops, out.bottom, out.top, out.values)
    mm = _NAME.match(name)
    if mm:
        if name == "B2":
            return make_boolean()
        if mm.group(2):
            k = int(mm.group(2))
            if k < 2:
                raise AlgebraError([f"{name}: need at least 2 elements"])
            return make_mv_chain(k - 1)
        return make_godel_chain(int(mm.group(3)))
    p = Path(name)
    if p.suffix == ".json" and p.exists():
        return validate_algebra(json.loads(p.read_text()), name=p.stem)
    raise AlgebraError([f"unknown algebra {name!r} (use B2, L<n>, G<n>, prod(X,Y), X[ops] or a .json file)"])


def algebra_names() -> list[str]:
    return ["B2", "L3", "L4", "L5", "L6", "G3", "G4", "G5", "prod(G3,L4)"]


# ---------------------------------------------------------------- De Morgan


@dataclass(frozen=True)
class LawResult:
    law: str
    holds: bool
    witness: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class DeMorganConstants:
    eps: int
    eps_prime: int
    delta: int
    delta_prime: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.eps, self.eps_prime, self.delta, self.delta_prime)


@dataclass
class DeMorganReport:
    algebra: str
    laws: list[LawResult]
    distributive: LawResult
    constants: Optional[DeMorganConstants] = None
    notes: list[str] = field(default_factory=list)

    @property
    def conditions_hold(self) -> bool:
        """Conditions (1)-(3): negation swaps meet/join, v <= not not v, not 1 = 0."""
        return all(l.holds for l in self.laws if l.law.split(":")[0] in ("1a", "1b", "2", "3"))

    def law(self, key: str) -> LawResult:
        for l in self.laws:
            if l.law.split(":")[0] == key:
                return l
        raise KeyError(key)

    def lines(self) -> list[str]:
        out = []
        for l in self.laws + [self.distributive]:
            w = f"  witness {l.witness}" if l.witness else ""
            out.append(f"{'ok  ' if l.holds else 'FAIL'} {l.law}{w}")
        return out + self.notes


def _first(it, check):
    for x in it:
        if not check(*x):
            return x
    return None


def demorgan_check(A: LatticeAlgebra) -> DeMorganReport:
    if "not" not in A.ops:
        raise AlgebraError([f"{A.name} has no negation"])
    N = A.ops["not"]
    L = A.labels
    E = list(A.elements)
    pairs = list(itertools.product(E, E))

    def res(key, text, bad):
        return LawResult(f"{key}: {text}", bad is None,
                         None if bad is None else tuple(L[x] for x in bad))

    laws = [
        res("1a", "not(v and w) = not v or not w",
            _first(pairs, lambda v, w: N(A.meet(v, w)) == A.join(N(v), N(w)))),
        res("1b", "not(v or w) = not v and not w",
            _first(pairs, lambda v, w: N(A.join(v, w)) == A.meet(N(v), N(w)))),
        res("2", "v <= not not v", _first(((v,) for v in E), lambda v: A.leq(v, N(N(v))))),
        res("3", "not 1 = 0", None if N(A.top) == A.bottom else (A.top,)),
        res("4", "v <= w implies not w <= not v",
            _first(pairs, lambda v, w: not A.leq(v, w) or A.leq(N(w), N(v)))),
        res("5", "not not not v = not v", _first(((v,) for v in E), lambda v: N(N(N(v))) == N(v))),
        res("6", "not 0 = not not 1 = 1 and not not 0 = 0",
            None if (N(A.bottom) == A.top and N(N(A.top)) == A.top and N(N(A.bottom)) == A.bottom)
            else (A.bottom,)),
    ]
    eps, epsp, dlt, dltp = _raw_constants(A)
    C = DeMorganConstants(eps, epsp, dlt, dltp)
    chain_ok = (A.leq(A.bottom, eps) and A.leq(eps, epsp) and A.leq(epsp, dlt)
                and A.leq(dlt, dltp) and A.leq(dltp, A.top))
    neg_ok = N(eps) == N(epsp) == dltp and N(dlt) == N(dltp) == epsp
    E6 = {A.bottom, eps, epsp, dlt, dltp, A.top}
    closed = all(A.meet(a, b) in E6 and A.join(a, b) in E6 for a in E6 for b in E6) and all(N(a) in E6 for a in E6)
    laws.append(LawResult("7: 0 <= eps <= eps' <= delta <= delta' <= 1, not eps = not eps' = delta', "
                          "not delta = not delta' = eps', E closed",
                          chain_ok and neg_ok and closed,
                          None if (chain_ok and neg_ok and closed) else tuple(L[x] for x in (eps, epsp, dlt, dltp))))
    bad = is_distributive(A)
    dist = LawResult("distributive lattice", bad is None, None if bad is None else tuple(L[x] for x in bad))
    rep = DeMorganReport(A.name, laws, dist, C)
    if dltp == A.top and dlt != A.top:
        rep.notes.append("note: not v or not not v = 1 for every v here, so delta' = 1 (it is not 0)")
    return rep


def _raw_constants(A: LatticeAlgebra) -> tuple[int, int, int, int]:
    N = A.ops["not"]
    E = A.elements
    eps = A.join_all(A.meet(x, N(x)) for x in E)
    epsp = A.join_all(A.meet(N(x), N(N(x))) for x in E)
    dlt = A.meet_all(A.join(x, N(x)) for x in E)
    dltp = A.meet_all(A.join(N(x), N(N(x))) for x in E)
    return eps, epsp, dlt, dltp


def demorgan_constants(A: LatticeAlgebra) -> DeMorganConstants:
    """eps = sup(x and not x), eps' = sup(not x and not not x), delta = inf(x or not x),
    delta' = inf(not x or not not x), by folding the join/meet tables."""
    rep = demorgan_check(A)
    if not rep.conditions_hold:
        failed = [l.law for l in rep.laws if not l.holds]
        raise AlgebraError([f"De Morgan conditions fail for {A.name}: {failed} (see demorgan_check)"])
    return rep.constants


# ---------------------------------------------------------------- terms


def compile_term(t: Node, A: LatticeAlgebra, variables: Sequence[str]) -> Callable[[Sequence[int]], int]:
    """Compile a term to a function of a tuple of element indices (ordered as ``variables``)."""
    pos = {v: i for i, v in enumerate(variables)}

    def go(n: Node):
        if isinstance(n, Var):
            i = pos[n.name]
            return lambda env: env[i]
        if isinstance(n, Const):
            c = A.index(n.label)
            return lambda env: c
        if isinstance(n, Op):
            if n.name not in A.ops:
                raise AlgebraError([f"connective {n.name!r} not in the signature of {A.name}"])
            op = A.ops[n.name]
            if op.arity != len(n.args):
                raise AlgebraError([f"connective {n.name!r} has arity {op.arity}, used with {len(n.args)}"])
            t = op.table
            subs = [go(a) for a in n.args]
            if len(subs) == 1:
                f0 = subs[0]
                return lambda env: t[f0(env)]
            if len(subs) == 2:
                f0, f1 = subs
                return lambda env: t[f0(env)][f1(env)]
            f0, f1, f2 = subs
            return lambda env: t[f0(env)][f1(env)][f2(env)]
        raise TypeError(f"not a term node: {n!r}")

    return go(t)


@dataclass(frozen=True)
class TermRange:
    variables: tuple[str, ...]
    min: int
    max: int
    argmin: tuple[int, ...]
    argmax: tuple[int, ...]


def term_range_finite(A: LatticeAlgebra, t: Node, budgets: Budgets = DEFAULT_BUDGETS) -> TermRange:
    """Exact inf/sup of a term over A^k by exhaustive enumeration.

    The extrema are meets/joins of all values; the arg-tuples are the first
    (lexicographic) tuples attaining them when attained (always for chains).
    """
    vs = term_variables(t)
    k = len(vs)
    if A.size ** k > budgets.max_term_points:
        raise BudgetExceeded(f"|A|^k = {A.size}^{k} exceeds term budget {budgets.max_term_points}")
    f = compile_term(t, A, vs)
    vals = {}
    for tup in itertools.product(A.elements, repeat=k):
        vals.setdefault(f(tup), tup)
    lo = A.meet_all(vals)
    hi = A.join_all(vals)
    return TermRange(vs, lo, hi, vals.get(lo, ()), vals.get(hi, ()))
