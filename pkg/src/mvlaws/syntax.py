"""Abstract syntax, parsing and printing of many-valued first-order formulas.

One node family covers four uses:

* first-order formulas: ``Atom``, ``Ident`` (crisp identity), ``Const``,
  ``Op``, ``Forall``, ``Exists`` and, for [0,1]-valued logic, ``Thresh``;
* algebra terms: ``Var`` leaves combined with ``Op``;
* modal formulas: ``Var`` leaves (propositional letters), ``Op``, ``Box``,
  ``Dia``;
* classical formulas over the translated vocabulary (same nodes, relation
  names of the form ``R^a``).

Concrete grammar (EBNF)::

    formula  := quant | imp
    quant    := ("forall" | "exists") IDENT {"," IDENT} "." formula
    imp      := disj ["->" formula]
    disj     := conj {"|" conj}
    conj     := unary {"&" unary}
    unary    := ("not" | "box" | "dia") unary | primary
    primary  := "(" formula ")"
              | "#" LABEL
              | "pow" "(" formula "," INT ")"
              | "times" "(" INT "," formula ")"
              | ("ge" | "le") "(" formula "," RATIONAL ")"
              | NAME "(" formula {"," formula} ")"     (connective)
              | NAME "(" IDENT {"," IDENT} ")"         (relation atom)
              | IDENT "~" IDENT                        (crisp identity)
              | IDENT                                  (term / modal variable)

``pow(f, n)`` and ``times(n, f)`` expand to ``odot``/``oplus`` chains.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

__all__ = [
    "Var", "Atom", "Ident", "Const", "Op", "Forall", "Exists", "Box", "Dia",
    "Thresh", "Node", "Formula", "Term", "Vocabulary", "ParseError",
    "parse_formula", "parse_term", "parse_modal", "to_text", "free_variables",
    "relations_of", "quantifier_depth", "depth", "size", "term_variables",
    "is_fully_modal", "s5_translate", "witness_sentences", "infer_vocabulary",
    "forall_many", "exists_many", "conj", "disj", "neg", "natural_key",
    "CONNECTIVE_ARITY",
]


# ---------------------------------------------------------------- nodes


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Ident:
    left: str
    right: str


@dataclass(frozen=True)
class Const:
    label: str


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple["Node", ...]


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Node"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Node"


@dataclass(frozen=True)
class Box:
    body: "Node"


@dataclass(frozen=True)
class Dia:
    body: "Node"


@dataclass(frozen=True)
class Thresh:
    """Crisp threshold event: 1 iff the body's value is >= (``ge``) or <= (``le``) ``bound``."""

    kind: str
    bound: Fraction
    body: "Node"


Node = Union[Var, Atom, Ident, Const, Op, Forall, Exists, Box, Dia, Thresh]
Formula = Node
Term = Node

Quantifier = (Forall, Exists)

# Arity of the connectives the parser knows without an algebra at hand.
CONNECTIVE_ARITY: dict[str, int] = {
    "and": 2, "or": 2, "not": 1, "imp": 2, "oplus": 2, "odot": 2, "prod": 2,
}


def conj(parts: Iterable[Node], empty: Optional[Node] = None) -> Node:
    parts = list(parts)
    if not parts:
        if empty is None:
            raise ValueError("empty conjunction")
        return empty
    out = parts[0]
    for p in parts[1:]:
        out = Op("and", (out, p))
    return out


def disj(parts: Iterable[Node], empty: Optional[Node] = None) -> Node:
    parts = list(parts)
    if not parts:
        if empty is None:
            raise ValueError("empty disjunction")
        return empty
    out = parts[0]
    for p in parts[1:]:
        out = Op("or", (out, p))
    return out


def neg(f: Node) -> Node:
    return Op("not", (f,))


def forall_many(variables: Sequence[str], body: Node) -> Node:
    for v in reversed(variables):
        body = Forall(v, body)
    return body


def exists_many(variables: Sequence[str], body: Node) -> Node:
    for v in reversed(variables):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------- vocabulary


@dataclass(frozen=True)
class Vocabulary:
    relations: tuple[tuple[str, int], ...]
    has_crisp_identity: bool = False

    def __post_init__(self):
        names = [n for n, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate relation names in {names}")
        for n, k in self.relations:
            if k < 1:
                raise ValueError(f"relation {n} has arity {k} < 1")
            if n == "Id":
                raise ValueError("relation name 'Id' is reserved for crisp identity")

    @property
    def max_arity(self) -> int:
        return max((k for _, k in self.relations), default=0)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    def arity(self, name: str) -> int:
        for n, k in self.relations:
            if n == name:
                return k
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.relations)

    @classmethod
    def parse(cls, text: str, crisp_identity: bool = False) -> "Vocabulary":
        """``"P/1,R/2"`` -> vocabulary; a bare ``~`` entry switches on crisp identity."""
        rels = []
        for part in (p.strip() for p in text.split(",")):
            if not part:
                continue
            if part == "~":
                crisp_identity = True
                continue
            name, _, ar = part.partition("/")
            rels.append((name.strip(), int(ar) if ar else 1))
        return cls(tuple(rels), crisp_identity)

    def __str__(self) -> str:
        s = ",".join(f"{n}/{k}" for n, k in self.relations)
        return s + (",~" if self.has_crisp_identity else "")


def infer_vocabulary(*formulas: Node) -> Vocabulary:
    arities: dict[str, int] = {}
    crisp = False
    for f in formulas:
        for node in _walk(f):
            if isinstance(node, Atom):
                k = arities.setdefault(node.rel, len(node.args))
                if k != len(node.args):
                    raise ParseError(f"relation {node.rel} used with arities {k} and {len(node.args)}")
            elif isinstance(node, Ident):
                crisp = True
    return Vocabulary(tuple(sorted(arities.items())), crisp)


# ---------------------------------------------------------------- traversal


def _children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Op):
        return node.args
    if isinstance(node, (Forall, Exists, Box, Dia, Thresh)):
        return (node.body,)
    return ()


def _walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(_children(n)))


_FV_CACHE: dict[int, tuple[Node, frozenset]] = {}


def _fv(node: Node) -> frozenset:
    hit = _FV_CACHE.get(id(node))
    if hit is not None and hit[0] is node:
        return hit[1]
    if isinstance(node, Atom):
        out = frozenset(node.args)
    elif isinstance(node, Ident):
        out = frozenset((node.left, node.right))
    elif isinstance(node, (Forall, Exists)):
        out = _fv(node.body) - {node.var}
    elif isinstance(node, (Var, Const)):
        out = frozenset()
    else:
        out = frozenset().union(*(_fv(c) for c in _children(node)))
    if len(_FV_CACHE) > 500_000:
        _FV_CACHE.clear()
    _FV_CACHE[id(node)] = (node, out)
    return out


def free_variables(node: Node) -> tuple[str, ...]:
    """Free individual variables in order of first occurrence."""
    seen: list[str] = []

    def go(n: Node, bound: frozenset):
        if isinstance(n, Atom):
            names = n.args
        elif isinstance(n, Ident):
            names = (n.left, n.right)
        elif isinstance(n, (Forall, Exists)):
            go(n.body, bound | {n.var})
            return
        else:
            for c in _children(n):
                go(c, bound)
            return
        for v in names:
            if v not in bound and v not in seen:
                seen.append(v)

    go(node, frozenset())
    return tuple(seen)


_RELS_CACHE: dict[int, tuple[Node, frozenset]] = {}


def relations_of(node: Node) -> frozenset:
    hit = _RELS_CACHE.get(id(node))
    if hit is not None and hit[0] is node:
        return hit[1]
    out = frozenset(n.rel for n in _walk(node) if isinstance(n, Atom))
    if any(isinstance(n, Ident) for n in _walk(node)):
        out = out | {"~"}
    if len(_RELS_CACHE) > 500_000:
        _RELS_CACHE.clear()
    _RELS_CACHE[id(node)] = (node, out)
    return out


def quantifier_depth(node: Node) -> int:
    if isinstance(node, (Forall, Exists, Box, Dia)):
        return 1 + quantifier_depth(node.body)
    return max((quantifier_depth(c) for c in _children(node)), default=0)


def depth(node: Node) -> int:
    """Height of the syntax tree; leaves have depth 0."""
    return max((1 + depth(c) for c in _children(node)), default=0)


def size(node: Node) -> int:
    """Number of nodes, counting shared subtrees once per occurrence."""
    memo: dict[int, int] = {}

    def go(n):
        k = id(n)
        if k not in memo:
            memo[k] = 1 + sum(go(c) for c in _children(n))
        return memo[k]

    return go(node)


def natural_key(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def term_variables(t: Node) -> tuple[str, ...]:
    """Variables of a term in natural order (v1 < v2 < v10)."""
    names = {n.name for n in _walk(t) if isinstance(n, Var)}
    return tuple(sorted(names, key=natural_key))


def is_fully_modal(m: Node) -> bool:
    def go(n: Node, guarded: bool) -> bool:
        if isinstance(n, Var):
            return guarded
        if isinstance(n, (Box, Dia)):
            return go(n.body, True)
        return all(go(c, guarded) for c in _children(n))

    return go(m, False)


# ---------------------------------------------------------------- printing

_INFIX = {"and": "&", "or": "|", "imp": "->"}


def to_text(node: Node) -> str:
    """Render in the concrete grammar; ``parse(to_text(f)) == f``."""

    def arg(n: Node) -> str:
        s = go(n)
        return f"({s})" if isinstance(n, (Forall, Exists)) else s

    def go(n: Node) -> str:
        if isinstance(n, Var):
            return n.name
        if isinstance(n, Atom):
            return f"{n.rel}({', '.join(n.args)})"
        if isinstance(n, Ident):
            return f"{n.left} ~ {n.right}"
        if isinstance(n, Const):
            return f"#{n.label}"
        if isinstance(n, Forall):
            return f"forall {n.var}. {go(n.body)}"
        if isinstance(n, Exists):
            return f"exists {n.var}. {go(n.body)}"
        if isinstance(n, Box):
            return f"box {_unary_arg(n.body)}"
        if isinstance(n, Dia):
            return f"dia {_unary_arg(n.body)}"
        if isinstance(n, Thresh):
            return f"{n.kind}({go(n.body)}, {n.bound})"
        if isinstance(n, Op):
            if n.name in _INFIX and len(n.args) == 2:
                return f"({arg(n.args[0])} {_INFIX[n.name]} {arg(n.args[1])})"
            if n.name == "not" and len(n.args) == 1:
                return f"not {_unary_arg(n.args[0])}"
            return f"{n.name}({', '.join(go(a) for a in n.args)})"
        raise TypeError(f"not a syntax node: {n!r}")

    def _unary_arg(n: Node) -> str:
        s = go(n)
        if isinstance(n, (Forall, Exists, Ident)):
            return f"({s})"
        return s

    return go(node)


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at column {pos + 1})")


_LABEL = r"(?:\((?:[^()]|\([^()]*\))*\)|[A-Za-z0-9_./\-]+)"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<const>\#{_LABEL})
  | (?P<rational>\d+/\d+|\d+\.\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:\^{_LABEL})?)
  | (?P<punct>[(),.&|~])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"forall", "exists", "not", "box", "dia"}
_SPECIAL_CALLS = {"pow", "times", "ge", "le"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "punct" or kind == "arrow":
                kind = val
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, mode: str, vocab: Optional[Vocabulary],
                 signature: Optional[Mapping[str, int]], labels: Optional[Sequence[str]]):
        self.toks = _tokenize(text)
        self.i = 0
        self.mode = mode  # "formula" | "term" | "modal"
        self.vocab = vocab
        self.signature = dict(signature) if signature is not None else None
        self.labels = set(labels) if labels is not None else None
        self.inferred: dict[str, int] = {}
        self.saw_ident = False

    # token helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        t = self.peek()
        return t[0] == kind and (value is None or t[1] == value)

    # grammar
    def parse(self) -> Node:
        f = self.formula()
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return f

    def formula(self) -> Node:
        t = self.peek()
        if t[0] == "name" and t[1] in ("forall", "exists"):
            if self.mode != "formula":
                raise ParseError("quantifiers are not allowed here", t[2])
            self.next()
            names = [self.expect("name")[1]]
            while self.at(","):
                self.next()
                names.append(self.expect("name")[1])
            for n in names:
                if n in _KEYWORDS:
                    raise ParseError(f"keyword {n!r} used as variable", t[2])
            self.expect(".")
            body = self.formula()
            return (forall_many if t[1] == "forall" else exists_many)(names, body)
        return self.imp()

    def imp(self) -> Node:
        left = self.disj()
        if self.at("->"):
            t = self.next()
            self._check_connective("imp", 2, t[2])
            right = self.formula()
            return Op("imp", (left, right))
        return left

    def disj(self) -> Node:
        left = self.conj()
        while self.at("|"):
            t = self.next()
            self._check_connective("or", 2, t[2])
            left = Op("or", (left, self.conj()))
        return left

    def conj(self) -> Node:
        left = self.unary()
        while self.at("&"):
            t = self.next()
            self._check_connective("and", 2, t[2])
            left = Op("and", (left, self.unary()))
        return left

    def unary(self) -> Node:
        t = self.peek()
        if t[0] == "name" and t[1] in ("forall", "exists"):
            # a quantifier operand takes the rest of the input as its body
            return self.formula()
        if t[0] == "name" and t[1] == "not":
            self.next()
            self._check_connective("not", 1, t[2])
            return Op("not", (self.unary(),))
        if t[0] == "name" and t[1] in ("box", "dia"):
            if self.mode != "modal":
                raise ParseError(f"modal operator {t[1]!r} outside modal mode", t[2])
            self.next()
            body = self.unary()
            return Box(body) if t[1] == "box" else Dia(body)
        return self.primary()

    def primary(self) -> Node:
        t = self.next()
        kind, val, pos = t
        if kind == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "const":
            label = val[1:]
            if self.labels is not None and label not in self.labels:
                raise ParseError(f"constant #{label} is not an element of the algebra", pos)
            return Const(label)
        if kind != "name":
            raise ParseError(f"unexpected {val or 'end of input'!r}", pos)
        if val in _KEYWORDS:
            raise ParseError(f"misplaced keyword {val!r}", pos)
        if self.at("("):
            if val in _SPECIAL_CALLS and not (self.vocab is not None and val in self.vocab):
                return self.special_call(val, pos)
            return self.call(val, pos)
        if self.at("~"):
            self.next()
            right = self.expect("name")[1]
            if self.mode != "formula":
                raise ParseError("identity atoms are only allowed in formulas", pos)
            if self.vocab is not None and not self.vocab.has_crisp_identity:
                raise ParseError("vocabulary has no crisp identity", pos)
            self.saw_ident = True
            return Ident(val, right)
        if self.mode in ("term", "modal"):
            return Var(val)
        raise ParseError(f"expected an atom, found bare name {val!r}", pos)

    def special_call(self, name: str, pos: int) -> Node:
        self.expect("(")
        if name == "pow":
            f = self.formula()
            self.expect(",")
            n = int(self.expect("int")[1])
            self.expect(")")
            if n < 1:
                raise ParseError("pow exponent must be >= 1", pos)
            if n > 1:
                self._check_connective("odot", 2, pos)
            out = f
            for _ in range(n - 1):
                out = Op("odot", (out, f))
            return out
        if name == "times":
            n = int(self.expect("int")[1])
            self.expect(",")
            f = self.formula()
            self.expect(")")
            if n < 1:
                raise ParseError("times multiplier must be >= 1", pos)
            if n > 1:
                self._check_connective("oplus", 2, pos)
            out = f
            for _ in range(n - 1):
                out = Op("oplus", (out, f))
            return out
        # ge / le
        f = self.formula()
        self.expect(",")
        t = self.next()
        if t[0] not in ("rational", "int"):
            raise ParseError("threshold must be a rational number", t[2])
        bound = Fraction(t[1])
        if not 0 <= bound <= 1:
            raise ParseError("threshold must lie in [0,1]", t[2])
        self.expect(")")
        return Thresh(name, bound, f)

    def call(self, name: str, pos: int) -> Node:
        is_rel = self._is_relation(name)
        self.expect("(")
        if is_rel and self.vocab is None and self.peek()[0] == "name" and self.peek(1)[0] == "(":
            raise ParseError(f"unknown connective {name!r}", pos)
        if is_rel and self.vocab is None and self.peek()[0] != "name":
            raise ParseError(f"unknown connective {name!r}", pos)
        if is_rel:
            if self.mode != "formula":
                raise ParseError(f"relation atom {name}(...) not allowed here", pos)
            args = [self.expect("name")[1]]
            while self.at(","):
                self.next()
                args.append(self.expect("name")[1])
            self.expect(")")
            self._check_relation(name, len(args), pos)
            return Atom(name, tuple(args))
        args = [self.formula()]
        while self.at(","):
            self.next()
            args.append(self.formula())
        self.expect(")")
        self._check_connective(name, len(args), pos)
        return Op(name, tuple(args))

    def _is_relation(self, name: str) -> bool:
        if self.vocab is not None and name in self.vocab:
            return True
        if self.signature is not None and name in self.signature:
            return False
        if name in CONNECTIVE_ARITY:
            return False
        if self.vocab is not None:
            if "^" in name:
                return True
            raise ParseError(f"unknown symbol {name!r}")
        return True

    def _check_relation(self, name: str, k: int, pos: int):
        if self.vocab is not None and name in self.vocab:
            want = self.vocab.arity(name)
        else:
            want = self.inferred.setdefault(name, k)
        if want != k:
            raise ParseError(f"arity mismatch: {name} expects {want} arguments, got {k}", pos)

    def _check_connective(self, name: str, k: int, pos: int):
        if self.signature is not None:
            if name not in self.signature:
                raise ParseError(f"connective {name!r} is not in the algebra signature", pos)
            want = self.signature[name]
        else:
            want = CONNECTIVE_ARITY.get(name)
            if want is None:
                raise ParseError(f"unknown connective {name!r}", pos)
        if want != k:
            raise ParseError(f"arity mismatch: {name} expects {want} arguments, got {k}", pos)


def _signature_of(algebra) -> Optional[Mapping[str, int]]:
    if algebra is None:
        return None
    if isinstance(algebra, Mapping):
        return algebra
    return algebra.signature


def parse_formula(text: str, vocab: Optional[Vocabulary] = None, algebra=None,
                  sentence: bool = False) -> Node:
    """Parse a first-order formula.

    ``vocab=None`` infers relations and arities from the text. ``algebra``
    may be a ``LatticeAlgebra`` (restricts connectives and ``#label``
    constants) or a plain name -> arity mapping. With ``sentence=True`` a
    free variable is an error.
    """
    labels = getattr(algebra, "labels", None)
    p = _Parser(text, "formula", vocab, _signature_of(algebra), labels)
    f = p.parse()
    if sentence:
        fv = free_variables(f)
        if fv:
            raise ParseError(f"free variable {fv[0]} in sentence")
    return f


def parse_term(text: str, algebra=None) -> Node:
    labels = getattr(algebra, "labels", None)
    return _Parser(text, "term", None, _signature_of(algebra), labels).parse()


def parse_modal(text: str, algebra=None) -> Node:
    labels = getattr(algebra, "labels", None)
    return _Parser(text, "modal", None, _signature_of(algebra), labels).parse()


# ---------------------------------------------------------------- translations


def _letter_to_predicate(name: str) -> str:
    return name[:1].upper() + name[1:]


def s5_translate(m: Node, world: str = "w") -> Node:
    """Send a modal formula to the one-variable fragment over unary predicates.

    Letters ``p_i`` become ``P_i(w)``; box/dia become universal/existential
    quantification over the single variable ``w``.
    """

    def go(n: Node) -> Node:
        if isinstance(n, Var):
            return Atom(_letter_to_predicate(n.name), (world,))
        if isinstance(n, Box):
            return Forall(world, go(n.body))
        if isinstance(n, Dia):
            return Exists(world, go(n.body))
        if isinstance(n, Op):
            return Op(n.name, tuple(go(a) for a in n.args))
        if isinstance(n, Const):
            return n
        raise TypeError(f"not a modal formula node: {n!r}")

    return go(m)


def substitute_term(t: Node, mapping: Mapping[str, Node]) -> Node:
    if isinstance(t, Var):
        return mapping[t.name]
    if isinstance(t, Op):
        return Op(t.name, tuple(substitute_term(a, mapping) for a in t.args))
    if isinstance(t, Const):
        return t
    raise TypeError(f"not a term node: {t!r}")


def witness_sentences(t: Node, predicate: str = "R", prefix: str = "x") -> tuple[Node, Node]:
    """``(forall x1..xk t(R(x1),..,R(xk)), exists x1..xk t(R(x1),..,R(xk)))``."""
    vs = term_variables(t)
    xs = [f"{prefix}{i + 1}" for i in range(len(vs))]
    body = substitute_term(t, {v: Atom(predicate, (x,)) for v, x in zip(vs, xs)})
    return forall_many(xs, body), exists_many(xs, body)
