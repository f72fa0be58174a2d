"""Random formulas and terms for property tests and experiments."""
from __future__ import annotations

import random
from typing import Mapping, Sequence

from .syntax import Atom, Const, Exists, Forall, Ident, Node, Op, Var, Vocabulary

__all__ = ["random_formula", "random_sentence", "random_term", "DEMORGAN_CONNECTIVES"]

DEMORGAN_CONNECTIVES = {"and": 2, "or": 2, "not": 1}


def random_formula(rng: random.Random, depth: int, vocab: Vocabulary, connectives: Mapping[str, int],
                   scope: Sequence[str] = (), variables: Sequence[str] = ("x", "y", "z"),
                   p_quant: float = 0.3, p_leaf: float = 0.2, constants: Sequence[str] = (),
                   identity: bool = False) -> Node:
    """A formula of height at most ``depth`` whose free variables lie in ``scope``."""
    scope = tuple(scope)
    can_leaf = bool(scope) or bool(constants)
    if depth == 0 or (can_leaf and rng.random() < p_leaf):
        if not can_leaf:
            raise ValueError("no variable in scope and no constants: cannot build a leaf")
        return _leaf(rng, vocab, scope, constants, identity)
    if not scope or rng.random() < p_quant:
        x = rng.choice(variables)
        body = random_formula(rng, depth - 1, vocab, connectives, scope + (x,), variables, p_quant, p_leaf,
                              constants, identity)
        return (Forall if rng.random() < 0.5 else Exists)(x, body)
    name = rng.choice(sorted(connectives))
    args = tuple(random_formula(rng, depth - 1, vocab, connectives, scope, variables, p_quant, p_leaf,
                                constants, identity) for _ in range(connectives[name]))
    return Op(name, args)


def _leaf(rng, vocab, scope, constants, identity) -> Node:
    if constants and (not scope or rng.random() < 0.1):
        return Const(rng.choice(list(constants)))
    if identity and len(scope) and rng.random() < 0.15:
        return Ident(rng.choice(scope), rng.choice(scope))
    rel, k = rng.choice(list(vocab.relations))
    return Atom(rel, tuple(rng.choice(scope) for _ in range(k)))


def random_sentence(rng: random.Random, depth: int, vocab: Vocabulary, connectives: Mapping[str, int],
                    **kw) -> Node:
    """A sentence of height at most ``depth`` (``depth >= 1``)."""
    return random_formula(rng, depth, vocab, connectives, scope=(), **kw)


def random_term(rng: random.Random, depth: int, variables: Sequence[str], connectives: Mapping[str, int],
                p_leaf: float = 0.25) -> Node:
    if depth == 0 or rng.random() < p_leaf:
        return Var(rng.choice(list(variables)))
    name = rng.choice(sorted(connectives))
    return Op(name, tuple(random_term(rng, depth - 1, variables, connectives, p_leaf)
                          for _ in range(connectives[name])))
