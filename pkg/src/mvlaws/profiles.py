"""Constraint profiles: parametric side conditions on the admitted structures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .syntax import Node, Vocabulary

__all__ = ["ConstraintProfile", "parse_profile", "NONE"]


@dataclass(frozen=True)
class ConstraintProfile:
    """Which structures count.

    * ``crisp_identity``: the vocabulary carries ``~`` read as the diagonal.
    * ``graph``: the listed binary relations (``None`` = every binary
      relation) are irreflexive (``R(i,i) = 0``) and symmetric.
    * ``forbidden``: per-relation labels that never occur (support restriction).
    * ``custom``: classical parametric sentences over the translated vocabulary.
    """

    crisp_identity: bool = False
    graph: bool = False
    graph_relations: Optional[frozenset] = None
    forbidden: Mapping[str, frozenset] = field(default_factory=dict)
    custom: tuple[Node, ...] = ()

    def graph_rels(self, vocab: Vocabulary) -> frozenset:
        if not self.graph:
            return frozenset()
        binary = {n for n, k in vocab.relations if k == 2}
        if self.graph_relations is None:
            return frozenset(binary)
        return frozenset(self.graph_relations) & binary

    def allowed(self, rel: str, A) -> list[int]:
        bad = self.forbidden.get(rel, frozenset())
        return [a for a in A.elements if A.labels[a] not in bad]

    @property
    def name(self) -> str:
        parts = []
        if self.crisp_identity:
            parts.append("crisp-id")
        if self.graph:
            parts.append("graph")
        if self.forbidden:
            parts.append("support")
        if self.custom:
            parts.append("custom")
        return "+".join(parts) or "none"

    @property
    def per_relation(self) -> bool:
        """True when every constraint mentions a single relation symbol."""
        return not self.custom


NONE = ConstraintProfile()


def parse_profile(text: Optional[str]) -> ConstraintProfile:
    """``none``, ``crisp-id``, ``graph``, ``graph:R``, joined with ``+``."""
    if not text or text == "none":
        return NONE
    crisp = graph = False
    graph_rels = None
    for part in text.split("+"):
        part = part.strip()
        if part in ("crisp-id", "crisp", "crisp_identity"):
            crisp = True
        elif part.startswith("graph"):
            graph = True
            _, _, rels = part.partition(":")
            if rels:
                graph_rels = frozenset(r.strip() for r in rels.split(",") if r.strip())
        elif part != "none":
            raise ValueError(f"unknown profile component {part!r}")
    return ConstraintProfile(crisp_identity=crisp, graph=graph, graph_relations=graph_rels)
