"""Random A-valued structures, empirical value distributions and exact small-n laws.

Every atomic cell is drawn independently from its relation's distribution,
except where a profile ties cells together (graph symmetry, forced
diagonals, crisp identity). Each (sample, relation) pair owns its own Philox
stream, so results do not depend on evaluation order.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, TextIO, Union

import numpy as np
from scipy.stats import binomtest

from .algebra import LatticeAlgebra
from .asymptotic import almost_sure_value
from .config import DEFAULT_BUDGETS, BudgetExceeded, Budgets
from .profiles import NONE, ConstraintProfile
from .semantics import Evaluator, StructureError, WeightedStructure
from .syntax import Node, Vocabulary, free_variables, infer_vocabulary, to_text

__all__ = [
    "AtomDistribution", "EmpiricalDistribution", "ConvergenceReport", "sample_structure",
    "estimate_distribution", "exact_mu_small", "convergence_report", "write_csv", "wilson_interval",
]

Number = Union[Fraction, float, int, str]


def _frac(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x)) if isinstance(x, str) else Fraction(x)


@dataclass(frozen=True)
class AtomDistribution:
    """Per-relation laws ``p_R`` over the carrier; unlisted relations are uniform."""

    algebra: LatticeAlgebra
    laws: Mapping[str, tuple[Fraction, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for rel, law in self.laws.items():
            if len(law) != self.algebra.size:
                raise StructureError(f"p_{rel} has {len(law)} entries for |A| = {self.algebra.size}")
            if any(q < 0 for q in law):
                raise StructureError(f"p_{rel} has a negative entry")
            if sum(law) != 1:
                raise StructureError(f"p_{rel} sums to {sum(law)}, not 1")

    @classmethod
    def uniform(cls, algebra: LatticeAlgebra) -> "AtomDistribution":
        return cls(algebra, {})

    @classmethod
    def from_labels(cls, algebra: LatticeAlgebra, laws: Mapping[str, Mapping[str, Number]]) -> "AtomDistribution":
        """``{"P": {"0": "1/4", "1": "3/4"}}``; omitted labels get probability 0."""
        out = {}
        for rel, law in laws.items():
            vec = [Fraction(0)] * algebra.size
            for lab, q in law.items():
                vec[algebra.index(lab)] = _frac(q)
            out[rel] = tuple(vec)
        return cls(algebra, out)

    def exact(self, rel: str) -> tuple[Fraction, ...]:
        law = self.laws.get(rel)
        if law is None:
            return tuple(Fraction(1, self.algebra.size) for _ in self.algebra.elements)
        return tuple(law)

    def probs(self, rel: str) -> np.ndarray:
        return np.array([float(q) for q in self.exact(rel)])

    def support(self, rel: str) -> tuple[int, ...]:
        return tuple(a for a, q in enumerate(self.exact(rel)) if q > 0)

    def support_profile(self, base: ConstraintProfile = NONE) -> ConstraintProfile:
        """``base`` plus the support restrictions implied by zero probabilities."""
        forbidden = dict(base.forbidden)
        for rel in self.laws:
            bad = {self.algebra.labels[a] for a, q in enumerate(self.exact(rel)) if q == 0}
            if bad:
                forbidden[rel] = frozenset(bad) | forbidden.get(rel, frozenset())
        return ConstraintProfile(base.crisp_identity, base.graph, base.graph_relations, forbidden, base.custom)


def _rng(seed: int, sample: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(sample, stream))))


def _check_profile(A: LatticeAlgebra, vocab: Vocabulary, p: AtomDistribution, profile: ConstraintProfile):
    if profile.custom:
        raise StructureError("the sampler does not support custom parametric profiles")
    for rel in profile.graph_rels(vocab):
        if p.exact(rel)[A.bottom] == 0:
            raise StructureError(f"graph profile forces {rel}(x,x) = {A.labels[A.bottom]}, which p_{rel} excludes")
    for rel, bad in profile.forbidden.items():
        for lab in bad:
            if rel in vocab and p.exact(rel)[A.index(lab)] > 0:
                raise StructureError(f"p_{rel} gives positive weight to forbidden value {lab}")


def sample_structure(n: int, algebra: LatticeAlgebra, vocab: Vocabulary, p: Optional[AtomDistribution] = None,
                     profile: ConstraintProfile = NONE, seed: int = 0, sample: int = 0) -> WeightedStructure:
    """One random structure on ``n`` elements; ``(seed, sample)`` determine it completely."""
    if n < 1:
        raise StructureError("domain must be non-empty (n >= 1)")
    A = algebra
    p = p or AtomDistribution.uniform(A)
    _check_profile(A, vocab, p, profile)
    graph = profile.graph_rels(vocab)
    tables = {}
    for idx, (rel, k) in enumerate(vocab.relations):
        rng = _rng(seed, sample, idx)
        probs = p.probs(rel)
        if rel in graph:
            iu = np.triu_indices(n, 1)
            t = np.full((n, n), A.bottom, dtype=np.int16)
            vals = rng.choice(A.size, size=len(iu[0]), p=probs).astype(np.int16)
            t[iu] = vals
            t[(iu[1], iu[0])] = vals
        else:
            t = rng.choice(A.size, size=(n,) * k, p=probs).astype(np.int16)
        t.setflags(write=False)
        tables[rel] = t
    if vocab.has_crisp_identity or profile.crisp_identity:
        ident = np.full((n, n), A.bottom, dtype=np.int16)
        np.fill_diagonal(ident, A.top)
        ident.setflags(write=False)
        tables["~"] = ident
        vocab = Vocabulary(vocab.relations, True)
    return WeightedStructure(n, A, vocab, tables, profile)


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class EmpiricalDistribution:
    sentence: str
    algebra: LatticeAlgebra
    n: int
    samples: int
    counts: tuple[int, ...]
    seed: int

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(c / self.samples for c in self.counts)

    def frequency(self, label: str) -> float:
        return self.counts[self.algebra.index(label)] / self.samples

    def interval(self, a: int) -> tuple[float, float]:
        return wilson_interval(self.counts[a], self.samples)

    @property
    def modal(self) -> int:
        return int(np.argmax(self.counts))

    def rows(self) -> list[tuple]:
        return [(self.n, self.algebra.labels[a], self.counts[a] / self.samples, *self.interval(a))
                for a in self.algebra.elements]


def _setup(phi: Node, A: LatticeAlgebra, vocab: Optional[Vocabulary], p, profile):
    fv = free_variables(phi)
    if fv:
        raise StructureError(f"free variable {fv[0]} in sentence")
    vocab = vocab or infer_vocabulary(phi)
    p = p or AtomDistribution.uniform(A)
    profile = p.support_profile(profile)
    return vocab, p, profile


def estimate_distribution(phi: Node, n: int, algebra: LatticeAlgebra, p: Optional[AtomDistribution] = None,
                          samples: int = 2000, profile: ConstraintProfile = NONE, seed: int = 0,
                          vocab: Optional[Vocabulary] = None) -> EmpiricalDistribution:
    """Empirical law of ``||phi||`` over ``samples`` random structures of size ``n``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    vocab, p, profile = _setup(phi, algebra, vocab, p, profile)
    ev = Evaluator(phi, algebra)
    counts = [0] * algebra.size
    for s in range(samples):
        M = sample_structure(n, algebra, vocab, p, profile, seed, s)
        counts[ev(M)] += 1
    return EmpiricalDistribution(to_text(phi), algebra, n, samples, tuple(counts), seed)


def exact_mu_small(phi: Node, n: int, algebra: LatticeAlgebra, p: Optional[AtomDistribution] = None,
                   profile: ConstraintProfile = NONE, vocab: Optional[Vocabulary] = None,
                   budgets: Budgets = DEFAULT_BUDGETS) -> dict[int, Fraction]:
    """Exact ``mu_n(phi = a)`` for every ``a`` by enumerating all structures of size ``n``."""
    A = algebra
    vocab, p, profile = _setup(phi, A, vocab, p, profile)
    if profile.custom:
        raise StructureError("exact enumeration does not support custom parametric profiles")
    graph = profile.graph_rels(vocab)
    # free cells: (relation, cells sharing the value)
    slots = []
    for rel, k in vocab.relations:
        if rel in graph:
            for i, j in itertools.combinations(range(n), 2):
                slots.append((rel, ((i, j), (j, i))))
        else:
            for cell in itertools.product(range(n), repeat=k):
                slots.append((rel, (cell,)))
    total = 1
    for rel, _ in slots:
        total *= len(p.support(rel))
        if total > budgets.max_exact_models:
            raise BudgetExceeded(f"more than {budgets.max_exact_models} structures to enumerate")
    ev = Evaluator(phi, A)
    base = {rel: np.full((n,) * k, A.bottom, dtype=np.int16) for rel, k in vocab.relations}
    crisp = vocab.has_crisp_identity or profile.crisp_identity
    if crisp:
        ident = np.full((n, n), A.bottom, dtype=np.int16)
        np.fill_diagonal(ident, A.top)
        base["~"] = ident
        vocab = Vocabulary(vocab.relations, True)
    laws = {rel: p.exact(rel) for rel, _ in vocab.relations}
    out = {a: Fraction(0) for a in A.elements}
    for choice in itertools.product(*(p.support(rel) for rel, _ in slots)):
        weight = Fraction(1)
        for (rel, cells), v in zip(slots, choice):
            weight *= laws[rel][v]
            for cell in cells:
                base[rel][cell] = v
        M = WeightedStructure(n, A, vocab, base, profile)
        out[ev(M)] += weight
    return out


@dataclass
class ConvergenceReport:
    sentence: str
    algebra: LatticeAlgebra
    decided: int
    rows: list[EmpiricalDistribution]
    threshold: float

    @property
    def final(self) -> EmpiricalDistribution:
        return max(self.rows, key=lambda r: r.n)

    @property
    def verdict(self) -> bool:
        f = self.final
        return f.modal == self.decided and f.counts[self.decided] / f.samples >= self.threshold

    def lines(self) -> list[str]:
        A = self.algebra
        out = [f"sentence: {self.sentence}", f"almost-sure value: {A.labels[self.decided]}"]
        for r in sorted(self.rows, key=lambda r: r.n):
            lo, hi = r.interval(self.decided)
            out.append(f"n={r.n:<5d} freq({A.labels[self.decided]})={r.counts[self.decided] / r.samples:.4f} "
                       f"[{lo:.4f}, {hi:.4f}]  modal={A.labels[r.modal]}")
        out.append(f"verdict: {'converging' if self.verdict else 'not yet concentrated'} "
                   f"(threshold {self.threshold})")
        return out


def convergence_report(phi: Node, n_list: Sequence[int], algebra: LatticeAlgebra,
                       p: Optional[AtomDistribution] = None, samples: int = 2000,
                       profile: ConstraintProfile = NONE, seed: int = 0, threshold: float = 0.95,
                       vocab: Optional[Vocabulary] = None) -> ConvergenceReport:
    vocab_, p_, prof_ = _setup(phi, algebra, vocab, p, profile)
    decided = almost_sure_value(phi, algebra, prof_, vocab_)
    rows = [estimate_distribution(phi, n, algebra, p, samples, profile, seed, vocab) for n in n_list]
    return ConvergenceReport(to_text(phi), algebra, decided, rows, threshold)


def write_csv(rows: Sequence[EmpiricalDistribution], out: Optional[TextIO] = None) -> str:
    """Columns ``n, value_label, frequency, ci_low, ci_high``; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "value_label", "frequency", "ci_low", "ci_high"])
    for r in rows:
        for n, lab, f, lo, hi in r.rows():
            w.writerow([n, lab, f"{f:.6f}", f"{lo:.6f}", f"{hi:.6f}"])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
