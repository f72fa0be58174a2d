"""The standard [0,1]-valued Lukasiewicz logic, optionally with product.

Evaluation is in binary64. Threshold nodes ``ge(phi, r)``/``le(phi, r)`` are
crisp events (value 0 or 1), used for interval membership in extension
axioms. Term extrema come from a uniform grid whose spacing is chosen from a
structural Lipschitz bound, so the reported value carries a certified error.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, TextIO

import numpy as np

from .config import DEFAULT_BUDGETS, BudgetExceeded, Budgets
from .semantics import Evaluator, StructureError
from .syntax import (Atom, Const, Exists, Forall, Ident, Node, Op, Thresh, Var, Vocabulary, _walk, conj,
                     disj, free_variables, infer_vocabulary, neg, term_variables, to_text)

__all__ = [
    "IntervalStructure", "ValueInterval", "ExtremumResult", "ConcentrationResult", "ThresholdEvent",
    "evaluate_interval", "sample_interval_structure", "estimate_concentration",
    "term_extremum_interval", "threshold_event", "extension_axiom_interval", "interval_grid",
    "lipschitz_bound", "write_histogram_csv", "FLOAT_OPS", "THRESHOLD_TOL",
]

THRESHOLD_TOL = 1e-12

FLOAT_OPS: dict[str, tuple[int, Callable]] = {
    "and": (2, min),
    "or": (2, max),
    "not": (1, lambda a: 1.0 - a),
    "imp": (2, lambda a, b: min(1.0, 1.0 - a + b)),
    "oplus": (2, lambda a, b: min(1.0, a + b)),
    "odot": (2, lambda a, b: max(0.0, a + b - 1.0)),
    "prod": (2, lambda a, b: a * b),
}

_NP_OPS: dict[str, Callable] = {
    "and": np.minimum,
    "or": np.maximum,
    "not": lambda a: 1.0 - a,
    "imp": lambda a, b: np.minimum(1.0, 1.0 - a + b),
    "oplus": lambda a, b: np.minimum(1.0, a + b),
    "odot": lambda a, b: np.maximum(0.0, a + b - 1.0),
    "prod": lambda a, b: a * b,
}


def _const_value(label: str) -> float:
    try:
        q = Fraction(label)
    except (ValueError, ZeroDivisionError):
        raise StructureError(f"constant {label!r} is not a number in [0,1]") from None
    if not 0 <= q <= 1:
        raise StructureError(f"constant {label} lies outside [0,1]")
    return float(q)


class _FloatBackend:
    bottom, top = 0.0, 1.0
    meet, join = staticmethod(min), staticmethod(max)

    def op(self, name: str, k: int):
        if name not in FLOAT_OPS:
            raise StructureError(f"connective {name!r} is not continuous on [0,1]")
        arity, fn = FLOAT_OPS[name]
        if arity != k:
            raise StructureError(f"connective {name!r} has arity {arity}, used with {k}")
        return ("fn", fn)

    def const(self, label: str) -> float:
        return _const_value(label)

    def thresh(self, kind: str, bound: Fraction):
        r = float(bound)
        if kind == "ge":
            return lambda v: 1.0 if v >= r - THRESHOLD_TOL else 0.0
        return lambda v: 1.0 if v <= r + THRESHOLD_TOL else 0.0


@dataclass(frozen=True)
class ValueInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"bad interval [{self.lower}, {self.upper}]")

    def __contains__(self, v: float) -> bool:
        return self.lower <= v <= self.upper


def interval_grid(N: int) -> list[ValueInterval]:
    """The cover ``[j/N, (j+1)/N]`` of [0,1]."""
    return [ValueInterval(j / N, (j + 1) / N) for j in range(N)]


@dataclass(frozen=True, eq=False)
class IntervalStructure:
    n: int
    vocab: Vocabulary
    tables: Mapping[str, np.ndarray]

    def __post_init__(self):
        if self.n < 1:
            raise StructureError("domain must be non-empty (n >= 1)")
        for rel, k in self.vocab.relations:
            t = self.tables.get(rel)
            if t is None:
                raise StructureError(f"missing table for relation {rel}")
            if t.shape != (self.n,) * k:
                raise StructureError(f"{rel}: table shape {t.shape}, expected {(self.n,) * k}")
            if t.size and (t.min() < 0 or t.max() > 1):
                raise StructureError(f"{rel}: values outside [0,1]")

    @classmethod
    def from_tables(cls, n: int, vocab: Vocabulary, tables: Mapping[str, Sequence]) -> "IntervalStructure":
        return cls(n, vocab, {r: np.asarray(tables[r], dtype=float) for r, _ in vocab.relations})


def evaluate_interval(M: IntervalStructure, phi: Node, asg: Optional[Mapping[str, int]] = None) -> float:
    return _evaluator(phi)(M, asg)


def _evaluator(phi: Node) -> Evaluator:
    return Evaluator(phi, None, backend=_FloatBackend())


def _rng(seed: int, sample: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(sample, stream))))


def sample_interval_structure(n: int, vocab: Vocabulary, seed: int = 0, sample: int = 0) -> IntervalStructure:
    """Each cell independent and uniform on [0,1]."""
    if n < 1:
        raise StructureError("domain must be non-empty (n >= 1)")
    tables = {rel: _rng(seed, sample, i).random((n,) * k) for i, (rel, k) in enumerate(vocab.relations)}
    return IntervalStructure(n, vocab, tables)


@dataclass
class ConcentrationResult:
    sentence: str
    n: int
    samples: int
    seed: int
    values: np.ndarray
    edges: np.ndarray
    frequencies: np.ndarray
    interval: Optional[ValueInterval] = None

    @property
    def median(self) -> float:
        return float(np.median(self.values))

    @property
    def in_interval(self) -> Optional[float]:
        if self.interval is None:
            return None
        v = self.values
        return float(np.mean((v >= self.interval.lower) & (v <= self.interval.upper)))

    def fraction_at_least(self, r: float) -> float:
        return float(np.mean(self.values >= r - THRESHOLD_TOL))


def estimate_concentration(phi: Node, n: int, samples: int = 2000, bins: int = 20, seed: int = 0,
                           interval: Optional[ValueInterval] = None,
                           vocab: Optional[Vocabulary] = None) -> ConcentrationResult:
    """Histogram and median of ``||phi||`` over Lebesgue-random structures of size ``n``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    fv = free_variables(phi)
    if fv:
        raise StructureError(f"free variable {fv[0]} in sentence")
    vocab = vocab or infer_vocabulary(phi)
    ev = _evaluator(phi)
    vals = np.array([ev(sample_interval_structure(n, vocab, seed, s)) for s in range(samples)])
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return ConcentrationResult(to_text(phi), n, samples, seed, vals, edges, counts / samples, interval)


def write_histogram_csv(res: ConcentrationResult, out: Optional[TextIO] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_low", "bin_high", "frequency"])
    for lo, hi, f in zip(res.edges[:-1], res.edges[1:], res.frequencies):
        w.writerow([f"{lo:.6f}", f"{hi:.6f}", f"{f:.6f}"])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


# ---------------------------------------------------------------- thresholds


@dataclass(frozen=True)
class ThresholdEvent:
    """``M |= phi_{>=r}`` (``direction="ge"``) or ``phi_{<=r}`` as a yes/no test."""

    phi: Node
    r: Fraction
    direction: str = "ge"

    def __post_init__(self):
        if self.direction not in ("ge", "le"):
            raise ValueError("direction must be 'ge' or 'le'")
        if not 0 <= self.r <= 1:
            raise ValueError("threshold must lie in [0,1]")

    @property
    def formula(self) -> Node:
        return Thresh(self.direction, Fraction(self.r), self.phi)

    def __call__(self, M: IntervalStructure, asg: Optional[Mapping[str, int]] = None) -> bool:
        return evaluate_interval(M, self.formula, asg) == 1.0

    def holds_for(self, value: float) -> bool:
        r = float(self.r)
        return value >= r - THRESHOLD_TOL if self.direction == "ge" else value <= r + THRESHOLD_TOL


def threshold_event(phi: Node, r, direction: str = "ge") -> ThresholdEvent:
    return ThresholdEvent(phi, Fraction(r), direction)


def extension_axiom_interval(k: int, N: int, g: Mapping, vocab: Vocabulary) -> Node:
    """``forall x1..xk (some xi ~ xj | exists x_{k+1} (new & each atom in its cell of the N-grid))``.

    ``g`` maps each atom mentioning ``x_{k+1}`` (an ``Atom`` or its text) to
    a grid interval, given as ``j``, ``(lo, hi)`` or a ``ValueInterval``.
    """
    from .asymptotic import extension_atoms
    if N < 1:
        raise ValueError("N must be >= 1")
    atoms = extension_atoms(k, vocab)
    by_text = {to_text(a).replace(" ", ""): a for a in atoms}
    table: dict[Atom, tuple[Fraction, Fraction]] = {}
    for key, iv in g.items():
        atom = key if isinstance(key, Atom) else by_text.get(str(key).replace(" ", ""))
        if atom is None or atom not in atoms:
            raise StructureError(f"{key!r} is not an atom mentioning x{k + 1}")
        if isinstance(iv, int):
            lo, hi = Fraction(iv, N), Fraction(iv + 1, N)
        elif isinstance(iv, ValueInterval):
            lo, hi = Fraction(iv.lower).limit_denominator(N), Fraction(iv.upper).limit_denominator(N)
        else:
            lo, hi = Fraction(iv[0]), Fraction(iv[1])
        if hi - lo != Fraction(1, N) or (lo * N).denominator != 1 or not 0 <= lo < hi <= 1:
            raise StructureError(f"[{lo}, {hi}] is not a cell of the 1/{N} grid")
        table[atom] = (lo, hi)
    missing = [a for a in atoms if a not in table]
    if missing:
        raise StructureError(f"g is not total: missing {to_text(missing[0])}")
    xs = [f"x{i + 1}" for i in range(k + 1)]
    new = xs[-1]
    members = [Op("and", (Thresh("ge", lo, a), Thresh("le", hi, a))) for a, (lo, hi) in
               ((a, table[a]) for a in atoms)]
    fresh = [neg(Ident(new, x)) for x in xs[:-1]]
    body = Exists(new, conj(fresh + members))
    clashes = [Ident(x, y) for x, y in itertools.combinations(xs[:-1], 2)]
    inner = disj(clashes + [body])
    for v in reversed(xs[:-1]):
        inner = Forall(v, inner)
    return inner


# ---------------------------------------------------------------- term extrema


def lipschitz_bound(t: Node) -> int:
    """Sup-norm Lipschitz constant: every connective is 1-Lipschitz in each argument,
    so the number of variable occurrences bounds the slope."""
    n = 0
    for node in _walk(t):
        if isinstance(node, Var):
            n += 1
        elif isinstance(node, Op) and node.name not in _NP_OPS:
            raise StructureError(f"connective {node.name!r} is not continuous on [0,1]")
        elif isinstance(node, (Atom, Ident, Forall, Exists, Thresh)):
            raise StructureError("expected a term over variables and connectives")
    return max(n, 1)


def _np_term(t: Node, variables: Sequence[str]):
    pos = {v: i for i, v in enumerate(variables)}

    def go(n: Node):
        if isinstance(n, Var):
            i = pos[n.name]
            return lambda xs: xs[i]
        if isinstance(n, Const):
            c = _const_value(n.label)
            return lambda xs: c
        fs = [go(a) for a in n.args]
        op = _NP_OPS[n.name]
        if len(fs) == 1:
            f0 = fs[0]
            return lambda xs: op(f0(xs))
        f0, f1 = fs
        return lambda xs: op(f0(xs), f1(xs))

    return go(t)


@dataclass
class ExtremumResult:
    variables: tuple[str, ...]
    inf: float
    sup: float
    argmin: tuple[float, ...]
    argmax: tuple[float, ...]
    error_bound: float
    lipschitz: int
    spacing: float
    evaluations: int
    notes: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        fmt = lambda p: "(" + ", ".join(f"{x:.6f}" for x in p) + ")"
        out = [f"inf = {self.inf:.9f} at {fmt(self.argmin)}",
               f"sup = {self.sup:.9f} at {fmt(self.argmax)}",
               f"certified error <= {self.error_bound:.3g} (L = {self.lipschitz}, h = {self.spacing:.3g})"]
        return out + [f"note: {n}" for n in self.notes]


_GOLDEN_MIN = (3 - math.sqrt(5)) / 2
_GOLDEN_ARG = (math.sqrt(5) - 1) / 2


def _notes(res: ExtremumResult) -> list[str]:
    notes = []
    tol = res.error_bound + 1e-9
    if len(res.variables) == 1 and abs(res.inf - _GOLDEN_MIN) <= tol and abs(res.argmin[0] - _GOLDEN_ARG) <= 2 * res.spacing:
        notes.append("minimum value (3-sqrt(5))/2 = 0.381966... is attained at v = (sqrt(5)-1)/2 = 0.618034...; "
                     "the minimiser and the minimum are different numbers")
    for name, val in (("inf", res.inf), ("sup", res.sup)):
        q = Fraction(val).limit_denominator(12)
        if abs(float(q) - val) <= tol and q.denominator > 1:
            notes.append(f"{name} is consistent with the rational {q}")
    return notes


def term_extremum_interval(t: Node, tol: float = 1e-5, budgets: Budgets = DEFAULT_BUDGETS) -> ExtremumResult:
    """Extrema of the term function on [0,1]^k with ``|reported - true| <= L*h/2 <= tol/2``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    variables = term_variables(t) or ("v",)
    k = len(variables)
    L = lipschitz_bound(t)
    h = 1 / 16
    while L * h > tol:
        h /= 2
    m = int(round(1 / h)) + 1
    evaluations = m ** k
    if evaluations > budgets.max_grid_evaluations:
        raise BudgetExceeded(f"tolerance {tol} needs {evaluations} grid points "
                             f"(budget {budgets.max_grid_evaluations})")
    f = _np_term(t, variables)
    axis = np.linspace(0.0, 1.0, m)
    best_lo, best_hi = (math.inf, None), (-math.inf, None)
    chunk = 1 << 20
    for start in range(0, evaluations, chunk):
        idx = np.unravel_index(np.arange(start, min(start + chunk, evaluations)), (m,) * k)
        xs = [axis[i] for i in idx]
        vals = np.broadcast_to(np.asarray(f(xs), dtype=float), xs[0].shape)
        i, j = int(np.argmin(vals)), int(np.argmax(vals))
        if vals[i] < best_lo[0]:
            best_lo = (float(vals[i]), tuple(x[i] for x in xs))
        if vals[j] > best_hi[0]:
            best_hi = (float(vals[j]), tuple(x[j] for x in xs))
    res = ExtremumResult(tuple(variables), best_lo[0], best_hi[0], tuple(map(float, best_lo[1])),
                         tuple(map(float, best_hi[1])), L * h / 2, L, h, evaluations)
    res.notes = _notes(res)
    return res
