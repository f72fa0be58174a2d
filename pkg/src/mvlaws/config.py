"""Brute-force budgets shared by all modules.

Defaults can be overridden per process through ``MVLAWS_<FIELD>`` environment
variables, e.g. ``MVLAWS_MAX_QUANTIFIER_DEPTH=5``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed a configured budget."""


@dataclass(frozen=True)
class Budgets:
    max_term_points: int = 10**7          # |A|^k for term_range_finite
    max_quantifier_depth: int = 4         # asymptotic decider
    max_algebra_size: int = 12
    max_arity: int = 3
    max_expansions: int = 10**6           # |A|^{|F_{k+1}|} per quantifier step
    memo_cap: int = 2_000_000             # entries in the decider memo
    max_exact_models: int = 10**6         # exact_mu_small enumeration
    max_grid_evaluations: int = 2**24     # continuum term extrema

    @classmethod
    def from_env(cls, environ=None) -> "Budgets":
        environ = os.environ if environ is None else environ
        updates = {}
        for f in fields(cls):
            raw = environ.get(f"MVLAWS_{f.name.upper()}")
            if raw is not None:
                updates[f.name] = int(raw)
        return replace(cls(), **updates)


DEFAULT_BUDGETS = Budgets.from_env()


class InvariantViolation(RuntimeError):
    """A computed result contradicts a property that must always hold."""
