"""Almost-sure truth values of many-valued first-order sentences."""
from .algebra import (LatticeAlgebra, demorgan_check, demorgan_constants, get_algebra, make_boolean,
                      make_godel_chain, make_mv_chain, product, reduct, term_range_finite,
                      validate_algebra)
from .asymptotic import almost_sure_set_demorgan, almost_sure_value, decide, qe_demorgan
from .config import Budgets, BudgetExceeded
from .continuum import estimate_concentration, evaluate_interval, term_extremum_interval
from .montecarlo import AtomDistribution, estimate_distribution, exact_mu_small
from .profiles import ConstraintProfile, parse_profile
from .semantics import WeightedStructure, evaluate, make_structure
from .syntax import Vocabulary, parse_formula, parse_modal, parse_term, to_text
from .translator import transform_model, translate

__version__ = "0.1.0"

__all__ = [
    "LatticeAlgebra", "demorgan_check", "demorgan_constants", "get_algebra", "make_boolean", "make_godel_chain",
    "make_mv_chain", "product", "reduct", "term_range_finite", "validate_algebra",
    "almost_sure_set_demorgan", "almost_sure_value", "decide", "qe_demorgan",
    "Budgets", "BudgetExceeded",
    "estimate_concentration", "evaluate_interval", "term_extremum_interval",
    "AtomDistribution", "estimate_distribution", "exact_mu_small",
    "ConstraintProfile", "parse_profile",
    "WeightedStructure", "evaluate", "make_structure",
    "Vocabulary", "parse_formula", "parse_modal", "parse_term", "to_text",
    "transform_model", "translate",
]
