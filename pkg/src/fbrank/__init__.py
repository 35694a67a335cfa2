"""Exact Weyl-algebra Groebner engine for the Fisher-Bingham holonomic system."""

__version__ = "0.1.0"

from .algebra import Polynomial, RationalFunction, VarUniverse
from .groebner import Budget, BudgetExceeded, buchberger, holonomic_rank, is_groebner
from .orders import TermOrder, make_h_order, make_prop2_order, make_weight
from .systems import SystemDescriptor, make_system
from .text import parse_operator, parse_poly, parse_ratfun
from .weyl import WeylOperator

__all__ = [
    "__version__",
    "Budget",
    "BudgetExceeded",
    "Polynomial",
    "RationalFunction",
    "SystemDescriptor",
    "TermOrder",
    "VarUniverse",
    "WeylOperator",
    "buchberger",
    "holonomic_rank",
    "is_groebner",
    "make_h_order",
    "make_prop2_order",
    "make_system",
    "make_weight",
    "parse_operator",
    "parse_poly",
    "parse_ratfun",
]
