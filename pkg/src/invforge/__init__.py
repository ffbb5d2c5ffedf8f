"""Vector invariant fields of classical groups over finite fields."""

from .gf import FieldSpec, make_field
from .mpoly import SparsePoly, VarGrid, determinant, exact_div, parse_poly
from .ratexpr import RatExpr, rat_equal
from .report import VerdictReport

__version__ = "0.1.0"

__all__ = [
    "FieldSpec",
    "RatExpr",
    "SparsePoly",
    "VarGrid",
    "VerdictReport",
    "determinant",
    "exact_div",
    "make_field",
    "parse_poly",
    "rat_equal",
]
