"""Exact tools for polynomial maps with nilpotent Jacobians."""

from .polycore import Poly, T, parse_poly, to_str

__all__ = ["Poly", "T", "parse_poly", "to_str"]
__version__ = "0.1.0"
