"""Exact symbolic verification of locally nilpotent derivations, Ga-actions
and affine modifications on hypersurfaces."""

from .polyring import Poly, VarTable, parse_poly, format_poly

__all__ = ["Poly", "VarTable", "parse_poly", "format_poly"]
__version__ = "0.1.0"
