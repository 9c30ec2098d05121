"""Geometry of homogeneous polynomial hypersurfaces, their tube domains and special cones.

Exact checks run over rationals with adjoined square roots; numerical checks
use finite differences in extended precision.
"""
from .linalg import PseudoMetric, signature
from .poly import BlockStructure, HomoPoly, SymForm, eval_sym, hessian, log_hessian, parse_poly, polarize

__all__ = ["BlockStructure", "HomoPoly", "PseudoMetric", "SymForm", "eval_sym", "hessian",
           "log_hessian", "parse_poly", "polarize", "signature"]
__version__ = "0.1.0"
