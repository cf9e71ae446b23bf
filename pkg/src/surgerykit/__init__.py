"""Exact algebra of quadratic forms, split formations and linking forms."""

from .exact_linear import GF, ZZ, Matrix, Ring

__all__ = ["GF", "ZZ", "Matrix", "Ring"]
__version__ = "0.1.0"
