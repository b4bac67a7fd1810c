"""Exact tools for small values of shifted indefinite quinary quadratic forms."""

__version__ = "0.1.0"
