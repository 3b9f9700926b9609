"""Exact computation of node polynomials via Hilbert schemes of points."""

__version__ = "0.1.0"
