"""Exact-arithmetic toolkit for Fano lattice polygons and their mutations."""

__version__ = "0.1.0"
