"""Exact movability decisions and category bounds for free abelian covers."""

__version__ = "0.1.0"
