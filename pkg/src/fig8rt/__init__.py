"""Quantum invariants of rational surgeries on the figure-8 knot."""

__version__ = "0.1.0"
