"""Arboreal Galois toolkit for cubic polynomials whose critical points collide."""

__version__ = "0.1.0"
