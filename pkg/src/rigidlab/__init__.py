"""Commutative toral automorphism actions built from number-field units."""

__version__ = "0.1.0"
