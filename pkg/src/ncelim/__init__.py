"""Elimination of separated matrix variables from free matrix polynomial inequalities."""

__version__ = "0.1.0"
