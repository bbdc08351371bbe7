"""Certification toolkit for linear inequalities over disjunctive conic sets."""

__version__ = "0.1.0"
