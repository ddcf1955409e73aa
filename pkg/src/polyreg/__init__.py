"""Polylogarithmic regulators, p-adic polylogarithms, and L-value quotient checks."""

__version__ = "0.1.0"
