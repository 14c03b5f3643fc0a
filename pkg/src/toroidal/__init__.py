"""Trace functions over prime fields, their monodromy classification, and
moments of central L-values restricted by Gauss-sum angle."""

__version__ = "0.1.0"
