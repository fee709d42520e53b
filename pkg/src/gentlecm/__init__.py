"""Differential modules over gentle algebras, their string and band objects,
surface models and the associated matrix problem."""

__version__ = "0.1.0"
