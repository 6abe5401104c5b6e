"""Exact and certified-numeric verification of the arithmetic-volume formulas
for twisted Hilbert modular surfaces and their Shimura-curve companions."""

__version__ = "0.1.0"

DEFAULT_PREC = 128
