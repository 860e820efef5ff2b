"""Passive-adversary cryptanalysis of matrix-based key establishment protocols."""

__version__ = "0.1.0"
