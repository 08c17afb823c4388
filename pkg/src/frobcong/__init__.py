"""Verification engine for Ramanujan-type congruences of colored Frobenius partition functions."""

__version__ = "0.1.0"
