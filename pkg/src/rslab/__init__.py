"""Numerical laboratory for Rankin-Selberg L-functions of curated automorphic representations."""

__version__ = "0.1.0"
