"""Numerical verification of equidistribution mod 1 on lattice points."""

__version__ = "0.1.0"
