"""Lagrange-flux finite-volume solvers for the compressible Euler equations."""

__version__ = "0.1.0"
