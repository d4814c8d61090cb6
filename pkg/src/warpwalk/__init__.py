"""Quantum walk on a warped orbifold lattice."""
__version__ = "0.1.0"
