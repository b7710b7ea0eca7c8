"""Exact algebra for hypersurface Lie algebroids: jets, cdgas, Maurer-Cartan data, Poisson checks."""

__version__ = "0.1.0"
