"""Chebyshev-bias experiments for integers that are sums of two squares."""

__version__ = "0.1.0"
