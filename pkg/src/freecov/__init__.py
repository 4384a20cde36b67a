"""Compound free Poisson limits of sample covariance matrices, checked numerically."""

__version__ = "0.1.0"
