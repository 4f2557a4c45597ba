"""Fourier coefficients of meromorphic Hilbert modular forms for real quadratic fields."""

__version__ = "0.1.0"
