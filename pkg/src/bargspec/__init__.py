"""Spectra of squeezed-type and k-th order harmonic oscillators in Bargmann space."""

__version__ = "0.1.0"
