"""Three-term recurrences, continued fractions and power-series diagnostics."""

from .classify import ClassificationReport, classify
from .coefficients import CoeffGenerator, Profile, coeffs_for, coeffs_k_harmonic, coeffs_two_mode
from .contfrac import CFValue, F_of_E, continued_fraction_R, eigenvalue_count, minimal_ratios
from .scan import Bracket, SpectrumScan, scan_spectrum
from .series import (
    LimsupResult,
    NormDiagnostic,
    SeriesSolution,
    forward_recursion,
    limsup_estimate,
    minimal_solution,
    normalizability_diagnostic,
    physical_solution,
)

__all__ = [
    "Bracket", "CFValue", "ClassificationReport", "CoeffGenerator", "LimsupResult",
    "NormDiagnostic", "Profile", "SeriesSolution", "SpectrumScan", "F_of_E", "classify",
    "coeffs_for", "coeffs_k_harmonic", "coeffs_two_mode", "continued_fraction_R", "eigenvalue_count",
    "forward_recursion", "limsup_estimate", "minimal_ratios", "minimal_solution",
    "normalizability_diagnostic", "physical_solution", "scan_spectrum",
]
