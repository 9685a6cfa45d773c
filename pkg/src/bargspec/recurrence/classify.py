"""Newton-Puiseux / Perron-Kreuser classification of the order-k recurrence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..core import DomainError

VERDICTS = (
    "minimal_exists_distinct_rates",
    "minimal_exists_equal_roots",
    "no_minimal_dominant_pair",
)


@dataclass(frozen=True)
class ClassificationReport:
    k: int
    points: tuple
    sigma: Fraction
    tau: Fraction
    verdict: str
    limit_formula: str
    predicted_limit: Optional[float]
    characteristic_roots: Optional[tuple] = None

    @property
    def minimal_exists(self) -> bool:
        return self.verdict != "no_minimal_dominant_pair"


def classify(k: int, omega: Optional[float] = None, g: Optional[float] = None) -> ClassificationReport:
    """Growth classes of solutions of K_{n+1} + A_n K_n + B_n K_{n-1} = 0.

    With A_n ~ a n^(1-k) and B_n ~ n^(-k)/k^k the diagram points are
    (0,0), (1,1-k), (2,-k); sigma and tau are the two edge slopes.  Passing
    ``omega`` and ``g`` also evaluates the parameter-dependent limits.
    """
    if k < 1 or int(k) != k:
        raise DomainError("k must be a positive integer")
    k = int(k)
    alpha, beta = Fraction(1 - k), Fraction(-k)
    sigma, tau = alpha, beta - alpha
    points = ((0, 0), (1, 1 - k), (2, -k))
    have_params = omega is not None and g is not None and g != 0
    roots = None
    if sigma > tau:
        verdict = VERDICTS[0]
        formula = "K_{n+1}/K_n -> -omega/g (dominant), -(g/omega) n^-1 (minimal)"
        limit = None
        if have_params:
            roots = (-omega / g, -g / omega)
    elif sigma == tau:
        verdict = VERDICTS[1]
        formula = "limsup (|K_n| n!)^(1/n) = |t|, t a root of t^2 + a t + b = 0"
        limit = None
        if have_params:
            a, b = omega / (g * k ** (k - 1)), 1.0 / k ** k
            t = np.roots([1.0, a, b])
            roots = tuple(sorted((complex(x) for x in t), key=abs))
            roots = tuple(x.real if abs(x.imag) < 1e-15 else x for x in roots)
            limit = float(abs(roots[0]))
    else:
        verdict = VERDICTS[2]
        formula = f"limsup (|K_n| (n!)^({k}/2))^(1/n) = 1/sqrt({k}^{k})"
        limit = 1.0 / math.sqrt(k ** k)
    return ClassificationReport(k, points, sigma, tau, verdict, formula, limit, roots)
