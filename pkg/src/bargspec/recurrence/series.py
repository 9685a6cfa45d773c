"""Power-series solutions of the recurrence, kept as log-magnitude and sign.

Naive K_n under- or overflow within a few hundred terms, so every sequence
here is a pair (log|K_n|, sign K_n) with sign 0 marking an exact zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from ..exact import log_weights
from .coefficients import CoeffGenerator
from .contfrac import F_of_E, minimal_ratios


@dataclass
class SeriesSolution:
    E: float
    log_mags: np.ndarray
    signs: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.log_mags) - 1

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.signs * np.exp(self.log_mags)


def _log_sign(x: float):
    return (math.log(abs(x)), math.copysign(1.0, x)) if x != 0 else (-math.inf, 0.0)


def forward_recursion(gen: CoeffGenerator, n_max: int, seed=None) -> SeriesSolution:
    """K_{n+1} = -A_n K_n - B_n K_{n-1} from (K_0, K_1) = seed, default (1, -A_0).

    The running pair is rescaled whenever it leaves [1e-100, 1e100]; the
    accumulated scale goes into the log magnitudes.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if seed is None:
        seed = (1.0, -gen.A(0))
    x0, x1 = float(seed[0]), float(seed[1])
    idx = np.arange(1, n_max)
    A = gen.A(idx).tolist()
    B = gen.B(idx).tolist()
    logs = np.empty(n_max + 1)
    signs = np.empty(n_max + 1)
    logs[0], signs[0] = _log_sign(x0)
    logs[1], signs[1] = _log_sign(x1)
    shift = 0.0
    for i in range(n_max - 1):
        x0, x1 = x1, -A[i] * x1 - B[i] * x0
        big = max(abs(x0), abs(x1))
        if big > 1e100 or 0 < big < 1e-100:
            x0 /= big
            x1 /= big
            shift += math.log(big)
        l, s = _log_sign(x1)
        logs[i + 2] = l + shift
        signs[i + 2] = s
    return SeriesSolution(gen.E, logs, signs)


def minimal_solution(gen: CoeffGenerator, n_max: int, tol: float = 1e-13) -> SeriesSolution:
    """Minimal solution normalized to K_0 = 1, built from continued-fraction ratios.

    Forward recursion cannot produce it: rounding seeds a dominant component
    that swamps it within a few terms.
    """
    R = minimal_ratios(gen, n_max, tol)
    with np.errstate(divide="ignore"):
        logs = np.concatenate([[0.0], np.cumsum(np.log(np.abs(R)))])
    signs = np.concatenate([[1.0], np.cumprod(np.sign(R))])
    return SeriesSolution(gen.E, logs, signs)


def _log_add(l1, s1, l2, s2):
    """log|s1 e^l1 + s2 e^l2| and its sign, elementwise."""
    l1, s1, l2, s2 = map(np.asarray, (l1, s1, l2, s2))
    hi = np.maximum(l1, l2)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        a = s1 * np.exp(np.where(np.isfinite(l1), l1 - hi, -np.inf))
        b = s2 * np.exp(np.where(np.isfinite(l2), l2 - hi, -np.inf))
        tot = a + b
        logs = np.where(np.isfinite(hi), hi + np.log(np.abs(tot)), -np.inf)
    return logs, np.sign(tot)


def physical_solution(gen: CoeffGenerator, n_max: int, f_tol: float = 1e-8):
    """The sequence fixed by K_0 = 1, K_1 = -A_0, computed stably.

    Where a minimal solution exists it is written as m_n - F(E) D_n, with m
    the minimal solution (m_0 = 1, m_1 = R_0) and D the solution with
    D_0 = 0, D_1 = 1; |F| at or below ``f_tol`` is taken as zero, since at a
    true eigenvalue F vanishes and the residual is rounding.  Without a
    minimal solution plain forward recursion is already stable.

    Returns (SeriesSolution, F) with F = None in the latter case.
    """
    if not gen.has_minimal_solution:
        return forward_recursion(gen, n_max), None
    F = F_of_E(gen)
    if math.isnan(F):
        # continued-fraction pole: the minimal solution has K_0 = 0, so (1, -A_0) is purely dominant
        return forward_recursion(gen, n_max), F
    m = minimal_solution(gen, n_max)
    if abs(F) <= f_tol:
        return m, F
    D = forward_recursion(gen, n_max, seed=(0.0, 1.0))
    lF, sF = _log_sign(F)
    logs, signs = _log_add(m.log_mags, m.signs, D.log_mags + lF, -sF * D.signs)
    logs[0], signs[0] = 0.0, 1.0
    return SeriesSolution(gen.E, logs, signs), F


@dataclass
class LimsupResult:
    n: np.ndarray
    L: np.ndarray
    limit: float
    weight: float

    def final_quartile(self):
        start = 3 * len(self.n) // 4
        return self.n[start:], self.L[start:]

    @property
    def decreasing(self) -> bool:
        """Block maxima of L_n over the final quartile never increase."""
        env = _block_max(self.final_quartile()[1])
        return bool(len(env) > 1 and np.all(np.diff(env) <= 0))


def _block_max(x: np.ndarray, block: int = 4) -> np.ndarray:
    m = len(x) // block
    if m == 0:
        return x.copy()
    return x[: m * block].reshape(m, block).max(axis=1)


def limsup_estimate(
    gen: CoeffGenerator,
    n_max: int,
    series: Optional[SeriesSolution] = None,
    weight: Optional[float] = None,
) -> LimsupResult:
    """L_n = (|K_n| (n!)^w)^(1/n) along a solution, with an extrapolated limit.

    ``w`` defaults to k/2 (1 for two-mode).  The solution defaults to forward
    recursion from (1, -A_0).  The limit is the geometric mean of block
    maxima (blocks of 4) over the final quartile, which tracks the lim sup
    through sign oscillations.
    """
    if series is None:
        series = forward_recursion(gen, n_max)
    w = gen.weight_exponent if weight is None else weight
    n = np.arange(1, series.n_max + 1)
    logs = series.log_mags[1:]
    keep = np.isfinite(logs)
    n, logs = n[keep], logs[keep]
    logL = (logs + w * gammaln(n + 1)) / n
    L = np.exp(logL)
    env = _block_max(logL[3 * len(n) // 4:])
    return LimsupResult(n, L, float(np.exp(env.mean())), w)


@dataclass
class NormDiagnostic:
    log_partial_sums: np.ndarray
    log_terms: np.ndarray
    verdict: str
    F: Optional[float]
    series: SeriesSolution

    @property
    def partial_sums(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_partial_sums)


def normalizability_diagnostic(
    gen: CoeffGenerator,
    n_max: int = 400,
    series: Optional[SeriesSolution] = None,
    delta: float = 0.05,
    f_tol: float = 1e-8,
) -> NormDiagnostic:
    """Sector norm sum_n |K_n|^2 mu_n of the physical sequence, with a verdict.

    Over the final quartile: ``converging`` if every term ratio is below
    1 - delta, ``diverging`` if the terms never decrease, else
    ``inconclusive``.
    """
    F = None
    if series is None:
        series, F = physical_solution(gen, n_max, f_tol)
    terms = 2 * series.log_mags + log_weights(gen.sector, series.n_max)
    partial = np.logaddexp.accumulate(terms)
    tail = terms[3 * len(terms) // 4:]
    tail = tail[np.isfinite(tail)]
    steps = np.diff(tail)
    if len(steps) == 0:
        verdict = "inconclusive"
    elif np.all(steps < math.log1p(-delta)):
        verdict = "converging"
    elif np.all(steps >= 0):
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    return NormDiagnostic(partial, terms, verdict, F, series)
