"""Three-term recurrence coefficients K_{n+1} + A_n K_n + B_n K_{n-1} = 0.

The recurrences come from inserting psi(z) = sum K_n z^n into the sector
ODEs; K_1 + A_0 K_0 = 0 closes them at n = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..core import DomainError, ModelKind, ModelSpec, SectorLabel, _check_sector


@dataclass(frozen=True)
class Profile:
    """A_n ~ a n^alpha and B_n ~ b n^beta as n -> infinity."""

    a: float
    alpha: float
    b: float
    beta: float


@dataclass(frozen=True)
class CoeffGenerator:
    model: ModelSpec
    sector: SectorLabel
    E: float
    profile: Profile
    # A_n = (num_slope * n + num_const) / (g_scale * P(n+1)), B_n = 1 / (b_scale * P(n+1)),
    # P(m) = prod_j (m + shifts_j)
    num_slope: float
    num_const: float
    g_scale: float
    b_scale: float
    shifts: tuple

    def _P(self, n):
        n = np.asarray(n, dtype=float)
        out = np.ones_like(n)
        for s in self.shifts:
            out = out * (n + 1 + s)
        return out

    def A(self, n):
        n = np.asarray(n, dtype=float)
        out = (self.num_slope * n + self.num_const) / (self.g_scale * self._P(n))
        return out if out.ndim else float(out)

    def B(self, n):
        out = 1.0 / (self.b_scale * self._P(n))
        return out if np.ndim(out) else float(out)

    @property
    def k(self) -> Optional[int]:
        return self.model.k

    @property
    def weight_exponent(self) -> float:
        """Power of n! that makes (|K_n| (n!)^w)^(1/n) tend to a finite limit."""
        return 1.0 if self.model.is_two_mode else self.model.k / 2

    @property
    def has_minimal_solution(self) -> bool:
        """Whether the n >= 1 recurrence has a minimal solution at these parameters.

        Order 1 always does; order 2 and two-mode only while the characteristic
        roots have distinct moduli (the unitary regime); order >= 3 never.
        """
        w, g = self.model.omega, self.model.g
        if self.model.is_two_mode:
            return abs(g / w) < 1
        if self.model.k == 1:
            return True
        if self.model.k == 2:
            return abs(2 * g / w) < 1
        return False

    def with_energy(self, E: float) -> "CoeffGenerator":
        return coeffs_for(self.model, self.sector, E)


def coeffs_k_harmonic(k: int, q, omega: float, g: float, E: float) -> CoeffGenerator:
    model = ModelSpec.k_harmonic(k, omega, g)
    sector = q if isinstance(q, SectorLabel) else SectorLabel.q(q, k)
    return _k_harmonic(model, sector, E)


def _k_harmonic(model: ModelSpec, sector: SectorLabel, E: float) -> CoeffGenerator:
    k, w, g = model.k, model.omega, model.g
    if g == 0:
        raise DomainError("recurrence degenerates at g = 0; use the closed form")
    q = sector.value
    shifts = tuple(float(q - Fraction((j - 1) * k + 1, k * k)) for j in range(1, k + 1))
    profile = Profile(w / (g * k ** (k - 1)), -k + 1, 1.0 / k ** k, -k)
    return CoeffGenerator(
        model, sector, float(E), profile,
        num_slope=w,
        num_const=w * float(q - Fraction(1, k * k)) - E / k,
        g_scale=g * k ** (k - 1),
        b_scale=float(k ** k),
        shifts=shifts,
    )


def coeffs_two_mode(kappa, omega: float, g: float, E: float) -> CoeffGenerator:
    model = ModelSpec.two_mode(omega, g)
    sector = kappa if isinstance(kappa, SectorLabel) else SectorLabel.kappa(kappa)
    return _two_mode(model, sector, E)


def _two_mode(model: ModelSpec, sector: SectorLabel, E: float) -> CoeffGenerator:
    w, g = model.omega, model.g
    if g == 0:
        raise DomainError("recurrence degenerates at g = 0; use the closed form")
    x = sector.value
    # g (n+1)(n+2 kappa) K_{n+1} + [2w(n+kappa) - w - E] K_n + g K_{n-1} = 0
    return CoeffGenerator(
        model, sector, float(E), Profile(2 * w / g, -1, 1.0, -2),
        num_slope=2 * w,
        num_const=2 * w * float(x) - w - E,
        g_scale=g,
        b_scale=1.0,
        shifts=(0.0, float(2 * x - 1)),
    )


def coeffs_for(model: ModelSpec, sector: SectorLabel, E: float) -> CoeffGenerator:
    _check_sector(model, sector)
    if model.kind is ModelKind.TWO_MODE:
        return _two_mode(model, sector, E)
    return _k_harmonic(model, sector, E)
