"""Model and sector types plus the closed-form energies of the solvable oscillators."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


class DomainError(ValueError):
    """Parameters outside the region where a formula or method applies."""


class ConvergenceError(RuntimeError):
    """A numerical iteration failed to reach its tolerance."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ModelKind(str, enum.Enum):
    DISPLACED = "displaced"
    SQUEEZED = "squeezed"
    TWO_MODE = "two_mode"
    K_HARMONIC = "k_harmonic"


@dataclass(frozen=True)
class ModelSpec:
    """Oscillator model: kind, harmonic order k, frequency omega and coupling g."""

    kind: ModelKind
    omega: float = 1.0
    g: float = 0.0
    k: Optional[int] = None

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if not math.isfinite(self.g):
            raise DomainError(f"g must be finite, got {self.g}")
        fixed = {ModelKind.DISPLACED: 1, ModelKind.SQUEEZED: 2}
        if kind in fixed:
            if self.k not in (None, fixed[kind]):
                raise DomainError(f"{kind.value} model has k={fixed[kind]}, got k={self.k}")
            object.__setattr__(self, "k", fixed[kind])
        elif kind is ModelKind.K_HARMONIC:
            if self.k is None or int(self.k) != self.k or self.k < 1:
                raise DomainError(f"k_harmonic model needs integer k >= 1, got {self.k}")
            object.__setattr__(self, "k", int(self.k))
        elif self.k is not None:
            raise DomainError("two_mode model takes no k")

    @classmethod
    def displaced(cls, omega=1.0, g=0.0):
        return cls(ModelKind.DISPLACED, omega, g)

    @classmethod
    def squeezed(cls, omega=1.0, g=0.0):
        return cls(ModelKind.SQUEEZED, omega, g)

    @classmethod
    def two_mode(cls, omega=1.0, g=0.0):
        return cls(ModelKind.TWO_MODE, omega, g)

    @classmethod
    def k_harmonic(cls, k, omega=1.0, g=0.0):
        return cls(ModelKind.K_HARMONIC, omega, g, k)

    @property
    def is_two_mode(self) -> bool:
        return self.kind is ModelKind.TWO_MODE


@dataclass(frozen=True, order=True)
class SectorLabel:
    """Bargmann index of an irreducible sector.

    ``variant`` is ``"kappa"`` (two-mode, positive half-integers) or ``"q"``
    (order-k harmonic generation, ``q = (jk+1)/k^2``).  Values are kept as
    exact fractions; ``k`` is carried by q-labels because the admissible set
    depends on it.
    """

    variant: str
    value: Fraction
    k: Optional[int] = None

    def __post_init__(self):
        value = Fraction(self.value)
        object.__setattr__(self, "value", value)
        if self.variant == "kappa":
            if value <= 0 or (2 * value).denominator != 1:
                raise DomainError(f"kappa must be a positive half-integer, got {value}")
            if self.k is not None:
                raise DomainError("kappa labels carry no k")
        elif self.variant == "q":
            k = self.k
            if k is None or k < 1:
                raise DomainError("q labels need the order k")
            j = k * k * value - 1
            if j.denominator != 1 or j % k != 0 or not 0 <= j // k < k:
                raise DomainError(f"q={value} is not an admissible index for k={k}")
        else:
            raise DomainError(f"unknown sector variant {self.variant!r}")

    @classmethod
    def kappa(cls, value):
        return cls("kappa", Fraction(value))

    @classmethod
    def q(cls, value, k):
        return cls("q", Fraction(value), k)

    @property
    def offset(self) -> int:
        """Integer exponent shift of the sector basis.

        ``2*kappa - 1`` for two-mode sectors, ``k*(q - 1/k^2)`` for q sectors.
        """
        if self.variant == "kappa":
            return int(2 * self.value - 1)
        shift = self.k * (self.value - Fraction(1, self.k ** 2))
        assert shift.denominator == 1
        return int(shift)

    def __str__(self):
        return f"{self.variant}={self.value}"


@dataclass(frozen=True)
class EnergyLevel:
    sector: SectorLabel
    M: int
    E: float


DEFAULT_KAPPA_COUNT = 8


def sector_labels(model: ModelSpec, n: int = DEFAULT_KAPPA_COUNT) -> list[SectorLabel]:
    """Sector labels of ``model`` in increasing order (first ``n`` kappas for two-mode)."""
    if model.is_two_mode:
        return [SectorLabel.kappa(Fraction(i + 1, 2)) for i in range(n)]
    k = model.k
    return [SectorLabel.q(Fraction(j * k + 1, k * k), k) for j in range(k)]


def stability_factor(model: ModelSpec) -> float:
    """Lambda = sqrt(1 - g^2/w^2) (two-mode) or Omega = sqrt(1 - 4g^2/w^2) (squeezed)."""
    if model.kind is ModelKind.TWO_MODE:
        ratio = model.g / model.omega
    elif model.kind is ModelKind.SQUEEZED or (model.kind is ModelKind.K_HARMONIC and model.k == 2):
        ratio = 2 * model.g / model.omega
    else:
        raise DomainError(f"no stability factor for {model.kind.value} model with k={model.k}")
    if abs(ratio) >= 1:
        raise DomainError(f"outside unitary regime: |{'g' if model.is_two_mode else '2g'}/omega| = {abs(ratio)} >= 1")
    return math.sqrt(1.0 - ratio * ratio)


def _check_sector(model: ModelSpec, sector: SectorLabel):
    if model.is_two_mode:
        if sector.variant != "kappa":
            raise DomainError(f"two_mode model needs a kappa sector, got {sector}")
    elif sector.variant != "q" or sector.k != model.k:
        raise DomainError(f"sector {sector} does not belong to {model.kind.value} with k={model.k}")


def _exactly_solvable_kind(model: ModelSpec) -> ModelKind:
    if model.kind is ModelKind.K_HARMONIC:
        if model.k == 1:
            return ModelKind.DISPLACED
        if model.k == 2:
            return ModelKind.SQUEEZED
        raise DomainError(f"no closed-form spectrum for k={model.k} harmonic generation")
    return model.kind


def exact_energy(model: ModelSpec, sector: SectorLabel, M: int) -> EnergyLevel:
    """Closed-form energy of the degree-``M`` polynomial eigenstate in ``sector``."""
    if M < 0 or int(M) != M:
        raise DomainError(f"M must be a nonnegative integer, got {M}")
    M = int(M)
    _check_sector(model, sector)
    w, g = model.omega, model.g
    kind = _exactly_solvable_kind(model)
    if kind is ModelKind.TWO_MODE:
        lam = stability_factor(model)
        E = -w + (2 * M + 2 * float(sector.value - Fraction(1, 2)) + 1) * w * lam
    elif kind is ModelKind.SQUEEZED:
        om = stability_factor(model)
        E = -w / 2 + (2 * M + 2 * float(sector.value - Fraction(1, 4)) + 0.5) * w * om
    else:
        E = w * (M - (g / w) ** 2)
    return EnergyLevel(sector, M, E)


def full_spectrum(
    model: ModelSpec, levels: int, sectors: Optional[Sequence[SectorLabel]] = None
) -> list[EnergyLevel]:
    """Lowest ``levels`` closed-form energies with all sectors merged, ascending."""
    if levels < 1:
        raise DomainError("levels must be positive")
    if sectors is None:
        sectors = sector_labels(model)
    found = []
    for sector in sectors:
        found.extend(exact_energy(model, sector, M) for M in range(levels))
    found.sort(key=lambda lev: (lev.E, lev.sector, lev.M))
    return found[:levels]
