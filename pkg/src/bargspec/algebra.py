"""Ladder-operator matrices on truncated sector bases and the sector Hamiltonians.

Two representation families are covered: the positive discrete series of
su(1,1) realized by a degenerate two-mode boson (kappa sectors), and the
degree-(k-1) polynomial deformation realized by k-th powers of one mode
(q sectors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DomainError, ModelSpec, SectorLabel, _check_sector


@dataclass(frozen=True)
class LadderMatrices:
    sector: SectorLabel
    N: int
    X0: np.ndarray
    Xplus: np.ndarray
    Xminus: np.ndarray


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diag: np.ndarray
    offdiag: np.ndarray
    model: ModelSpec
    sector: SectorLabel

    @property
    def N(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def _order(sector: SectorLabel) -> int:
    # kappa sectors obey the undeformed su(1,1) relations, i.e. the k = 2 polynomial
    return 2 if sector.variant == "kappa" else sector.k


def raising_squared(sector: SectorLabel, n: int) -> Fraction:
    """Exact square of the matrix element <n+1| X+ |n>."""
    x = sector.value
    if sector.variant == "kappa":
        return (n + 2 * x) * (n + 1)
    k = sector.k
    out = Fraction(1)
    for i in range(1, k + 1):
        out *= n + x + Fraction(i * k - 1, k * k)
    return out


def weights(sector: SectorLabel, N: int) -> np.ndarray:
    return np.array([float(n + sector.value) for n in range(N)])


def raising_elements(sector: SectorLabel, N: int) -> np.ndarray:
    """The N-1 subdiagonal entries of X+, sqrt taken once from exact squares."""
    return np.array([math.sqrt(raising_squared(sector, n)) for n in range(N - 1)])


def rep_matrices(sector: SectorLabel, N: int) -> LadderMatrices:
    if N < 2:
        raise DomainError("truncation dimension must be at least 2")
    X0 = np.diag(weights(sector, N))
    Xplus = np.diag(raising_elements(sector, N), -1)
    return LadderMatrices(sector, N, X0, Xplus, Xplus.T.copy())


def phi_polynomial(k: int, x):
    """The degree-k polynomial phi^(k) entering [X+, X-] = phi(X0) - phi(X0 - 1)."""
    if k < 1:
        raise DomainError("k must be positive")
    x = np.asarray(x, dtype=float)
    prod = np.ones_like(x)
    for i in range(1, k + 1):
        prod = prod * (x + i / k - 1.0 / k ** 2)
    return -prod + float(casimir_value(k))


def casimir_value(k: int) -> Fraction:
    """Value of X- X+ + phi(X0) in the single-boson realization, as an exact rational."""
    if k < 1:
        raise DomainError("k must be positive")
    out = Fraction(1)
    for i in range(1, k + 1):
        out *= Fraction(i - k, k) - Fraction(1, k * k)
    return out


def _phi_matrix(k: int, X0: np.ndarray, shift: float = 0.0) -> np.ndarray:
    return np.diag(phi_polynomial(k, np.diag(X0) - shift))


def _scaled_deviation(lhs, rhs, scale):
    # float64 entries for k=5, N=64 reach ~1e9, so deviations are measured
    # against the size of the products that were subtracted
    return np.abs(lhs - rhs) / np.maximum(1.0, scale)


def commutator_check(sector: SectorLabel, N: int) -> float:
    """Max scaled deviation from the algebra relations over interior rows.

    Rows 0..N-2 are checked for [X0, X+-] = +-X+-, and rows 0..N-k-1 for
    [X+, X-] = phi(X0) - phi(X0 - 1).  Each deviation is divided by
    max(1, |entries of the matrix products involved|).
    """
    k = _order(sector)
    if N < k + 2:
        raise DomainError(f"N={N} too small for order {k}; need N >= {k + 2}")
    L = rep_matrices(sector, N)
    X0, Xp, Xm = L.X0, L.Xplus, L.Xminus
    worst = 0.0
    for X, sign in ((Xp, 1.0), (Xm, -1.0)):
        a, b = X0 @ X, X @ X0
        dev = _scaled_deviation(a - b, sign * X, np.abs(a) + np.abs(b))
        worst = max(worst, dev[: N - 1].max())
    a, b = Xp @ Xm, Xm @ Xp
    target = _phi_matrix(k, X0) - _phi_matrix(k, X0, 1.0)
    scale = np.abs(a) + np.abs(b) + np.abs(_phi_matrix(k, X0)) + np.abs(_phi_matrix(k, X0, 1.0))
    dev = _scaled_deviation(a - b, target, scale)
    worst = max(worst, dev[: N - k].max())
    return float(worst)


def casimir_diagonal(sector: SectorLabel, N: int) -> np.ndarray:
    """Diagonal of X- X+ + phi(X0) on rows 0..N-2 (the last row leaks out of the basis)."""
    L = rep_matrices(sector, N)
    C = L.Xminus @ L.Xplus + _phi_matrix(_order(sector), L.X0)
    return np.diag(C)[: N - 1]


def casimir_check(sector: SectorLabel, N: int) -> float:
    """Max scaled deviation of the Casimir diagonal from its constant value.

    For q sectors the constant is ``casimir_value(k)``; for kappa sectors it
    is kappa(1 - kappa).
    """
    L = rep_matrices(sector, N)
    k = _order(sector)
    XmXp = L.Xminus @ L.Xplus
    phi = _phi_matrix(k, L.X0)
    if sector.variant == "kappa":
        expected = float(sector.value * (1 - sector.value))
    else:
        expected = float(casimir_value(k))
    C = np.diag(XmXp + phi)[: N - 1]
    scale = (np.abs(np.diag(XmXp)) + np.abs(np.diag(phi)))[: N - 1]
    return float(_scaled_deviation(C, expected, scale).max())


def build_hamiltonian(model: ModelSpec, sector: SectorLabel, N: int) -> TridiagonalHamiltonian:
    """Tridiagonal sector block of the model Hamiltonian in its orthonormal basis."""
    if N < 2:
        raise DomainError("truncation dimension must be at least 2")
    _check_sector(model, sector)
    w, g = model.omega, model.g
    n = np.arange(N)
    if model.is_two_mode:
        diag = 2 * w * (n + float(sector.value)) - w
        offdiag = g * raising_elements(sector, N)
    else:
        k = model.k
        # basis state |q,n> is Fock state m = k n + offset, so the diagonal is w*m exactly
        diag = w * (k * n + sector.offset).astype(float)
        offdiag = g * k ** (k / 2) * raising_elements(sector, N)
    return TridiagonalHamiltonian(diag.astype(float), offdiag, model, sector)


def fock_hamiltonian(model: ModelSpec, dim: int) -> np.ndarray:
    """Dense w a'a + g(a'^k + a^k) on Fock states 0..dim-1 (single-mode models)."""
    if model.is_two_mode:
        raise DomainError("fock_hamiltonian covers single-mode models only")
    k = model.k
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    ad = a.T
    ak = np.linalg.matrix_power(a, k)
    return model.omega * ad @ a + model.g * (ak.T + ak)
