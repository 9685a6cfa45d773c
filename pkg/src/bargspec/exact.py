"""Closed-form eigenstates psi(z) = exp(-r z) prod(z - z_i) and their checks."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .core import (
    ConvergenceError,
    DomainError,
    ModelKind,
    ModelSpec,
    SectorLabel,
    _check_sector,
    _exactly_solvable_kind,
    exact_energy,
    stability_factor,
)


@dataclass(frozen=True)
class BetheSystem:
    """sum_{j!=i} p/(z_i - z_j) + beta + gamma/z_i = 0 for i = 1..M."""

    M: int
    pair_coeff: float
    linear_coeff: float
    pole_coeff: float

    def residuals(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        return self.pair_coeff * (1.0 / diff).sum(axis=1) + self.linear_coeff + self.pole_coeff / z

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        inv2 = self.pair_coeff / diff ** 2
        J = inv2.copy()
        np.fill_diagonal(J, -inv2.sum(axis=1) - self.pole_coeff / z ** 2)
        return J

    @property
    def laguerre_alpha(self) -> float:
        return 2 * self.pole_coeff / self.pair_coeff - 1

    @property
    def laguerre_scale(self) -> float:
        return -self.pair_coeff / (2 * self.linear_coeff)


@dataclass
class RootReport:
    max_residual: float
    iterations: int
    residuals: list


@dataclass
class ExactEigenstate:
    model: ModelSpec
    sector: SectorLabel
    M: int
    E: float
    roots: np.ndarray
    prefactor_rate: float
    _coeff_cache: dict = field(default_factory=dict, repr=False)

    def taylor(self, n_max: int):
        """(log|c_n|, sign c_n) for n = 0..n_max; cached per instance."""
        cached = self._coeff_cache.get("taylor")
        if cached is None or len(cached[0]) <= n_max:
            cached = taylor_coefficients(self.roots, self.prefactor_rate, n_max)
            self._coeff_cache["taylor"] = cached
        logs, signs = cached
        return logs[: n_max + 1], signs[: n_max + 1]


def laguerre_initial_roots(M: int, alpha: float, scale: float) -> np.ndarray:
    """``scale`` times the zeros of L_M^(alpha), ascending, via the Jacobi matrix."""
    if M < 1:
        raise DomainError("M must be at least 1")
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")
    i = np.arange(M)
    diag = 2 * i + alpha + 1
    off = np.sqrt(i[1:] * (i[1:] + alpha))
    x = eigh_tridiagonal(diag, off, eigvals_only=True)
    return np.sort(scale * x)


def bethe_system(model: ModelSpec, sector: SectorLabel, M: int) -> BetheSystem:
    _check_sector(model, sector)
    w, g = model.omega, model.g
    if g == 0:
        raise DomainError("Bethe equations need g != 0")
    kind = _exactly_solvable_kind(model)
    if kind is ModelKind.TWO_MODE:
        return BetheSystem(M, 1.0, w * stability_factor(model) / g, float(sector.value))
    if kind is ModelKind.SQUEEZED:
        return BetheSystem(M, 2.0, w * stability_factor(model) / (2 * g), float(2 * sector.value))
    raise DomainError("the displaced model has no Bethe system; its roots are all -g/omega")


def solve_bethe(system: BetheSystem, tol: float = 1e-10, max_iter: int = 100, start=None):
    """Newton iteration on the Bethe equations from scaled Laguerre zeros.

    Returns the ascending roots and a RootReport.  ``start`` overrides the
    initial guess.
    """
    M = system.M
    if M == 0:
        return np.zeros(0), RootReport(0.0, 0, [])
    if not math.isfinite(system.linear_coeff) or system.linear_coeff == 0:
        raise DomainError("linear coefficient must be finite and nonzero")
    if start is None:
        z = laguerre_initial_roots(M, system.laguerre_alpha, system.laguerre_scale)
    else:
        z = np.sort(np.asarray(start, dtype=float))
    if M > 1 and np.min(np.diff(z)) < 1e-12:
        raise ConvergenceError("coincident Bethe roots in the starting guess", roots=z.tolist())
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        res = float(np.abs(system.residuals(z)).max())
    history = [res]
    it = 0
    polish = 2
    while it < max_iter and polish > 0:
        if res < tol:
            polish -= 1
        try:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                z_new = z - np.linalg.solve(system.jacobian(z), system.residuals(z))
                res_new = float(np.abs(system.residuals(z_new)).max())
        except np.linalg.LinAlgError:
            res_new = math.nan
        if not math.isfinite(res_new):
            break
        it += 1
        if res < tol and res_new >= res:
            break
        z, res = z_new, res_new
        history.append(res)
    if not res < tol:
        raise ConvergenceError(
            f"Bethe Newton iteration did not converge: residual {res:.3e} after {it} steps",
            last_residual=float(res),
            iterations=it,
        )
    z = np.sort(z)
    if M > 1 and np.min(np.diff(z)) < 1e-12:
        raise ConvergenceError("coincident Bethe roots", roots=z.tolist())
    return z, RootReport(float(res), it, history)


def prefactor_rate(model: ModelSpec) -> float:
    w, g = model.omega, model.g
    kind = _exactly_solvable_kind(model)
    if kind is ModelKind.DISPLACED:
        return g / w
    if g == 0:
        return 0.0
    if kind is ModelKind.TWO_MODE:
        return (w / g) * (1 - stability_factor(model))
    return (w / (4 * g)) * (1 - stability_factor(model))


def build_eigenstate(model: ModelSpec, sector: SectorLabel, M: int, tol: float = 1e-10) -> ExactEigenstate:
    level = exact_energy(model, sector, M)
    kind = _exactly_solvable_kind(model)
    rate = prefactor_rate(model)
    if model.g == 0:
        roots = np.zeros(M)
    elif kind is ModelKind.DISPLACED:
        roots = np.full(M, -model.g / model.omega)
    else:
        roots, _ = solve_bethe(bethe_system(model, sector, M), tol)
    return ExactEigenstate(model, sector, M, level.E, roots, rate)


def _poly_and_derivatives(roots: np.ndarray, z):
    """phi, phi', phi'' of prod(z - z_i) by the product rule, no division by (z - z_i)."""
    f = z - roots
    M = len(roots)
    p0 = np.prod(f) if M else 1.0
    p1 = 0.0
    p2 = 0.0
    for i in range(M):
        rest = np.delete(f, i)
        p1 += np.prod(rest)
        for j in range(M):
            if j != i:
                p2 += np.prod(np.delete(f, [i, j]))
    return p0, p1, p2


def _ode_coefficients(model: ModelSpec, sector: SectorLabel, z, E):
    """(c2, c1, c0) of the sector ODE c2 psi'' + c1 psi' + c0 psi = 0."""
    w, g = model.omega, model.g
    kind = _exactly_solvable_kind(model)
    x = float(sector.value)
    if kind is ModelKind.TWO_MODE:
        return g * z, 2 * (w * z + g * x), g * z + 2 * w * (x - 0.5) - E
    if kind is ModelKind.SQUEEZED:
        return 4 * g * z, 2 * w * z + 8 * g * x, g * z + 2 * w * (x - 0.25) - E
    return 0.0, w * z + g, g * z - E


def ode_residual(state: ExactEigenstate, sample_points: Sequence[float], E: Optional[float] = None) -> float:
    """max |ODE(psi)(z)| / (1 + |psi(z)|) over the sample points.

    ``E`` defaults to the state's own energy; pass another value to probe
    the sensitivity to an energy defect.
    """
    E = state.E if E is None else E
    r = state.prefactor_rate
    worst = 0.0
    for z in sample_points:
        p0, p1, p2 = _poly_and_derivatives(state.roots, z)
        ez = math.exp(-r * z)
        psi = ez * p0
        d1 = ez * (p1 - r * p0)
        d2 = ez * (p2 - 2 * r * p1 + r * r * p0)
        c2, c1, c0 = _ode_coefficients(state.model, state.sector, z, E)
        val = c2 * d2 + c1 * d1 + c0 * psi
        worst = max(worst, abs(val) / (1 + abs(psi)))
    return worst


def eval_wavefunction(state: ExactEigenstate, z: complex) -> complex:
    """psi(z), accumulated as log-magnitude plus phase so large |z| does not overflow."""
    z = complex(z)
    logmag = (-state.prefactor_rate * z).real
    phase = (-state.prefactor_rate * z).imag
    for zi in state.roots:
        f = z - zi
        if f == 0:
            return 0j
        logmag += math.log(abs(f))
        phase += cmath.phase(f)
    return cmath.rect(math.exp(logmag), phase) if logmag < 709 else complex(math.inf, math.inf)


def taylor_coefficients(roots: np.ndarray, rate: float, n_max: int):
    """log|c_n| and sign(c_n) of exp(-rate z) prod(z - z_i) for n = 0..n_max.

    c_n = e_n * S_n with e_n = (-rate)^n / n! and S_n a degree-M polynomial in n,
    so only S_n is formed in ordinary floating point.
    """
    poly = np.poly(roots)[::-1] if len(roots) else np.array([1.0])  # ascending powers
    n = np.arange(n_max + 1)
    logs = np.full(n_max + 1, -np.inf)
    signs = np.zeros(n_max + 1)
    if rate == 0:
        m = min(len(poly), n_max + 1)
        with np.errstate(divide="ignore"):
            logs[:m] = np.log(np.abs(poly[:m]))
        signs[:m] = np.sign(poly[:m])
        return logs, signs
    S = np.zeros(n_max + 1)
    falling = np.ones(n_max + 1)
    for j, pj in enumerate(poly):
        if j > 0:
            falling = falling * (n - j + 1)
        S += pj * (-1.0 / rate) ** j * falling
    log_e = n * math.log(abs(rate)) - gammaln(n + 1)
    sign_e = np.where(n % 2 == 1, math.copysign(1.0, -rate), 1.0)
    with np.errstate(divide="ignore"):
        logs = log_e + np.log(np.abs(S))
    signs = sign_e * np.sign(S)
    return logs, signs


def log_weights(sector: SectorLabel, n_max: int) -> np.ndarray:
    """log mu_n, the squared Bargmann norm of z^n in the sector."""
    n = np.arange(n_max + 1)
    if sector.variant == "kappa":
        return gammaln(n + sector.offset + 1) + gammaln(n + 1)
    return gammaln(sector.k * n + sector.offset + 1)


@dataclass
class NormResult:
    log_partial_sums: np.ndarray
    converged: bool

    @property
    def partial_sums(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_partial_sums)

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])


def _as_log_series(coeffs):
    if hasattr(coeffs, "log_mags"):
        return np.asarray(coeffs.log_mags, dtype=float), np.asarray(coeffs.signs, dtype=float)
    if isinstance(coeffs, tuple) and len(coeffs) == 2:
        return np.asarray(coeffs[0], dtype=float), np.asarray(coeffs[1], dtype=float)
    c = np.asarray(coeffs, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(c)), np.sign(c)


def bargmann_norm_sq(coeffs, sector: SectorLabel, n_max: int, window: int = 20) -> NormResult:
    """Partial sums of sum_n |c_n|^2 mu_n, accumulated in log space.

    ``coeffs`` is an array of c_n, a (log|c_n|, sign) pair, or any object with
    ``log_mags``/``signs``.  Converged when the term ratio stays below 1/2
    over the last ``window`` terms.
    """
    logs, _ = _as_log_series(coeffs)
    if len(logs) < n_max + 1:
        raise DomainError(f"need {n_max + 1} coefficients, got {len(logs)}")
    terms = 2 * logs[: n_max + 1] + log_weights(sector, n_max)
    partial = np.logaddexp.accumulate(terms)
    tail = terms[-(window + 1):]
    finite = np.isfinite(tail)
    if finite.sum() < 2:
        converged = bool(np.all(~finite[1:]))  # trailing exact zeros: finite sum
    else:
        t = tail[finite]
        converged = bool(np.all(np.diff(t) < math.log(0.5)))
    return NormResult(partial, converged)


def explicit_roots(model: ModelSpec, sector: SectorLabel, M: int) -> np.ndarray:
    """Explicit M = 1, 2 root formulas for the two-mode and squeezed models."""
    w, g = model.omega, model.g
    kind = _exactly_solvable_kind(model)
    x = float(sector.value)
    if kind is ModelKind.TWO_MODE:
        lam = stability_factor(model)
        if M == 1:
            return np.array([-x * g / (w * lam)])
        if M == 2:
            s = math.sqrt(1 + 2 * x)
            return np.sort(np.array([(-(1 + 2 * x) + s), (-(1 + 2 * x) - s)]) * g / (2 * w * lam))
    elif kind is ModelKind.SQUEEZED:
        om = stability_factor(model)
        if M == 1:
            return np.array([-4 * x * g / (w * om)])
        if M == 2:
            s = math.sqrt(1 + 2 * x)
            return np.sort(np.array([(-(1 + 2 * x) + s), (-(1 + 2 * x) - s)]) * 2 * g / (w * om))
    raise DomainError(f"no explicit root formula for {kind.value} with M={M}")

