"""Grid scan of F(E) with bracket refinement and pole/zero discrimination."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..core import ConvergenceError, DomainError, ModelSpec, SectorLabel
from .coefficients import coeffs_for
from .contfrac import F_of_E, eigenvalue_count
from .series import normalizability_diagnostic

MAX_SPLITS = 60


@dataclass
class Bracket:
    lo: float
    hi: float
    kind: str  # "zero" or "pole"
    E: float
    F: float
    verdict: str
    index: int = -1  # position of the eigenvalue in the sector spectrum (zeros only)


@dataclass
class SpectrumScan:
    E_grid: np.ndarray
    F_values: np.ndarray
    brackets: list = field(default_factory=list)
    counts: np.ndarray = None

    @property
    def eigenvalues(self) -> list:
        return [b.E for b in self.brackets if b.kind == "zero"]

    @property
    def residuals(self) -> list:
        return [b.F for b in self.brackets if b.kind == "zero"]

    @property
    def poles(self) -> list:
        return [b.E for b in self.brackets if b.kind == "pole"]


class _Probe:
    """F(E) and the eigenvalue count below E, memoized per energy."""

    def __init__(self, model, sector, cf_tol):
        self.model, self.sector, self.cf_tol = model, sector, cf_tol
        self._cache = {}

    def __call__(self, E: float):
        E = float(E)
        hit = self._cache.get(E)
        if hit is None:
            gen = coeffs_for(self.model, self.sector, E)
            try:
                F = F_of_E(gen, tol=self.cf_tol)
            except ConvergenceError:
                F = math.nan
            hit = (F, eigenvalue_count(gen))
            self._cache[E] = hit
        return hit

    def F(self, E: float) -> float:
        return self(E)[0]


def scan_spectrum(
    model: ModelSpec,
    sector: SectorLabel,
    E_range: tuple,
    grid_points: int = 400,
    tol: float = 1e-12,
    f_tol: float = 1e-8,
    n_check: int = 200,
    cf_tol: float = 1e-14,
) -> SpectrumScan:
    """Eigenvalues in ``E_range`` as zeros of F(E) = R_0 + A_0.

    F is evaluated on a uniform grid together with the number of eigenvalues
    below each grid energy (``eigenvalue_count``).  A cell whose count rises
    is split until it isolates one zero with a sign change, which Brent's
    method refines to ``tol`` in E; this also catches a zero sharing a cell
    with a pole, as happens at weak coupling.  Each refined point counts as an
    eigenvalue only if |F| < ``f_tol`` and the physical series passes the
    normalizability diagnostic.  Sign changes in cells where the count does
    not rise are the poles of R_0.
    """
    E_min, E_max = map(float, E_range)
    if not E_min < E_max:
        raise DomainError("E_range must satisfy E_min < E_max")
    if grid_points < 2:
        raise DomainError("need at least two grid points")
    if not coeffs_for(model, sector, E_min).has_minimal_solution:
        raise DomainError("F(E) needs a minimal solution; none exists at these parameters")
    probe = _Probe(model, sector, cf_tol)
    grid = np.linspace(E_min, E_max, grid_points)
    vals = [probe(E) for E in grid]
    Fv = np.array([v[0] for v in vals])
    counts = np.array([v[1] for v in vals])
    scan = SpectrumScan(grid, Fv, counts=counts)

    def f(E):
        val = probe.F(E)
        return val if not math.isnan(val) else math.inf

    def confirm(lo, hi, root, index):
        Fr = probe.F(root)
        diag = normalizability_diagnostic(coeffs_for(model, sector, root), n_check, f_tol=f_tol)
        ok = math.isfinite(Fr) and abs(Fr) < f_tol and diag.verdict == "converging"
        scan.brackets.append(Bracket(lo, hi, "zero" if ok else "pole", float(root), float(Fr), diag.verdict,
                                     index if ok else -1))

    def pole_in(lo, hi, Flo, Fhi):
        if np.isfinite(Flo) and np.isfinite(Fhi) and Flo * Fhi < 0:
            root = brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
            scan.brackets.append(Bracket(lo, hi, "pole", float(root), float(probe.F(root)), "pole"))

    def cell(lo, hi, depth=0):
        (Flo, clo), (Fhi, chi) = probe(lo), probe(hi)
        if chi == clo:
            pole_in(lo, hi, Flo, Fhi)
            return
        if chi - clo == 1 and np.isfinite(Flo) and np.isfinite(Fhi) and Flo * Fhi <= 0:
            if Flo == 0.0:
                root = lo
            elif Fhi == 0.0:
                root = hi
            else:
                root = brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
            if abs(probe.F(root)) < f_tol:
                confirm(lo, hi, root, clo)
                return
        if depth >= MAX_SPLITS or hi - lo <= tol:
            # pole and zero coincide at working precision; let the check decide
            confirm(lo, hi, 0.5 * (lo + hi), clo)
            return
        mid = 0.5 * (lo + hi)
        cell(lo, mid, depth + 1)
        cell(mid, hi, depth + 1)

    for i in range(grid_points - 1):
        cell(float(grid[i]), float(grid[i + 1]))
    scan.brackets.sort(key=lambda b: b.E)
    return scan
