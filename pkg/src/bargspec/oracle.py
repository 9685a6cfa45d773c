"""Truncated-matrix diagonalization used as an independent check on the spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import TridiagonalHamiltonian, build_hamiltonian
from .core import DomainError, ModelSpec, SectorLabel


def _sturm_count(diag, off2, x, pivmin):
    """Number of eigenvalues strictly below each shift in ``x`` (vectorized over shifts)."""
    count = np.zeros(x.shape, dtype=int)
    d = diag[0] - x
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    count += d < 0
    for i in range(1, len(diag)):
        d = diag[i] - x - off2[i - 1] / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        count += d < 0
    return count


def eigenvalues_tridiagonal(H, m: int | None = None) -> np.ndarray:
    """Lowest ``m`` eigenvalues of a symmetric tridiagonal matrix, ascending.

    Bisection on Sturm sequence counts, run for all wanted indices at once.
    ``H`` is a TridiagonalHamiltonian or a ``(diag, offdiag)`` pair.
    """
    if isinstance(H, TridiagonalHamiltonian):
        diag, off = H.diag, H.offdiag
    else:
        diag, off = H
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    N = len(diag)
    if len(off) != N - 1:
        raise DomainError("offdiagonal must have length N-1")
    m = N if m is None else m
    if not 1 <= m <= N:
        raise DomainError(f"m={m} must lie in 1..{N}")
    if N == 1:
        return diag.copy()

    absoff = np.abs(off)
    rad = np.zeros(N)
    rad[:-1] += absoff
    rad[1:] += absoff
    lo = float(np.min(diag - rad))
    hi = float(np.max(diag + rad))
    norm = max(abs(lo), abs(hi), np.finfo(float).tiny)
    eps = np.finfo(float).eps
    off2 = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off2.max(initial=0.0)))
    lo -= 2 * eps * norm + pivmin
    hi += 2 * eps * norm + pivmin

    idx = np.arange(m)
    left = np.full(m, lo)
    right = np.full(m, hi)
    atol = 2 * eps * norm
    for _ in range(200):
        width = right - left
        tol = np.maximum(atol, 2 * eps * np.maximum(np.abs(left), np.abs(right)))
        active = width > tol
        if not active.any():
            break
        mid = 0.5 * (left + right)
        below = _sturm_count(diag, off2, mid, pivmin)
        # index i lies below mid when more than i eigenvalues are below mid
        go_left = below > idx
        right = np.where(active & go_left, mid, right)
        left = np.where(active & ~go_left, mid, left)
    return 0.5 * (left + right)


@dataclass
class ConvergenceStudy:
    truncations: list
    eigen_tables: list
    cauchy_gaps: np.ndarray
    verdicts: list
    tol: float
    drift: list = field(default_factory=list)

    def converged(self) -> bool:
        return all(v == "converged" for v in self.verdicts)

    def final(self) -> np.ndarray:
        return np.asarray(self.eigen_tables[-1])


def _level_verdict(values, gaps, tol):
    if gaps[-1] < tol and all(b <= a or b < tol for a, b in zip(gaps, gaps[1:])):
        return "converged"
    steps = np.diff(values)
    monotone = np.all(steps < 0) or np.all(steps > 0)
    nondecreasing = all(b >= a for a, b in zip(gaps, gaps[1:]))
    if monotone and nondecreasing:
        return "not_converged"
    return "undetermined"


def convergence_study(
    model: ModelSpec,
    sector: SectorLabel,
    truncations: Sequence[int],
    m: int,
    tol: float = 1e-8,
) -> ConvergenceStudy:
    """Lowest ``m`` truncated eigenvalues across increasing truncations, with per-level verdicts.

    A level is ``converged`` when its last Cauchy gap is below ``tol`` and the
    gaps never grow above ``tol``; ``not_converged`` when the gaps are
    non-decreasing and the eigenvalue drifts monotonically; otherwise
    ``undetermined`` (slow but not clearly divergent).
    """
    truncations = [int(n) for n in truncations]
    if len(truncations) < 2:
        raise DomainError("need at least two truncations")
    if any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise DomainError("truncations must be strictly increasing")
    if m > truncations[0]:
        raise DomainError("m exceeds the smallest truncation")
    tables = [eigenvalues_tridiagonal(build_hamiltonian(model, sector, N), m) for N in truncations]
    arr = np.array(tables)
    gaps = np.abs(np.diff(arr, axis=0))
    verdicts = [_level_verdict(arr[:, i], gaps[:, i], tol) for i in range(m)]
    drift = [float(arr[-1, i] - arr[0, i]) for i in range(m)]
    return ConvergenceStudy(truncations, [t.tolist() for t in tables], gaps, verdicts, tol, drift)
