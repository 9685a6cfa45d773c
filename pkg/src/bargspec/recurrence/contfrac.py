"""Continued fractions for minimal-solution ratios and the spectral function F(E)."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..core import ConvergenceError, DomainError
from .coefficients import CoeffGenerator

TINY = 1e-300


@dataclass(frozen=True)
class CFValue:
    value: float
    depth: int
    pole: bool


def _backward(A: np.ndarray, B: np.ndarray) -> tuple[float, bool]:
    """R_n = -B_{n+1}/(A_{n+1} + R_{n+1}) run down from a zero tail.

    ``A``/``B`` hold A_{n+1..n+d}, B_{n+1..n+d}.  Returns R_n and whether the
    outermost denominator cancelled to rounding level.
    """
    R = 0.0
    den = 1.0
    for i in range(len(A) - 1, -1, -1):
        inner = R
        den = A[i] + R
        if den == 0.0:
            den = TINY
        R = -B[i] / den
    pole = abs(den) <= 8 * np.finfo(float).eps * (abs(A[0]) + abs(inner))
    return R, pole


def _coeff_lists(gen, n, depth):
    idx = np.arange(n + 1, n + 1 + depth)
    return gen.A(idx).tolist(), gen.B(idx).tolist()


def _lentz(gen: CoeffGenerator, n: int, tol: float, max_depth: int) -> CFValue:
    f = TINY
    C, D = f, 0.0
    for j in range(1, max_depth + 1):
        a, b = -gen.B(n + j), gen.A(n + j)
        D = b + a * D
        if D == 0.0:
            D = TINY
        C = b + a / C
        if C == 0.0:
            C = TINY
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < tol:
            return CFValue(f, j, not math.isfinite(f))
    raise ConvergenceError("Lentz evaluation did not converge", last=f, depth=max_depth)


def continued_fraction_R(
    gen: CoeffGenerator,
    n: int = 0,
    tol: float = 1e-14,
    max_depth: int = 10_000,
    method: str = "backward",
) -> CFValue:
    """R_n = K_{n+1}/K_n of the minimal solution as a continued fraction.

    ``method="backward"`` evaluates bottom-up from a zero tail, doubling the
    depth until two estimates agree to ``tol`` relatively.  ``"lentz"`` runs
    the modified Lentz scheme top-down.  A vanishing outermost denominator is
    reported through ``pole``.
    """
    if not gen.has_minimal_solution:
        raise DomainError("no minimal solution at these parameters; continued fraction undefined")
    if method == "lentz":
        return _lentz(gen, n, tol, max_depth)
    if method != "backward":
        raise DomainError(f"unknown method {method!r}")
    depth = 16
    prev, _ = _backward(*_coeff_lists(gen, n, depth))
    while True:
        depth2 = min(2 * depth, max_depth)
        cur, pole = _backward(*_coeff_lists(gen, n, depth2))
        scale = max(abs(cur), abs(prev), TINY)
        if abs(cur - prev) <= tol * scale:
            return CFValue(cur, depth2, bool(pole or not math.isfinite(cur)))
        if depth2 == max_depth:
            raise ConvergenceError(
                f"continued fraction not converged at depth {max_depth}",
                last_two=(prev, cur),
                depth=max_depth,
            )
        prev, depth = cur, depth2


def minimal_ratios(gen: CoeffGenerator, n_max: int, tol: float = 1e-13, max_extra: int = 1 << 16) -> np.ndarray:
    """R_0 .. R_{n_max-1} of the minimal solution, by one backward sweep.

    The sweep starts ``extra`` terms beyond n_max with a zero tail; ``extra``
    doubles until all requested ratios agree to ``tol``.
    """
    if not gen.has_minimal_solution:
        raise DomainError("no minimal solution at these parameters")
    extra = 32
    prev = None
    while extra <= max_extra:
        N = n_max + extra
        A, B = _coeff_lists(gen, 0, N)
        R = np.empty(N)
        r = 0.0
        for i in range(N - 1, -1, -1):
            den = A[i] + r
            if den == 0.0:
                den = TINY
            r = -B[i] / den
            R[i] = r
        out = R[:n_max]
        if prev is not None:
            err = np.abs(out - prev) / np.maximum(np.abs(out), TINY)
            if np.all(err <= tol):
                return out
        prev = out
        extra *= 2
    raise ConvergenceError("minimal-solution ratios did not settle", n_max=n_max)


def F_of_E(gen: CoeffGenerator, tol: float = 1e-14, max_depth: int = 10_000) -> float:
    """F(E) = R_0 + A_0; its zeros are the eigenvalues.  NaN at a continued-fraction pole."""
    cf = continued_fraction_R(gen, 0, tol, max_depth)
    if cf.pole:
        return math.nan
    return cf.value + gen.A(0)


@functools.lru_cache(maxsize=64)
def _sector_matrix(model, sector, N):
    from ..algebra import build_hamiltonian

    H = build_hamiltonian(model, sector, N)
    return H.diag, np.abs(H.offdiag)


def _dominance_index(gen: CoeffGenerator, max_n: int = 1 << 16) -> int:
    """An index past which every row of H - E is diagonally dominant with positive diagonal.

    Backward pivots are positive from there on, so only earlier ones can be
    negative.
    """
    N = 64
    while N <= max_n:
        diag, off = _sector_matrix(gen.model, gen.sector, N)
        margin = diag[1:-1] - gen.E - off[:-1] - off[1:]
        bad = np.nonzero(margin <= 0)[0]
        if len(bad) == 0:
            return 2
        last = int(bad[-1]) + 1
        if last < len(margin) // 2:
            return last + 2
        N *= 2
    raise ConvergenceError("no diagonal dominance within the searched truncation", max_n=max_n)


def eigenvalue_count(gen: CoeffGenerator) -> int:
    """Number of sector eigenvalues strictly below ``gen.E``.

    The bottom-up continued fraction is the backward LDL^T factorization of
    the sector Jacobi matrix H - E: pivot u_{n+1} has the sign of -g R_n and
    u_0 the sign of g F(E).  Sylvester's law of inertia turns the number of
    negative pivots into an eigenvalue count.
    """
    n_cut = _dominance_index(gen)
    R = minimal_ratios(gen, n_cut)
    F = F_of_E(gen)
    s = math.copysign(1.0, gen.model.g)
    return int(np.sum(s * R > 0)) + int(s * F < 0)
