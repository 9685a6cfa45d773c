import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh_tridiagonal

from bargspec.algebra import build_hamiltonian
from bargspec.core import DomainError, ModelSpec, SectorLabel
from bargspec.oracle import convergence_study, eigenvalues_tridiagonal


def test_small_examples():
    assert eigenvalues_tridiagonal((np.array([0.0, 2, 4]), np.zeros(2)), 3) == pytest.approx([0, 2, 4])
    ev = eigenvalues_tridiagonal((np.array([0.0, 1.0]), np.array([1.0])), 2)
    assert ev == pytest.approx([(1 - math.sqrt(5)) / 2, (1 + math.sqrt(5)) / 2], abs=1e-14)
    H = build_hamiltonian(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(Fraction(1, 2)), 200)
    assert eigenvalues_tridiagonal(H, 1)[0] == pytest.approx(-0.2, abs=1e-8)


def test_argument_errors():
    with pytest.raises(DomainError):
        eigenvalues_tridiagonal((np.zeros(3), np.zeros(1)))
    with pytest.raises(DomainError):
        eigenvalues_tridiagonal((np.zeros(3), np.zeros(2)), 4)
    m, s = ModelSpec.squeezed(1, 0.3), SectorLabel.q(Fraction(1, 4), 2)
    with pytest.raises(DomainError):
        convergence_study(m, s, [50], 2)
    with pytest.raises(DomainError):
        convergence_study(m, s, [100, 50], 2)
    with pytest.raises(DomainError):
        convergence_study(m, s, [2, 4], 3)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(2, 60), seed=st.integers(0, 10_000))
def test_matches_scipy(N, seed):
    rng = np.random.default_rng(seed)
    d = rng.normal(size=N) * 10
    e = rng.normal(size=N - 1)
    ours = eigenvalues_tridiagonal((d, e))
    ref = eigh_tridiagonal(d, e, eigvals_only=True)
    width = ref[-1] - ref[0] + 1
    assert np.max(np.abs(ours - ref)) <= 1e-12 * width * 10


def test_interlacing_under_truncation():
    model, sector = ModelSpec.squeezed(1, 0.4), SectorLabel.q(Fraction(3, 4), 2)
    prev = None
    for N in range(10, 60, 7):
        cur = eigenvalues_tridiagonal(build_hamiltonian(model, sector, N), 3)
        if prev is not None:
            assert np.all(cur <= prev + 1e-12)
        prev = cur


def test_study_examples():
    st_ = convergence_study(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(Fraction(1, 2)), [50, 100, 200, 400], 3)
    assert st_.converged() and st_.final() == pytest.approx([-0.2, 1.4, 3.0], abs=1e-8)
    st_ = convergence_study(ModelSpec.squeezed(1, 0.3), SectorLabel.q(Fraction(1, 4), 2), [50, 100, 200], 2)
    assert st_.converged() and st_.final() == pytest.approx([-0.1, 1.5], abs=1e-8)
    st_ = convergence_study(ModelSpec.k_harmonic(3, 1, 0.5), SectorLabel.q(Fraction(1, 9), 3), [50, 100, 200, 400], 1)
    assert st_.verdicts == ["not_converged"] and st_.drift[0] < 0
    rows = np.array(st_.eigen_tables)
    assert np.all(np.diff(rows, axis=0) < 0)


def test_slow_convergence_near_boundary():
    # gap at fixed N grows as |2g/omega| -> 1
    sector = SectorLabel.q(Fraction(1, 4), 2)
    gaps = []
    for g in (0.3, 0.4, 0.45, 0.48):
        s = convergence_study(ModelSpec.squeezed(1, g), sector, [20, 40], 1)
        gaps.append(s.cauchy_gaps[-1, 0])
    assert all(b > a for a, b in zip(gaps, gaps[1:]))
    s = convergence_study(ModelSpec.squeezed(1, 0.49), sector, [50, 100, 200], 1, tol=1e-8)
    assert s.verdicts[0] in ("undetermined", "converged")
