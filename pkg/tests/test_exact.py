import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bargspec.core import ConvergenceError, DomainError, ModelSpec, SectorLabel, exact_energy, sector_labels
from bargspec.exact import (
    BetheSystem,
    bargmann_norm_sq,
    bethe_system,
    build_eigenstate,
    eval_wavefunction,
    laguerre_initial_roots,
    ode_residual,
    explicit_roots,
    solve_bethe,
)
from bargspec.algebra import build_hamiltonian
from bargspec.oracle import eigenvalues_tridiagonal

HALF = Fraction(1, 2)
Q14 = SectorLabel.q(Fraction(1, 4), 2)


def test_laguerre_examples():
    assert laguerre_initial_roots(1, 0.0, -0.375) == pytest.approx([-0.375])
    assert laguerre_initial_roots(2, 0.0, 1.0) == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)])
    assert laguerre_initial_roots(1, 1.0, 1.0) == pytest.approx([2.0])
    with pytest.raises(DomainError):
        laguerre_initial_roots(0, 0.0, 1.0)
    with pytest.raises(DomainError):
        laguerre_initial_roots(2, -1.0, 1.0)


def test_bethe_examples():
    tm = ModelSpec.two_mode(1, 0.6)
    k12 = SectorLabel.kappa(HALF)
    z, rep = solve_bethe(bethe_system(tm, k12, 1))
    assert z == pytest.approx([-0.375], abs=1e-12)
    z, rep = solve_bethe(bethe_system(tm, k12, 2))
    assert z == pytest.approx([-1.280330, -0.219670], abs=1e-6)
    assert rep.max_residual < 1e-10
    z, _ = solve_bethe(bethe_system(ModelSpec.squeezed(1, 0.3), Q14, 1))
    assert z == pytest.approx([-0.375], abs=1e-12)
    z, rep = solve_bethe(bethe_system(tm, k12, 0))
    assert len(z) == 0 and rep.max_residual == 0


def test_bethe_system_errors():
    with pytest.raises(DomainError):
        bethe_system(ModelSpec.two_mode(1, 0.0), SectorLabel.kappa(HALF), 2)
    with pytest.raises(DomainError):
        bethe_system(ModelSpec.displaced(1, 0.2), SectorLabel.q(1, 1), 2)
    with pytest.raises(DomainError, match="outside unitary regime"):
        bethe_system(ModelSpec.two_mode(1, 1.2), SectorLabel.kappa(HALF), 2)


def test_bethe_nonconvergence_reported():
    sys_ = BetheSystem(3, 1.0, 1.0, 0.5)
    with pytest.raises(ConvergenceError) as exc:
        solve_bethe(sys_, max_iter=1, start=np.array([-1.0, -1.0 + 1e-3, 5.0]))
    assert "residual" in str(exc.value) or exc.value.details


def test_coincident_start_rejected():
    sys_ = BetheSystem(2, 1.0, 1.0, 0.5)
    with pytest.raises(ConvergenceError):
        solve_bethe(sys_, start=np.array([-1.0, -1.0]))


def test_build_eigenstate_examples():
    d = build_eigenstate(ModelSpec.displaced(1, 0.2), SectorLabel.q(1, 1), 2)
    assert d.prefactor_rate == pytest.approx(0.2) and d.roots == pytest.approx([-0.2, -0.2]) and d.E == pytest.approx(1.96)
    t = build_eigenstate(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(HALF), 0)
    assert t.prefactor_rate == pytest.approx(1 / 3) and len(t.roots) == 0 and t.E == pytest.approx(-0.2)
    s = build_eigenstate(ModelSpec.squeezed(1, 0.0), Q14, 1)
    assert s.E == pytest.approx(2.0) and s.roots == pytest.approx([0.0]) and s.prefactor_rate == 0
    assert eval_wavefunction(s, 2.0) == pytest.approx(2.0)


def test_wavefunction_examples():
    st_ = build_eigenstate(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(HALF), 1)
    assert eval_wavefunction(st_, 0.5).real == pytest.approx(math.exp(-1 / 6) * 0.875, abs=1e-6)
    assert abs(eval_wavefunction(st_, st_.roots[0])) == 0
    free = build_eigenstate(ModelSpec.two_mode(1, 0.0), SectorLabel.kappa(HALF), 3)
    assert eval_wavefunction(free, 2.0) == pytest.approx(8.0)
    # large |z| does not overflow
    big = eval_wavefunction(st_, -2000.0)
    assert np.isfinite(abs(big)) or abs(big) == math.inf


def test_ode_residual_examples():
    pts = [-2, -0.5, 0.7, 1.3, 3]
    for model, sector in [(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(HALF)),
                          (ModelSpec.squeezed(1, 0.3), Q14),
                          (ModelSpec.displaced(1, 0.2), SectorLabel.q(1, 1))]:
        st_ = build_eigenstate(model, sector, 2)
        assert ode_residual(st_, pts) < 1e-10
        assert ode_residual(st_, pts, E=st_.E + 0.1) > 1e-3
    zero = build_eigenstate(ModelSpec.displaced(1, 0.0), SectorLabel.q(1, 1), 0)
    assert ode_residual(zero, pts) == 0


def test_norm_examples():
    st_ = build_eigenstate(ModelSpec.displaced(1, 0.2), SectorLabel.q(1, 1), 0)
    n = bargmann_norm_sq(st_.taylor(100), SectorLabel.q(1, 1), 100)
    assert n.converged and n.value == pytest.approx(math.exp(0.04), rel=1e-12)
    assert n.value == pytest.approx(1.040811, abs=1e-6)
    one = build_eigenstate(ModelSpec.two_mode(1, 0.0), SectorLabel.kappa(HALF), 0)
    assert bargmann_norm_sq(one.taylor(30), SectorLabel.kappa(HALF), 30).value == pytest.approx(1.0)
    z2 = build_eigenstate(ModelSpec.squeezed(1, 0.0), Q14, 2)
    r = bargmann_norm_sq(z2.taylor(30), Q14, 30)
    assert r.value == pytest.approx(24.0) and r.converged
    # plain coefficient arrays are accepted too
    assert bargmann_norm_sq(np.array([1.0, 0.0, 0.0]), Q14, 2).value == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bargmann_norm_sq(np.array([1.0]), Q14, 5)


def test_taylor_matches_direct_expansion():
    st_ = build_eigenstate(ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(1), 3)
    logs, signs = st_.taylor(25)
    c = signs * np.exp(logs)
    # psi(z) summed from its series agrees with the closed form at a few points
    for z in (0.3, -0.8, 1.1):
        series = sum(c[n] * z ** n for n in range(26))
        assert series == pytest.approx(eval_wavefunction(st_, z).real, rel=1e-10)


def test_explicit_root_formulas():
    for model, sector in [(ModelSpec.two_mode(1, 0.9), SectorLabel.kappa(Fraction(3, 2))),
                          (ModelSpec.squeezed(1, 0.45), SectorLabel.q(Fraction(3, 4), 2))]:
        for M in (1, 2):
            z, _ = solve_bethe(bethe_system(model, sector, M))
            assert z == pytest.approx(explicit_roots(model, sector, M), abs=1e-10)


def _laguerre_for(model, sector, M):
    s = bethe_system(model, sector, M)
    return laguerre_initial_roots(M, s.laguerre_alpha, s.laguerre_scale)


@pytest.mark.parametrize("model,sectors", [
    (ModelSpec.two_mode(1, 0.6), [SectorLabel.kappa(HALF), SectorLabel.kappa(2)]),
    (ModelSpec.squeezed(1, 0.3), sector_labels(ModelSpec.squeezed(1, 0.3))),
])
def test_bethe_matches_laguerre_and_oracle(model, sectors):
    for sector in sectors:
        lam = eigenvalues_tridiagonal(build_hamiltonian(model, sector, 300), 6)
        for M in range(1, 6):
            z, _ = solve_bethe(bethe_system(model, sector, M))
            assert z == pytest.approx(_laguerre_for(model, sector, M), abs=1e-10)
            assert np.all(z < 0) and np.all(np.diff(z) > 0)
            st_ = build_eigenstate(model, sector, M)
            assert st_.E == exact_energy(model, sector, M).E
            assert abs(st_.E - lam[M]) < 1e-8


def test_roots_locally_unique():
    model, sector = ModelSpec.two_mode(1, 0.6), SectorLabel.kappa(1)
    s = bethe_system(model, sector, 4)
    z0, _ = solve_bethe(s)
    rng = np.random.default_rng(1)
    z1, _ = solve_bethe(s, start=z0 * (1 + 1e-3 * rng.standard_normal(4)))
    assert z1 == pytest.approx(z0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(g=st.floats(0.05, 0.9), kap=st.integers(1, 6), M=st.integers(0, 6))
def test_two_mode_states_property(g, kap, M):
    model, sector = ModelSpec.two_mode(1.0, g), SectorLabel.kappa(Fraction(kap, 2))
    st_ = build_eigenstate(model, sector, M)
    pts = np.random.default_rng(M).uniform(-3, 3, 16)
    assert ode_residual(st_, pts) < 1e-10
    n = bargmann_norm_sq(st_.taylor(600), sector, 600)
    assert n.converged and np.isfinite(n.value)


@settings(max_examples=40, deadline=None)
@given(g=st.floats(0.02, 0.45), j=st.integers(0, 1), M=st.integers(0, 6))
def test_squeezed_states_property(g, j, M):
    model = ModelSpec.squeezed(1.0, g)
    sector = sector_labels(model)[j]
    st_ = build_eigenstate(model, sector, M)
    pts = np.random.default_rng(M).uniform(-3, 3, 16)
    assert ode_residual(st_, pts) < 1e-10
    n = bargmann_norm_sq(st_.taylor(600), sector, 600)
    assert n.converged and np.isfinite(n.value)
