import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bargspec.core import (
    DomainError,
    ModelKind,
    ModelSpec,
    SectorLabel,
    exact_energy,
    full_spectrum,
    sector_labels,
    stability_factor,
)


def test_model_spec_fixes_k():
    assert ModelSpec.displaced(1, 0.2).k == 1
    assert ModelSpec.squeezed(1, 0.3).k == 2
    assert ModelSpec.two_mode(1, 0.6).k is None
    assert ModelSpec("two_mode", 1, 0.1).kind is ModelKind.TWO_MODE


@pytest.mark.parametrize("kwargs", [
    dict(kind="displaced", omega=0.0),
    dict(kind="displaced", omega=-1.0),
    dict(kind="squeezed", k=3),
    dict(kind="k_harmonic"),
    dict(kind="k_harmonic", k=0),
    dict(kind="two_mode", k=2),
    dict(kind="displaced", g=math.inf),
])
def test_model_spec_rejects(kwargs):
    with pytest.raises(DomainError):
        ModelSpec(**kwargs)


def test_sector_labels():
    assert [s.value for s in sector_labels(ModelSpec.squeezed(1, 0.3))] == [Fraction(1, 4), Fraction(3, 4)]
    assert [s.value for s in sector_labels(ModelSpec.k_harmonic(3, 1, 0.3))] == [Fraction(1, 9), Fraction(4, 9), Fraction(7, 9)]
    assert [s.value for s in sector_labels(ModelSpec.displaced(1, 0.2))] == [1]
    kap = sector_labels(ModelSpec.two_mode(1, 0.5))
    assert len(kap) == 8 and kap[0].value == Fraction(1, 2) and kap[-1].value == 4
    assert len(sector_labels(ModelSpec.two_mode(1, 0.5), 3)) == 3


def test_sector_offsets():
    assert SectorLabel.q(Fraction(1, 4), 2).offset == 0
    assert SectorLabel.q(Fraction(3, 4), 2).offset == 1
    assert SectorLabel.q(Fraction(7, 9), 3).offset == 2
    assert SectorLabel.kappa(Fraction(3, 2)).offset == 2


@pytest.mark.parametrize("make", [
    lambda: SectorLabel.kappa(0),
    lambda: SectorLabel.kappa(Fraction(1, 3)),
    lambda: SectorLabel.q(Fraction(2, 3), 2),
    lambda: SectorLabel.q(Fraction(1, 4), None),
    lambda: SectorLabel("x", 1),
])
def test_bad_sectors(make):
    with pytest.raises(DomainError):
        make()


def test_stability_factor():
    assert stability_factor(ModelSpec.two_mode(1, 0.6)) == pytest.approx(0.8)
    assert stability_factor(ModelSpec.squeezed(1, 0.3)) == pytest.approx(0.8)
    with pytest.raises(DomainError, match="outside unitary regime"):
        stability_factor(ModelSpec.two_mode(1, 1.5))
    with pytest.raises(DomainError, match="outside unitary regime"):
        stability_factor(ModelSpec.squeezed(1, 0.5))
    with pytest.raises(DomainError):
        stability_factor(ModelSpec.displaced(1, 0.2))


def test_exact_energy_examples():
    sq = ModelSpec.squeezed(1, 0.3)
    assert exact_energy(sq, SectorLabel.q(Fraction(1, 4), 2), 0).E == pytest.approx(-0.1)
    assert exact_energy(sq, SectorLabel.q(Fraction(3, 4), 2), 0).E == pytest.approx(0.7)
    tm = ModelSpec.two_mode(1, 0.6)
    assert [exact_energy(tm, SectorLabel.kappa(Fraction(1, 2)), M).E for M in range(3)] == pytest.approx([-0.2, 1.4, 3.0])
    d = ModelSpec.displaced(1, 0.2)
    assert exact_energy(d, SectorLabel.q(1, 1), 0).E == pytest.approx(-0.04)
    # k_harmonic at k = 1, 2 uses the same closed forms
    assert exact_energy(ModelSpec.k_harmonic(2, 1, 0.3), SectorLabel.q(Fraction(1, 4), 2), 1).E == pytest.approx(1.5)


def test_exact_energy_errors():
    with pytest.raises(DomainError):
        exact_energy(ModelSpec.squeezed(1, 0.3), SectorLabel.kappa(Fraction(1, 2)), 0)
    with pytest.raises(DomainError):
        exact_energy(ModelSpec.squeezed(1, 0.3), SectorLabel.q(Fraction(1, 4), 2), -1)
    with pytest.raises(DomainError):
        exact_energy(ModelSpec.k_harmonic(3, 1, 0.3), SectorLabel.q(Fraction(1, 9), 3), 0)


def test_full_spectrum_merges_sectors():
    levels = full_spectrum(ModelSpec.squeezed(1, 0.3), 4)
    assert [lv.E for lv in levels] == pytest.approx([-0.1, 0.7, 1.5, 2.3])
    assert [str(lv.sector.value) for lv in levels] == ["1/4", "3/4", "1/4", "3/4"]
    with pytest.raises(DomainError):
        full_spectrum(ModelSpec.squeezed(1, 0.3), 0)


def test_two_mode_zero_coupling_is_free_spectrum():
    # g = 0: E = -w + 2 w (M + kappa)
    lv = full_spectrum(ModelSpec.two_mode(1, 0.0), 5)
    assert [x.E for x in lv] == pytest.approx([0.0, 1.0, 2.0, 2.0, 3.0])


@settings(max_examples=50, deadline=None)
@given(g=st.floats(-0.95, 0.95), M=st.integers(0, 20), kap=st.integers(1, 10))
def test_two_mode_level_spacing(g, M, kap):
    m = ModelSpec.two_mode(1.0, g)
    s = SectorLabel.kappa(Fraction(kap, 2))
    lam = stability_factor(m)
    e0 = exact_energy(m, s, M).E
    e1 = exact_energy(m, s, M + 1).E
    assert e1 - e0 == pytest.approx(2 * lam, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(g=st.floats(-0.49, 0.49), levels=st.integers(1, 12))
def test_full_spectrum_sorted(g, levels):
    out = [lv.E for lv in full_spectrum(ModelSpec.squeezed(1.0, g), levels)]
    assert out == sorted(out) and len(out) == levels
