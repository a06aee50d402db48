from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Rational
from sympy.physics.wigner import wigner_3j as sym_3j, wigner_6j as sym_6j

from vortexshaping.atomic import (PumpScheme, SublevelPopulations, average_dipole, dipole_range, effective_isat,
                                  rate_matrix, saturation_intensity, steady_state_populations, strength,
                                  transition_strengths)
from vortexshaping.constants import MW_PER_CM2
from vortexshaping.errors import InvalidQuantumNumbers, NoSteadyState, ZeroCoupling
from vortexshaping.wigner import wigner_3j, wigner_3j_sq, wigner_6j, wigner_6j_sq

HALF = [Fraction(n, 2) for n in range(0, 7)]


def _r(x):
    return Rational(x.numerator, x.denominator)


@pytest.mark.parametrize("j1", HALF[:5])
@pytest.mark.parametrize("j2", [Fraction(1), Fraction(1, 2)])
def test_3j_matches_sympy(j1, j2):
    for j3 in HALF:
        for m1 in np.arange(-j1, j1 + 1):
            for m2 in np.arange(-j2, j2 + 1):
                m1f, m2f = Fraction(m1), Fraction(m2)
                m3 = -m1f - m2f
                if abs(m3) > j3 or (j1 + j2 + j3).denominator != 1:
                    continue
                ref = sym_3j(_r(j1), _r(j2), _r(j3), _r(m1f), _r(m2f), _r(m3))
                assert wigner_3j_sq(j1, j2, j3, m1f, m2f, m3) == Fraction(str(ref**2))
                assert wigner_3j(j1, j2, j3, m1f, m2f, m3) == pytest.approx(float(ref), abs=1e-14)


def test_6j_matches_sympy():
    J, Jp, I = Fraction(1, 2), Fraction(3, 2), Fraction(3, 2)
    for F in (1, 2):
        for Fp in (0, 1, 2, 3):
            ref = sym_6j(_r(J), _r(Jp), 1, Fp, F, _r(I))
            assert wigner_6j_sq(J, Jp, 1, Fp, F, I) == Fraction(str(ref**2))
            assert wigner_6j(J, Jp, 1, Fp, F, I) == pytest.approx(float(ref), abs=1e-14)


def test_textbook_strengths():
    # tabulated D2 relative strengths of 87Rb (cycling transition = 1/2)
    assert [strength(2, m, 3, m + 1) for m in range(-2, 3)] == [Fraction(1, 30), Fraction(1, 10), Fraction(1, 5),
                                                              Fraction(1, 3), Fraction(1, 2)]
    assert [strength(2, m, 3, m) for m in range(-2, 3)] == [Fraction(1, 6), Fraction(4, 15), Fraction(3, 10),
                                                          Fraction(4, 15), Fraction(1, 6)]
    assert [strength(2, m, 2, m + 1) for m in range(-2, 2)] == [Fraction(1, 12), Fraction(1, 8), Fraction(1, 8),
                                                              Fraction(1, 12)]
    assert strength(2, 0, 2, 0) == 0


@pytest.mark.parametrize("F", [1, 2])
def test_sum_rule_exact(F):
    for m in range(-F, F + 1):
        total = sum(strength(F, m, Fp, m + q) for Fp in (0, 1, 2, 3) for q in (-1, 0, 1))
        assert total == 1


@pytest.mark.parametrize("F,Fp", [(2, 3), (2, 2), (2, 1), (1, 2), (1, 0)])
def test_mirror_symmetry(F, Fp):
    t = transition_strengths(F, Fp)
    for (m, q), s in t.strengths.items():
        assert t.strengths[(-m, -q)] == s


def test_invalid_quantum_numbers():
    with pytest.raises(InvalidQuantumNumbers):
        transition_strengths(2, 0)
    with pytest.raises(InvalidQuantumNumbers):
        transition_strengths(3, 3)


@pytest.mark.parametrize("Fp", [3, 2])
def test_steady_state_is_fixed_point(Fp):
    G = rate_matrix(2, Fp, PumpScheme())
    p = np.array(steady_state_populations(2, Fp).p)
    assert np.abs(G @ p).max() < 1e-10
    assert p.sum() == pytest.approx(1, abs=1e-12)
    assert np.allclose(p, p[::-1], atol=1e-12)


def test_rate_matrix_conserves_population():
    for Fp in (1, 2, 3):
        G = rate_matrix(2, Fp, PumpScheme((0.3, 0.2, 0.5)))
        assert np.abs(G.sum(axis=0)).max() < 1e-14


def test_steady_state_weak_limit_values():
    # frozen from the exact null space of the weak-excitation generator
    p3 = steady_state_populations(2, 3).p
    assert p3[:3] == pytest.approx((0.36495791889824, 0.09181331293037, 0.08645753634277), abs=1e-12)
    p2 = steady_state_populations(2, 2).p
    assert p2[:3] == pytest.approx((3 / 11, 3 / 22, 2 / 11), abs=1e-12)


def test_saturated_steady_state_tends_to_weak_limit():
    weak = np.array(steady_state_populations(2, 3).p)
    sat = np.array(steady_state_populations(2, 3, saturation=1e-6).p)
    assert np.abs(weak - sat).max() < 1e-5


def test_uncoupled_scheme_raises():
    # pure pi light cannot drive F=2 -> F'=2 from m=0, but it does couple other
    # sublevels; no light at all is the truly uncoupled case
    with pytest.raises((NoSteadyState, ValueError)):
        steady_state_populations(2, 3, PumpScheme((0.0, 0.0, 0.0)))


@pytest.mark.parametrize("mode,Fp,expected", [
    ("uniform", 2, 10.02),
    ("stretched", 2, 20.04),
    ("steady_state", 2, 11.304615384615385),
    ("steady_state", 3, 3.3171580547112454),
])
def test_isat_values(mode, Fp, expected):
    assert effective_isat(2, Fp, pops_mode=mode) / MW_PER_CM2 == pytest.approx(expected, rel=1e-12)


def test_cycling_isat():
    v = effective_isat(2, 3, PumpScheme((1.0, 0.0, 0.0)), pops_mode="stretched")
    assert v / MW_PER_CM2 == pytest.approx(1.67, rel=1e-12)


def test_saturation_intensity_scaling():
    assert saturation_intensity(0.25) == pytest.approx(2 * saturation_intensity(0.5))
    with pytest.raises(ZeroCoupling):
        saturation_intensity(0.0)


def test_dipole_range_brackets_every_distribution():
    (dmin, _), (dmax, pmax) = dipole_range(2, 2)
    table = transition_strengths(2, 2)
    assert dmin == pytest.approx(1 / 24)
    assert dmax == pytest.approx(1 / 8)
    assert pmax.p == pytest.approx((0, 0, 1, 0, 0))
    lo, hi = saturation_intensity(dmax), saturation_intensity(dmin)
    for mode in ("uniform", "stretched", "steady_state"):
        assert lo - 1e-9 <= effective_isat(2, 2, pops_mode=mode) <= hi + 1e-9
    assert lo / MW_PER_CM2 == pytest.approx(6.68)
    assert hi / MW_PER_CM2 == pytest.approx(20.04)
    assert average_dipole(table, SublevelPopulations.uniform(2), PumpScheme()) == pytest.approx(1 / 12)


@given(st.lists(st.floats(0.0, 1.0), min_size=5, max_size=5).filter(lambda v: sum(v) > 1e-3))
def test_isat_within_range_property(weights):
    p = np.array(weights) / sum(weights)
    (dmin, _), (dmax, _) = dipole_range(2, 2)
    d = average_dipole(transition_strengths(2, 2), SublevelPopulations(2, tuple(p)), PumpScheme())
    assert dmin - 1e-12 <= d <= dmax + 1e-12
