import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from vortexshaping.jones import (GaussianBeam, VortexRetarder, apply_polarizer, apply_retarder, gaussian_field,
                                 jones_vector, polarizer_jones, retarder_jones)
from vortexshaping.propagation import intensity

angles = st.floats(-10.0, 10.0, allow_nan=False)
components = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def test_beam_validation():
    with pytest.raises(ValueError):
        GaussianBeam(0.0, 780e-9)
    with pytest.raises(ValueError):
        GaussianBeam(1e-3, -1.0)
    with pytest.raises(ValueError):
        GaussianBeam(1e-3, 780e-9, power=-1.0)
    with pytest.raises(ValueError):
        VortexRetarder(0)


def test_rayleigh_length(beam):
    assert beam.z0 == pytest.approx(np.pi * beam.w0**2 / beam.wavelength)


def test_gaussian_field_at_waist_centre(beam):
    assert gaussian_field(beam, 0.0, 0.0) == beam.amplitude


def test_gaussian_field_at_rayleigh_length(beam):
    e = gaussian_field(beam, 0.0, beam.z0)
    assert abs(e) == pytest.approx(beam.amplitude / np.sqrt(2), rel=1e-14)
    phase = np.angle(e * np.exp(-1j * (beam.k * beam.z0 - np.pi / 4)))
    assert abs(phase) < 1e-6


def test_gaussian_power_normalisation(beam):
    p, _ = quad(lambda r: abs(gaussian_field(beam, r, 0.3 * beam.z0)) ** 2 * 2 * np.pi * r, 0, 10 * beam.w0,
                epsabs=0, epsrel=1e-12)
    assert p == pytest.approx(beam.power, rel=1e-8)


def test_gaussian_field_finite_at_waist(beam):
    assert np.all(np.isfinite(gaussian_field(beam, np.linspace(0, 3e-3, 50), 0.0)))


def test_retarder_examples():
    assert np.allclose(retarder_jones(0.0), [[1, 0], [0, -1]])
    assert np.allclose(retarder_jones(np.pi / 4), [[0, 1], [1, 0]], atol=1e-15)


def test_vortex_retarder_examples():
    vr = VortexRetarder(1)
    assert np.allclose(apply_retarder(vr, 0.0, [1, 0]), [1, 0])
    assert np.allclose(apply_retarder(vr, np.pi / 2, [1, 0]), [0, 1], atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_vortex_retarder_winding(m):
    phi = np.linspace(0, 2 * np.pi, 37)
    out = apply_retarder(VortexRetarder(m), phi, np.array([1.0, 0.0]))
    assert np.allclose(out, np.stack([np.cos(m * phi), np.sin(m * phi)], -1), atol=1e-14)


def test_polarizer_examples():
    v = apply_polarizer(0.0, [2 + 1j, 3 - 1j])
    assert np.allclose(v, [2 + 1j, 0])
    phi = np.linspace(0, 2 * np.pi, 25)
    radial = jones_vector(np.cos(phi), np.sin(phi))
    assert np.allclose(intensity(apply_polarizer(0.0, radial)), np.cos(phi) ** 2)


def test_dense_theta_grid_involutory_unimodular():
    theta = np.linspace(-np.pi, np.pi, 10001)
    M = retarder_jones(theta)
    assert np.abs(M @ M - np.eye(2)).max() < 1e-14
    assert np.abs(np.linalg.det(M) + 1).max() < 1e-14


@given(angles)
def test_retarder_involution_property(theta):
    M = retarder_jones(theta)
    assert np.allclose(M @ M, np.eye(2), atol=1e-13)
    assert np.linalg.det(M) == pytest.approx(-1, abs=1e-13)


@given(angles, components, components, st.integers(1, 5))
def test_retarder_preserves_norm(phi, ex, ey, m):
    v = jones_vector(ex, ey)
    out = apply_retarder(VortexRetarder(m), phi, v)
    assert intensity(out) == pytest.approx(intensity(v), rel=1e-12, abs=1e-300)


@given(angles)
def test_polarizer_is_projector(axis):
    P = polarizer_jones(axis)
    assert np.allclose(P @ P, P, atol=1e-14)
    assert np.linalg.det(P) == pytest.approx(0, abs=1e-14)
