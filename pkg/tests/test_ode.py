import numpy as np
import pytest
from scipy.integrate import solve_ivp

from vortexshaping.errors import IntegratorFailure
from vortexshaping.ode import integrate_rows


def oscillator(t, y, rows):
    return np.stack([y[:, 1], -y[:, 0]], axis=1)


def test_harmonic_oscillator_closed_form():
    y0 = np.array([[1.0, 0.0], [0.0, 2.0], [0.5, -0.5]])
    y, stats = integrate_rows(oscillator, 0.0, y0, 10.0, rtol=1e-10, atol=1e-12)
    t = 10.0
    ref = np.stack([y0[:, 0] * np.cos(t) + y0[:, 1] * np.sin(t), -y0[:, 0] * np.sin(t) + y0[:, 1] * np.cos(t)], 1)
    assert np.abs(y - ref).max() < 1e-8
    assert np.all(stats["n_steps"] > 0)


def test_matches_dop853_oracle_nonlinear():
    # each row has its own stiffness-free nonlinear dynamics (van der Pol, mu varies by row)
    mu = np.array([0.2, 1.0, 3.0])

    def vdp(t, y, rows):
        m = mu[rows]
        return np.stack([y[:, 1], m * (1 - y[:, 0] ** 2) * y[:, 1] - y[:, 0]], axis=1)

    y0 = np.tile([2.0, 0.0], (3, 1))
    y, _ = integrate_rows(vdp, 0.0, y0, 5.0, rtol=1e-10, atol=1e-12)
    for i, m in enumerate(mu):
        ref = solve_ivp(lambda t, v: [v[1], m * (1 - v[0] ** 2) * v[1] - v[0]], (0, 5.0), y0[i], method="DOP853",
                        rtol=1e-12, atol=1e-14).y[:, -1]
        assert np.allclose(y[i], ref, rtol=1e-7, atol=1e-8)


def test_rows_are_independent():
    def decay(t, y, rows):
        return -(rows + 1.0)[:, None] * y

    y0 = np.ones((4, 1))
    full, _ = integrate_rows(decay, 0.0, y0, 1.0)
    single, _ = integrate_rows(lambda t, y, r: decay(t, y, r + 3), 0.0, y0[3:], 1.0)
    assert full[3, 0] == single[0, 0]
    assert np.allclose(full[:, 0], np.exp(-np.arange(1, 5)), rtol=1e-7)


def test_trivial_and_error_cases():
    y0 = np.ones((2, 1))
    y, _ = integrate_rows(lambda t, y, r: y, 1.0, y0, 1.0)
    assert np.array_equal(y, y0)
    with pytest.raises(ValueError):
        integrate_rows(lambda t, y, r: y, 1.0, y0, 0.0)
    with pytest.raises(IntegratorFailure):
        integrate_rows(lambda t, y, r: y, 0.0, y0, 100.0, max_steps=3)
    with pytest.raises(IntegratorFailure):
        # finite-time blow-up at t = 1
        integrate_rows(lambda t, y, r: y**2, 0.0, y0, 2.0)
