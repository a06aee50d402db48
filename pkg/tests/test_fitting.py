import json

import numpy as np
import pytest
from scipy import optimize

from vortexshaping.errors import FitDiverged, SingularJacobian
from vortexshaping.fitting import least_squares, numeric_jacobian


def expdecay(x, p):
    return p[0] * np.exp(-p[1] * x) + p[2]


def test_linear_model_normal_equations(rng):
    x = np.linspace(-1, 2, 40)
    y = 1.5 - 0.7 * x + 0.3 * x**2 + rng.normal(scale=0.05, size=x.size)
    fit = least_squares(lambda x, p: p[0] + p[1] * x + p[2] * x**2, x, y, [0, 0, 0])
    A = np.stack([np.ones_like(x), x, x**2], 1)
    ref = np.linalg.solve(A.T @ A, A.T @ y)
    assert np.allclose(fit.params, ref, rtol=1e-10, atol=1e-10)
    assert fit.converged


def test_rosenbrock_valley():
    # residuals (10 (p1 - p0^2), 1 - p0)
    fit = least_squares(lambda x, p: np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]]), None, np.zeros(2), [-1.2, 1.0])
    assert np.allclose(fit.params, [1, 1], atol=1e-8)
    assert fit.converged


def test_matches_scipy_oracle(rng):
    x = np.linspace(0, 4, 60)
    y = expdecay(x, [2.0, 1.3, 0.2]) + rng.normal(scale=0.02, size=x.size)
    w = np.full(x.size, 1 / 0.02)
    fit = least_squares(expdecay, x, y, [1, 1, 0], weights=w)
    ref = optimize.least_squares(lambda p: w * (y - expdecay(x, p)), [1, 1, 0], method="lm", xtol=1e-15,
                                 ftol=1e-15, gtol=1e-15)
    assert np.allclose(fit.params, ref.x, rtol=1e-7)
    J = ref.jac
    cov = np.linalg.inv(J.T @ J) * (2 * ref.cost) / (x.size - 3)
    assert np.allclose(fit.covariance, cov, rtol=1e-4)


def test_history_monotone(rng):
    x = np.linspace(0, 4, 60)
    y = expdecay(x, [2.0, 1.3, 0.2]) + rng.normal(scale=0.02, size=x.size)
    fit = least_squares(expdecay, x, y, [5, 0.1, -1])
    assert all(b <= a for a, b in zip(fit.history, fit.history[1:]))
    assert fit.residual_norm == pytest.approx(np.sqrt(fit.history[-1]))


def test_numeric_jacobian_vs_analytic():
    x = np.linspace(0, 3, 25)
    p = np.array([1.7, 0.8, -0.4])
    J = numeric_jacobian(expdecay, x, p)
    e = np.exp(-p[1] * x)
    Ja = np.stack([e, -p[0] * x * e, np.ones_like(x)], 1)
    assert np.allclose(J, Ja, rtol=1e-6, atol=1e-9)


def test_user_jacobian_used():
    x = np.linspace(0, 3, 25)
    y = expdecay(x, [1.0, 2.0, 0.5])

    def jac(x, p):
        e = np.exp(-p[1] * x)
        return np.stack([e, -p[0] * x * e, np.ones_like(x)], 1)

    fit = least_squares(expdecay, x, y, [0.5, 1.0, 0.0], jac=jac)
    assert np.allclose(fit.params, [1, 2, 0.5], rtol=1e-8)


def test_errors():
    x = np.linspace(0, 1, 10)
    with pytest.raises(SingularJacobian):
        least_squares(lambda x, p: (p[0] + p[1]) * x, x, x, [1.0, 1.0])
    with pytest.raises(FitDiverged):
        least_squares(lambda x, p: p[0] * x, x, np.r_[x[:-1], np.nan], [1.0])
    with pytest.raises(FitDiverged):
        least_squares(expdecay, x, expdecay(x, [1, 2, 3]), [10, 0.01, 0], max_iter=1)


def test_report_json():
    x = np.linspace(0, 1, 10)
    fit = least_squares(lambda x, p: p[0] * x, x, 2 * x, [1.0])
    d = json.loads(fit.to_json())
    assert set(d) == {"params", "stderr", "residual_norm", "n_iter", "converged"}
    assert d["params"][0] == pytest.approx(2)
