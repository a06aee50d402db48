"""Levenberg-Marquardt nonlinear least squares.

Minimises Σ wᵢ²·(yᵢ − f(xᵢ; p))² for a model ``f(x, p)``. The Jacobian is
taken from the caller or estimated by central differences. Damping follows
Marquardt's scaled form (JᵀJ + λ·diag JᵀJ)·δ = Jᵀr with λ starting at 1e-3,
multiplied by 10 after a rejected step and divided by 10 after an accepted
one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import FitDiverged, SingularJacobian

__all__ = ["FitResult", "least_squares", "numeric_jacobian"]

LAMBDA0 = 1e-3
RTOL_COST = 1e-10
GTOL = 1e-12
LAMBDA_MAX = 1e16
COND_LIMIT = 1e12


@dataclass
class FitResult:
    """Outcome of a least-squares fit.

    ``covariance`` is s²·(JᵀJ)⁻¹ with s² the reduced chi-square (1 when
    there are no degrees of freedom left). ``history`` holds the cost
    after the initial guess and after every accepted step.
    """

    params: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    n_iter: int
    converged: bool
    gradient_norm: float = np.nan
    ill_conditioned: bool = False
    history: list = field(default_factory=list)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.abs(np.diag(self.covariance)))

    def to_dict(self) -> dict:
        return {
            "params": [float(v) for v in self.params],
            "stderr": [float(v) for v in self.stderr],
            "residual_norm": float(self.residual_norm),
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def numeric_jacobian(model, x, p, rel_step=None):
    """Central-difference Jacobian ∂f(x, p)/∂p, shape (len(f), len(p))."""
    p = np.asarray(p, dtype=float)
    if rel_step is None:
        rel_step = np.finfo(float).eps ** (1 / 3)
    J = []
    for j in range(p.size):
        h = rel_step * max(abs(p[j]), 1.0)
        up, dn = p.copy(), p.copy()
        up[j] += h
        dn[j] -= h
        J.append((np.asarray(model(x, up), dtype=float) - np.asarray(model(x, dn), dtype=float)) / (2 * h))
    return np.stack(J, axis=-1)


def least_squares(model, x, y, p0, weights=None, jac=None, max_iter=500) -> FitResult:
    """Fit ``model(x, p)`` to ``y`` starting from ``p0``.

    Parameters
    ----------
    model : callable
        ``model(x, p)`` returning predictions with the shape of ``y``.
    x, y : array_like
        Independent variable (passed through untouched) and data.
    p0 : array_like
        Initial parameters.
    weights : array_like, optional
        Per-point weights wᵢ (1/σᵢ for Gaussian errors).
    jac : callable, optional
        ``jac(x, p)`` returning ∂model/∂p; central differences otherwise.

    Raises
    ------
    SingularJacobian
        If the Jacobian at the starting point is rank deficient.
    FitDiverged
        If the data or the model are non-finite, or no convergence within
        ``max_iter`` iterations.
    """
    y = np.asarray(y, dtype=float).ravel()
    p = np.array(p0, dtype=float).ravel()
    w = np.ones_like(y) if weights is None else np.broadcast_to(np.asarray(weights, dtype=float), y.shape).ravel()
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(p))):
        raise FitDiverged("non-finite data or initial guess")
    jac_fn = jac if jac is not None else (lambda xx, pp: numeric_jacobian(model, xx, pp))

    def resid(pp):
        return w * (y - np.asarray(model(x, pp), dtype=float).ravel())

    def jacobian(pp):
        return w[:, None] * np.asarray(jac_fn(x, pp), dtype=float).reshape(y.size, p.size)

    r = resid(p)
    cost = float(r @ r)
    if not np.isfinite(cost):
        raise FitDiverged("model is not finite at the initial guess")
    J = jacobian(p)
    if np.linalg.matrix_rank(J) < p.size:
        raise SingularJacobian("Jacobian is rank deficient at the initial guess")

    lam = LAMBDA0
    history = [cost]
    converged = False
    n_iter = 0
    g = J.T @ r
    for n_iter in range(1, max_iter + 1):
        if np.max(np.abs(g)) < GTOL:
            converged = True
            break
        A = J.T @ J
        dA = np.diag(A).copy()
        dA[dA <= 0] = 1.0
        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                step = np.linalg.solve(A + lam * np.diag(dA), g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            p_try = p + step
            r_try = resid(p_try)
            cost_try = float(r_try @ r_try)
            if np.isfinite(cost_try) and cost_try <= cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            # no downhill step even with huge damping: we are at the minimum
            # to within rounding
            converged = True
            break
        rel_change = (cost - cost_try) / cost if cost > 0 else 0.0
        p, r, cost = p_try, r_try, cost_try
        history.append(cost)
        lam = max(lam / 10, 1e-12)
        J = jacobian(p)
        g = J.T @ r
        if rel_change < RTOL_COST or cost == 0.0:
            converged = True
            break
    else:
        raise FitDiverged(f"no convergence within {max_iter} iterations")

    A = J.T @ J
    cond = np.linalg.cond(A)
    dof = y.size - p.size
    s2 = cost / dof if dof > 0 else 1.0
    try:
        cov = s2 * np.linalg.inv(A)
    except np.linalg.LinAlgError:
        cov = np.full((p.size, p.size), np.inf)
        cond = np.inf
    return FitResult(p, cov, float(np.sqrt(cost)), n_iter, converged, float(np.max(np.abs(g))),
                     bool(not np.isfinite(cond) or cond > COND_LIMIT), history)
