"""Vectorised adaptive Dormand-Prince RK5(4) integrator.

Integrates many independent systems (one per row of the state array) at
once. Each row carries its own step size, so a few stiff rows do not slow
down the rest; rows that reach the end time drop out of the active set.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegratorFailure

__all__ = ["integrate_rows"]

# Dormand & Prince (1980) coefficients
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


def _initial_step(fun, t0, y0, f0, t_end, rtol, atol):
    """Per-row starting step (Hairer, Nørsett & Wanner, II.4)."""
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2, axis=1))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2, axis=1))
    h0 = np.where((d0 < 1e-5) | (d1 < 1e-5), 1e-6, 0.01 * d0 / np.maximum(d1, 1e-300))
    span = t_end - t0
    h0 = np.minimum(h0, span)
    y1 = y0 + h0[:, None] * f0
    f1 = fun(t0 + h0, y1, np.arange(len(y0)))
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2, axis=1)) / np.maximum(h0, 1e-300)
    big = np.maximum(d1, d2)
    h1 = np.where(big <= 1e-15, np.maximum(1e-6, h0 * 1e-3), (0.01 / np.maximum(big, 1e-300)) ** 0.2)
    return np.minimum(np.minimum(100 * h0, h1), span)


def integrate_rows(fun, t0, y0, t_end, rtol=1e-8, atol=1e-10, max_steps=100_000):
    """Integrate dy/dt = fun(t, y, rows) for every row of ``y0`` from t0 to t_end.

    Parameters
    ----------
    fun : callable
        ``fun(t, y, rows)`` with ``t`` of shape (k,), ``y`` of shape (k, d)
        and ``rows`` the indices (into ``y0``) of the rows being evaluated;
        returns (k, d) derivatives.
    t0, t_end : float
        Common start and end time.
    y0 : (n, d) array
    rtol : float
    atol : float or (d,) array
        Per-component absolute tolerance.

    Returns
    -------
    y : (n, d) array at ``t_end``
    stats : dict with ``n_steps`` (accepted, per row) and ``n_rejected``.
    """
    y = np.array(y0, dtype=float, copy=True)
    n, d = y.shape
    atol = np.broadcast_to(np.asarray(atol, dtype=float), (d,))
    n_acc = np.zeros(n, dtype=int)
    n_rej = np.zeros(n, dtype=int)
    if n == 0 or t_end == t0:
        return y, {"n_steps": n_acc, "n_rejected": n_rej}
    if t_end < t0:
        raise ValueError("t_end must not precede t0")

    t = np.full(n, float(t0))
    rows = np.arange(n)
    f = fun(t, y, rows)
    h = _initial_step(fun, t, y, f, t_end, rtol, atol)
    active = np.ones(n, dtype=bool)

    for _ in range(max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ti, yi, fi = t[idx], y[idx], f[idx]
        hi = np.minimum(h[idx], t_end - ti)
        if np.any(hi <= 1e-14 * np.maximum(np.abs(ti), abs(t_end - t0))):
            bad = idx[hi <= 1e-14 * np.maximum(np.abs(ti), abs(t_end - t0))]
            raise IntegratorFailure(f"step size underflow for {bad.size} row(s), e.g. row {bad[0]} at t={t[bad[0]]:.6g}")
        K = [fi]
        for s in range(1, 7):
            ys = yi + hi[:, None] * sum(a * K[j] for j, a in enumerate(_A[s]) if a != 0)
            K.append(fun(ti + _C[s] * hi, ys, idx))
        y_new = yi + hi[:, None] * sum(b * K[j] for j, b in enumerate(_B) if b != 0)
        err = hi[:, None] * sum(e * K[j] for j, e in enumerate(_E) if e != 0)
        scale = atol + rtol * np.maximum(np.abs(yi), np.abs(y_new))
        err_norm = np.sqrt(np.mean((err / scale) ** 2, axis=1))

        ok = err_norm <= 1.0
        with np.errstate(divide="ignore"):
            factor = np.where(err_norm == 0, MAX_FACTOR,
                              np.clip(SAFETY * err_norm ** -0.2, MIN_FACTOR, MAX_FACTOR))
        factor = np.where(ok, factor, np.minimum(factor, 1.0))

        acc = idx[ok]
        t[acc] = np.where(hi[ok] == t_end - ti[ok], t_end, ti[ok] + hi[ok])
        y[acc] = y_new[ok]
        f[acc] = K[6][ok]  # first-same-as-last
        n_acc[acc] += 1
        n_rej[idx[~ok]] += 1
        h[idx] = hi * factor
        active[acc[t[acc] >= t_end]] = False
    else:
        raise IntegratorFailure(f"maximum number of steps ({max_steps}) exceeded")
    return y, {"n_steps": n_acc, "n_rejected": n_rej}
