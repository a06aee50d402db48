"""Synthetic absorption imaging and the fits used to analyse the images.

The imaging beam travels along z̃, which is the shaping axis z turned
about the vertical y axis by ``angle``. Column densities n₂D(x̃, ỹ) are
formed either by histogramming a Monte Carlo ensemble or by integrating a
continuous density along z̃. Frames follow Lambert-Beer: the transmitted
signal above the dark level is the reference signal times exp(−σ_Rb·n₂D).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import RB87_D2_CROSS_SECTION, RB87_D2_GAMMA
from .darkstate import width_vs_detuning, width_vs_energy
from .errors import BadReference, FitDiverged, InsufficientData, NoSignal
from .fitting import least_squares

__all__ = [
    "ImagingConfig",
    "AbsorptionImage",
    "rotate_to_imaging",
    "project_ensemble",
    "render_density",
    "synthesize_absorption",
    "invert_absorption",
    "extract_width",
    "fit_parabola_curvature",
    "fit_energy_series",
    "fit_detuning_series",
    "energy_series_slope",
]


@dataclass(frozen=True)
class ImagingConfig:
    """Camera and imaging-beam geometry.

    angle : between the shaping axis z and the imaging axis z̃ [rad]
    pixel : pixel pitch in the object plane [m]
    n_px : frame size (width, height)
    counts : mean photon counts per pixel in the reference frame
    dark_level : constant dark-frame counts
    noise_model : ``"none"`` or ``"poisson"``
    n_average : number of frames averaged per image (noise only)
    """

    angle: float = np.deg2rad(35.0)
    pixel: float = 5e-6
    n_px: tuple = (512, 512)
    sigma_rb: float = RB87_D2_CROSS_SECTION
    noise_seed: int | None = None
    noise_model: str = "none"
    counts: float = 1e4
    dark_level: float = 100.0
    n_average: int = 1

    def __post_init__(self):
        if not self.pixel > 0:
            raise ValueError("pixel must be positive")
        if not self.sigma_rb > 0:
            raise ValueError("sigma_rb must be positive")
        if self.noise_model not in ("none", "poisson"):
            raise ValueError("noise_model must be 'none' or 'poisson'")
        object.__setattr__(self, "n_px", tuple(int(v) for v in self.n_px))
        if min(self.n_px) < 1 or self.n_average < 1:
            raise ValueError("frame size and n_average must be >= 1")

    @property
    def extent(self):
        """Pixel edges along x̃ and ỹ, centred on the optical axis."""
        w, h = self.n_px
        xe = (np.arange(w + 1) - w / 2) * self.pixel
        ye = (np.arange(h + 1) - h / 2) * self.pixel
        return xe, ye

    @property
    def centers(self):
        xe, ye = self.extent
        return 0.5 * (xe[1:] + xe[:-1]), 0.5 * (ye[1:] + ye[:-1])


@dataclass
class AbsorptionImage:
    """Transmission (``g``), reference (``b``) and dark (``d``) frames."""

    g: np.ndarray
    b: np.ndarray
    d: np.ndarray
    sigma_rb: float = RB87_D2_CROSS_SECTION
    meta: dict = field(default_factory=dict)

    @property
    def n2d(self) -> np.ndarray:
        return invert_absorption(self)


def rotate_to_imaging(positions, angle: float) -> np.ndarray:
    """Coordinates (x̃, ỹ, z̃) of points given in the shaping frame."""
    r = np.asarray(positions, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    out = np.empty_like(r)
    out[..., 0] = c * r[..., 0] - s * r[..., 2]
    out[..., 1] = r[..., 1]
    out[..., 2] = s * r[..., 0] + c * r[..., 2]
    return out


def project_ensemble(ens, cfg: ImagingConfig, atoms_per_particle: float = 1.0) -> np.ndarray:
    """Column density [m⁻²] of a weighted ensemble, shape (height, width).

    Each Monte Carlo particle stands for ``atoms_per_particle`` atoms and
    contributes its visibility weight to the pixel it falls in; rows index
    ỹ and columns x̃.
    """
    rt = rotate_to_imaging(ens.positions, cfg.angle)
    xe, ye = cfg.extent
    hist, _, _ = np.histogram2d(rt[:, 1], rt[:, 0], bins=(ye, xe), weights=ens.weight * atoms_per_particle)
    return hist / cfg.pixel**2


def render_density(density, cfg: ImagingConfig, half_depth: float, n_depth: int = 48,
                   peak_density: float = 1.0, rows_per_chunk: int = 64) -> np.ndarray:
    """Column density of a continuous density by quadrature along z̃.

    ``density(r)`` takes points of shape (..., 3) in the shaping frame and
    returns the density relative to ``peak_density`` [m⁻³]. The line of
    sight is integrated over |z̃| ≤ ``half_depth`` with Gauss-Legendre
    nodes; samples are taken at pixel centres.
    """
    nodes, wts = np.polynomial.legendre.leggauss(n_depth)
    zt = nodes * half_depth
    wts = wts * half_depth
    xc, yc = cfg.centers
    c, s = np.cos(cfg.angle), np.sin(cfg.angle)
    out = np.empty((len(yc), len(xc)))
    for i0 in range(0, len(yc), rows_per_chunk):
        yy = yc[i0:i0 + rows_per_chunk]
        Y, X, Z = np.meshgrid(yy, xc, zt, indexing="ij")
        # inverse rotation (x̃, ỹ, z̃) -> (x, y, z)
        pts = np.stack([c * X + s * Z, Y, -s * X + c * Z], axis=-1)
        out[i0:i0 + len(yy)] = np.asarray(density(pts)) @ wts
    return out * peak_density


def synthesize_absorption(n2d, cfg: ImagingConfig, rng=None) -> AbsorptionImage:
    """Frames that a camera would record for column density ``n2d``.

    Without noise G − D = (B − D)·exp(−σ_Rb·n₂D) exactly. With Poisson
    noise, photon counts of G and B are drawn independently and averaged
    over ``cfg.n_average`` shots.
    """
    n2d = np.asarray(n2d, dtype=float)
    if np.any(n2d < 0):
        raise ValueError("column density must be non-negative")
    trans = np.exp(-cfg.sigma_rb * n2d)
    d = np.full(n2d.shape, cfg.dark_level)
    if cfg.noise_model == "none":
        b = d + cfg.counts
        g = d + cfg.counts * trans
    else:
        if rng is None:
            rng = np.random.default_rng(cfg.noise_seed)
        shape = (cfg.n_average,) + n2d.shape
        b = d + rng.poisson(cfg.counts, size=shape).mean(axis=0)
        g = d + rng.poisson(cfg.counts * trans, size=shape).mean(axis=0)
    return AbsorptionImage(g, b, d, cfg.sigma_rb)


def invert_absorption(img: AbsorptionImage, return_mask: bool = False):
    """n₂D = −ln((G − D)/(B − D)) / σ_Rb.

    Pixels where G − D ≤ 0 (fully absorbed or noise) are returned as NaN
    and flagged in the optional mask.

    Raises
    ------
    BadReference
        If B − D ≤ 0 in any pixel.
    """
    ref = np.asarray(img.b, dtype=float) - img.d
    if np.any(ref <= 0):
        raise BadReference(f"reference minus dark frame is non-positive in {int(np.sum(ref <= 0))} pixel(s)")
    sig = np.asarray(img.g, dtype=float) - img.d
    bad = sig <= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        n2d = -np.log(np.where(bad, np.nan, sig) / ref) / img.sigma_rb
    if return_mask:
        return n2d, bad
    return n2d


def _gauss_offset(y, p):
    off, amp, y0, s = p
    return off + amp * np.exp(-0.5 * ((y - y0) / s) ** 2)


def extract_width(n2d, pixel: float = 5e-6, return_fit: bool = False):
    """Vertical rms width of a cloud image.

    The image (rows = ỹ) is summed along x̃ and the profile fitted with
    offset + amplitude·Gaussian. Flagged (NaN) pixels are ignored.

    Raises
    ------
    NoSignal
        If the profile peak does not exceed five times the rms fluctuation
        of the profile's outer tenths.
    """
    img = np.asarray(n2d, dtype=float)
    prof = np.nansum(img, axis=1)
    n = prof.size
    if n < 8:
        raise InsufficientData("image too small for a width fit")
    edge = np.r_[prof[: max(n // 10, 2)], prof[-max(n // 10, 2):]]
    base = edge.mean()
    noise = edge.std()
    signal = prof.max() - base
    if not np.isfinite(signal) or signal <= 0 or signal <= 5 * noise:
        raise NoSignal(f"peak {signal:.3g} above background does not exceed 5x rms {noise:.3g}")
    # work on a normalised profile with the coordinate in pixels so that the
    # fit is independent of the image's scale and offset
    yn = (prof - base) / signal
    u = np.arange(n) - (n - 1) / 2
    w = np.clip(yn, 0, None)
    mu = (w * u).sum() / w.sum()
    sd = np.sqrt(max((w * (u - mu) ** 2).sum() / w.sum(), 0.25))
    fit = least_squares(_gauss_offset, u, yn, [0.0, 1.0, mu, sd])
    if not fit.converged or fit.params[3] == 0:
        raise FitDiverged("Gaussian profile fit did not converge")
    width = abs(fit.params[3]) * pixel
    if return_fit:
        return width, fit
    return width


def fit_parabola_curvature(y, intensity, window: float, power: float = 1.0, center: float | None = None) -> float:
    """Curvature per power α₀ from a line scan through the dark centre.

    Samples with |y − center| ≤ window are fitted by a + b·u + ½·α₀·P·u²,
    u = y − center (the centre defaults to the darkest sample).

    Raises
    ------
    InsufficientData
        If fewer than five samples lie inside the window.
    """
    y = np.asarray(y, dtype=float)
    intensity = np.asarray(intensity, dtype=float)
    if center is None:
        center = y[np.argmin(intensity)]
    u = y - center
    sel = np.abs(u) <= window
    if sel.sum() < 5:
        raise InsufficientData(f"only {int(sel.sum())} samples in the fit window (need 5)")
    scale = window
    A = np.stack([np.ones(sel.sum()), u[sel] / scale, (u[sel] / scale) ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(A, intensity[sel], rcond=None)
    return 2 * coef[2] / scale**2 / power


def _log_sigma_energy(e, p, sigma0, gamma1, beta_scale, broaden):
    return np.log10(width_vs_energy(e / broaden, sigma0, p[0] * beta_scale, gamma1))


def fit_energy_series(e_ill, sigma_y, sigma0: float, gamma1: float = 2 * np.pi * 3e6, delta: float = 0.0,
                      gamma: float = RB87_D2_GAMMA, beta_guess: float | None = None):
    """Fit β₀ to widths measured at several pulse energies.

    The common logarithm of the width law is fitted, which weights all
    energies equally in relative terms.

    Returns
    -------
    beta0 : float [W⁻¹m⁻²]
    fit : FitResult in the internal parameter β₀/β_guess
    """
    e = np.asarray(e_ill, dtype=float)
    s = np.asarray(sigma_y, dtype=float)
    if e.size < 3:
        raise InsufficientData("need at least three (E_ill, sigma) points")
    if np.any(s <= 0):
        raise ValueError("widths must be positive")
    broaden = 1.0 + 4.0 * delta**2 / gamma**2
    if beta_guess is None:
        k = (1 / s**2 - 1 / sigma0**2) / np.where(e > 0, e, np.nan) * broaden
        k = k[np.isfinite(k) & (k > 0)]
        if k.size == 0:
            raise FitDiverged("no width below sigma0: cannot estimate beta0")
        beta_guess = float(np.median(k) * 2 / gamma1)
    fit = least_squares(lambda x, p: _log_sigma_energy(x, p, sigma0, gamma1, beta_guess, broaden),
                        e, np.log10(s), [1.0])
    if not fit.converged or fit.params[0] <= 0:
        raise FitDiverged("energy-series fit failed")
    return float(fit.params[0] * beta_guess), fit


def energy_series_slope(e_ill, sigma0: float, beta0: float, gamma1: float) -> np.ndarray:
    """Local log-log slope d ln σ / d ln E of the width law."""
    e = np.asarray(e_ill, dtype=float)
    k = 0.5 * gamma1 * beta0 * e
    return -0.5 * k / (k + 1.0 / sigma0**2)


def fit_detuning_series(delta, sigma_y, sigma0: float, e_ill: float, gamma1: float = 2 * np.pi * 3e6,
                        gamma: float = RB87_D2_GAMMA, p0=None):
    """Fit (c, δ₀, β₀) of the detuning model to widths measured at several δ.

    Returns
    -------
    (c, delta0, beta0) : tuple of floats
    fit : FitResult in the internal parameters (c, δ₀/γ, β₀/β_guess)

    Raises
    ------
    FitDiverged
        If the data do not contain detunings of both signs (c and δ₀ are
        then nearly degenerate) or the fit fails.
    """
    d = np.asarray(delta, dtype=float)
    s = np.asarray(sigma_y, dtype=float)
    if d.size < 5:
        raise InsufficientData("need at least five (delta, sigma) points")
    if not (np.any(d > 0) and np.any(d < 0)):
        raise FitDiverged("detunings must span both signs to separate c and delta0")
    if p0 is None:
        i = np.argmin(s)
        beta_guess = (1 / s[i] ** 2 - 1 / sigma0**2) * 2 / (gamma1 * e_ill)
        if not beta_guess > 0:
            raise FitDiverged("no width below sigma0: cannot estimate beta0")
        start = [1.0, d[i] / gamma, 1.0]
    else:
        c0, d00, b0 = p0
        beta_guess = b0
        start = [c0, d00 / gamma, 1.0]

    def model(x, p):
        return np.log10(width_vs_detuning(x, sigma0, e_ill, p[2] * beta_guess, gamma1, gamma, p[0], p[1] * gamma))

    fit = least_squares(model, d, np.log10(s), start)
    if not fit.converged or fit.params[2] <= 0:
        raise FitDiverged("detuning-series fit failed")
    c, d0n, b = fit.params
    return (abs(float(c)), float(d0n * gamma), float(b * beta_guess)), fit
