"""Propagation of vortex and burger beams.

Two independent routes are provided:

* :func:`propagate_fresnel` – numerical Fresnel propagation of a sampled
  Jones field (transfer function applied in Fourier space, each Jones
  component separately, zero padded against wrap-around).
* :func:`vortex_field_analytic` – closed-form Collins-integral solution for
  a Gaussian beam sent through an m-th order vortex retarder, expressed with
  modified Bessel functions of complex argument.

The near-axis intensity of the m = 1 beam is parabolic; its curvature is
available in closed form (:func:`curvature_analytic`) and as a callable
model (:func:`parabolic_core`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import GridTooNarrow, NonPositiveDistance, UnsupportedOrder, UpstreamPlane
from .jones import GaussianBeam, VortexRetarder, apply_polarizer, gaussian_field, jones_vector

__all__ = [
    "FieldGrid",
    "PropagationMatrix",
    "VortexBeamModel",
    "vortex_input_grid",
    "propagate_fresnel",
    "vortex_field_analytic",
    "intensity",
    "curvature_analytic",
    "curvature_simple",
    "curvature_per_power",
    "parabolic_core",
    "critical_radius",
    "peak_intensity",
    "radial_profile",
    "distance_for_curvature",
]

EDGE_TOLERANCE = 1e-6


@dataclass
class FieldGrid:
    """Jones field sampled on a cell-centred rectangular grid.

    ``data`` has shape ``(ny, nx, 2)``. Sample ``(i, j)`` sits at
    ``x = (j - nx/2 + 1/2) dx``, ``y = (i - ny/2 + 1/2) dy`` so the optical axis
    falls between pixels and no sample hits the polarisation singularity.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    z: float
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if n < 16 or n % 2:
                raise ValueError("grid sizes must be even and >= 16")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("pixel pitch must be positive")
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.ny, self.nx, 2):
            raise ValueError(f"data must have shape {(self.ny, self.nx, 2)}, got {self.data.shape}")

    @classmethod
    def empty(cls, n: int, half_width: float, z: float = 0.0) -> "FieldGrid":
        d = 2 * half_width / n
        return cls(n, n, d, d, z, np.zeros((n, n, 2), complex))

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx / 2 + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny / 2 + 0.5) * self.dy

    def mesh(self):
        return np.meshgrid(self.x, self.y)

    def intensity(self) -> np.ndarray:
        return intensity(self.data)

    def power(self) -> float:
        return float(self.intensity().sum() * self.dx * self.dy)

    def edge_ratio(self) -> float:
        """Largest field magnitude on the border relative to the peak."""
        mag = np.sqrt(self.intensity())
        peak = mag.max()
        if peak == 0:
            return 0.0
        edge = max(mag[0].max(), mag[-1].max(), mag[:, 0].max(), mag[:, -1].max())
        return float(edge / peak)


@dataclass(frozen=True)
class PropagationMatrix:
    """Ray-transfer (ABCD) matrix."""

    A: float
    B: float
    C: float
    D: float

    @classmethod
    def free_space(cls, z: float, z_start: float = 0.0) -> "PropagationMatrix":
        return cls(1.0, z - z_start, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.A * self.D - self.B * self.C

    def __matmul__(self, other: "PropagationMatrix") -> "PropagationMatrix":
        return PropagationMatrix(
            self.A * other.A + self.B * other.C,
            self.A * other.B + self.B * other.D,
            self.C * other.A + self.D * other.C,
            self.C * other.B + self.D * other.D,
        )


@dataclass(frozen=True)
class VortexBeamModel:
    """Gaussian beam, vortex retarder and an optional linear polarizer after it.

    The input beam is linearly polarised along x. ``polarizer_axis`` is the
    transmission direction measured from x; ``np.pi / 2`` keeps E_y and gives
    a burger beam whose dark plane is y = 0.
    """

    beam: GaussianBeam
    retarder: VortexRetarder = VortexRetarder()
    polarizer_axis: float | None = None

    @property
    def power(self) -> float:
        return self.beam.power

    def with_power(self, power: float) -> "VortexBeamModel":
        return VortexBeamModel(self.beam.with_power(power), self.retarder, self.polarizer_axis)

    def input_field(self, rho, phi) -> np.ndarray:
        """Jones field immediately behind the retarder."""
        zp = self.retarder.z_plate
        scalar = gaussian_field(self.beam, rho, zp)
        m = self.retarder.m
        out = jones_vector(scalar * np.cos(m * np.asarray(phi)), scalar * np.sin(m * np.asarray(phi)))
        if self.polarizer_axis is not None:
            out = apply_polarizer(self.polarizer_axis, out)
        return out


def intensity(field) -> np.ndarray:
    """|E_x|² + |E_y|² for Jones vectors along the last axis."""
    field = np.asarray(field)
    return (field.real**2 + field.imag**2).sum(axis=-1)


def vortex_input_grid(model: VortexBeamModel, n: int = 1024, half_width: float | None = None,
                      z_target: float | None = None, span: float = 4.0, supersample: int = 1) -> FieldGrid:
    """Sample the field behind the retarder.

    By default the grid spans ``±span·w`` with ``w`` the larger of the beam
    radii at the plate and at ``z_target``. With ``supersample > 1`` every
    pixel holds the mean over ``supersample²`` sub-samples.
    """
    beam = model.beam
    zp = model.retarder.z_plate
    if half_width is None:
        w = beam.radius(zp)
        if z_target is not None:
            w = max(w, beam.radius(z_target))
        half_width = span * float(w)
    grid = FieldGrid.empty(n, half_width, zp)
    x, y = grid.x, grid.y
    if supersample <= 1:
        X, Y = np.meshgrid(x, y)
        grid.data = model.input_field(np.hypot(X, Y), np.arctan2(Y, X))
        return grid
    acc = np.zeros_like(grid.data)
    offs = (np.arange(supersample) + 0.5) / supersample - 0.5
    for oy in offs:
        for ox in offs:
            X, Y = np.meshgrid(x + ox * grid.dx, y + oy * grid.dy)
            acc += model.input_field(np.hypot(X, Y), np.arctan2(Y, X))
    grid.data = acc / supersample**2
    return grid


def propagate_fresnel(grid: FieldGrid, dz: float, wavelength: float, pad: int = 4,
                      check_edges: bool = True, crop: bool = True, band_limit: bool = True) -> FieldGrid:
    """Propagate a sampled Jones field over ``dz`` in the Fresnel approximation.

    The field is zero padded to ``pad`` times its linear size, multiplied by
    the transfer function exp(ikdz)·exp(-iπλdz(fx²+fy²)) in Fourier space and,
    if ``crop`` is set, cut back to the original window.

    Notes
    -----
    A vortex beam diffracted by the sharp retarder singularity develops an
    algebraic (~ρ⁻⁴) intensity tail, so a few percent of the power leaves a
    ±4·w window at z ≳ z0. A 4x padded window keeps the wrapped-around part
    well below 1e-2 of the field; 2x is not enough. With ``crop=False`` the
    full padded window is returned, over which power is conserved exactly
    (the transform is unitary).

    Beyond |f| = L/(2λ·dz), with L the padded window length, the sampled
    chirp of the transfer function aliases; light at those frequencies
    would leave the padded window anyway. With ``band_limit`` (default)
    those frequencies are discarded, which removes a spurious floor in the
    dark vortex core at distances where dx < λ·dz/L. Set it to False for a
    strictly unitary propagation.
    """
    if not dz > 0:
        raise NonPositiveDistance(f"propagation distance must be positive, got {dz}")
    if check_edges and grid.edge_ratio() > EDGE_TOLERANCE:
        raise GridTooNarrow(
            f"edge field is {grid.edge_ratio():.2e} of peak (limit {EDGE_TOLERANCE:.0e}); widen the grid"
        )
    ny, nx = grid.ny, grid.nx
    py, px = pad * ny, pad * nx
    oy, ox = (py - ny) // 2, (px - nx) // 2

    fx = np.fft.fftfreq(px, grid.dx)
    fy = np.fft.fftfreq(py, grid.dy)
    k = 2 * np.pi / wavelength
    H = np.exp(1j * k * dz) * np.exp(-1j * np.pi * wavelength * dz * (fy[:, None] ** 2 + fx[None, :] ** 2))
    if band_limit:
        H[np.abs(fy) > py * grid.dy / (2 * wavelength * dz)] = 0.0
        H[:, np.abs(fx) > px * grid.dx / (2 * wavelength * dz)] = 0.0
    out = np.zeros((py, px, 2) if not crop else (ny, nx, 2), complex)
    # one Jones component at a time keeps the peak memory at a single padded plane
    for c in range(2):
        if not np.any(grid.data[..., c]):
            continue
        buf = np.zeros((py, px), complex)
        buf[oy:oy + ny, ox:ox + nx] = grid.data[..., c]
        spec = np.fft.fft2(np.fft.ifftshift(buf))
        del buf
        spec *= H
        plane = np.fft.fftshift(np.fft.ifft2(spec))
        del spec
        out[..., c] = plane if not crop else plane[oy:oy + ny, ox:ox + nx]
    if not crop:
        return FieldGrid(px, py, grid.dx, grid.dy, grid.z + dz, out)
    return FieldGrid(nx, ny, grid.dx, grid.dy, grid.z + dz, out)


def _check_downstream(model: VortexBeamModel, z, allow_equal=False):
    zp = model.retarder.z_plate
    bad = np.asarray(z) < zp if allow_equal else np.asarray(z) <= zp
    if np.any(bad):
        raise UpstreamPlane(f"plane z={z} is not downstream of the retarder at z'={zp}")


def vortex_field_analytic(model: VortexBeamModel, rho, phi, z) -> np.ndarray:
    """Jones field of the vortex beam at (ρ, φ, z) from the Collins integral.

    For z equal to the retarder position the input field is returned
    unchanged. The modified Bessel functions are evaluated in exponentially
    scaled form, so large radii do not overflow.
    """
    _check_downstream(model, z, allow_equal=True)
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    z = np.asarray(z, dtype=float)
    beam, m, zp = model.beam, model.retarder.m, model.retarder.z_plate
    if np.all(z == zp):
        return model.input_field(rho, phi)

    abcd = PropagationMatrix.free_space(z, zp)
    A, B, D = abcd.A, abcd.B, abcd.D
    k, lam = beam.k, beam.wavelength
    wp = beam.radius(zp)

    e00 = beam.amplitude * (beam.w0 / wp) * np.exp(1j * k * A * rho**2 / (2 * B)) * np.exp(-1j * beam.gouy(zp))
    eps = 1 / wp**2 - 0.5j * k * beam.inverse_curvature(zp) - 0.5j * k * D / B
    bet = k * rho / B
    eta = bet**2 / (8 * eps)
    # e^{-η} I_ν(η) = ive(ν, η)·e^{|Re η| - η}, Re η >= 0 here
    scale = np.exp(-1j * eta.imag)
    bessel = (special.ive((m - 1) / 2, eta) - special.ive((m + 1) / 2, eta)) * scale
    radial = np.sqrt(np.pi) * bet / (8 * eps**1.5) * bessel
    scalar = (-1j / (lam * B)) * e00 * np.exp(1j * k * z) * 2 * np.pi * (-1j) ** m * radial
    out = jones_vector(scalar * np.cos(m * phi), scalar * np.sin(m * phi))
    if model.polarizer_axis is not None:
        out = apply_polarizer(model.polarizer_axis, out)
    return out


def radial_profile(model: VortexBeamModel, rho, z) -> np.ndarray:
    """Intensity of the unpolarised (no polarizer) vortex beam along a radius."""
    bare = VortexBeamModel(model.beam, model.retarder, None)
    return intensity(vortex_field_analytic(bare, rho, 0.0, z))


def curvature_analytic(model: VortexBeamModel, z, power: float | None = None):
    """Radial intensity curvature α = ∂²I/∂ρ² at the axis of an m = 1 beam [W/m⁴]."""
    if model.retarder.m != 1:
        raise UnsupportedOrder("the parabolic-core curvature is only defined for m = 1")
    _check_downstream(model, z)
    beam = model.beam
    P = beam.power if power is None else power
    zp = model.retarder.z_plate
    z = np.asarray(z, dtype=float)
    wp = beam.radius(zp)
    g = (z - zp) / beam.z0 * (beam.w0 / wp) ** 2
    bracket = (1 + g * zp / beam.z0) ** 2 + g**2
    return np.pi * P / (beam.wavelength * (z - zp) * wp**2) * bracket**-1.5


def curvature_simple(model: VortexBeamModel, z, power: float | None = None):
    """Curvature for a retarder placed well inside the Rayleigh range."""
    if model.retarder.m != 1:
        raise UnsupportedOrder("the parabolic-core curvature is only defined for m = 1")
    _check_downstream(model, z)
    beam = model.beam
    P = beam.power if power is None else power
    zp = model.retarder.z_plate
    z = np.asarray(z, dtype=float)
    return np.pi / (beam.wavelength * (z - zp) * beam.w0**2) * (1 + (z**2 - zp**2) / beam.z0**2) ** -1.5 * P


def curvature_per_power(model: VortexBeamModel, z) -> float:
    """α₀ = α / P [1/m⁴]."""
    return curvature_analytic(model, z, power=1.0)


def parabolic_core(model: VortexBeamModel, z):
    """Near-axis intensity model I(x, y) = α·ρ²/2.

    With a polarizer the burger approximation α·u²/2 is used, where u is the
    coordinate along the polarizer axis (the dark plane is perpendicular to
    it). The y-dependence of the burger curvature is neglected.
    """
    alpha = float(curvature_analytic(model, z))
    axis = model.polarizer_axis

    def core(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if axis is None:
            return 0.5 * alpha * (x**2 + y**2)
        u = x * np.cos(axis) + y * np.sin(axis)
        return 0.5 * alpha * u**2

    core.alpha = alpha
    return core


def critical_radius(alpha, critical_intensity):
    """ρ_c = sqrt(I_c / α)."""
    return np.sqrt(np.asarray(critical_intensity) / np.asarray(alpha))


def peak_intensity(model: VortexBeamModel, z) -> float:
    """Maximum intensity of the beam in plane ``z`` (ring maximum)."""
    w = float(model.beam.radius(z))
    rho = np.linspace(0, 4 * w, 4001)
    prof = radial_profile(model, rho, z)
    i = int(np.argmax(prof))
    lo, hi = rho[max(i - 1, 0)], rho[min(i + 1, len(rho) - 1)]
    res = optimize.minimize_scalar(lambda r: -radial_profile(model, r, z), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12 * w})
    return float(max(-res.fun, prof[i]))


def distance_for_curvature(model: VortexBeamModel, alpha0: float) -> float:
    """Distance z behind the retarder at which α/P equals ``alpha0``.

    α₀(z) decreases monotonically with distance, so the root is unique.
    """
    zp = model.retarder.z_plate
    z0 = model.beam.z0

    def f(dz):
        return np.log(curvature_per_power(model, zp + dz) / alpha0)

    lo, hi = 1e-9 * z0, 1e3 * z0
    if f(lo) < 0 or f(hi) > 0:
        raise ValueError("requested curvature is outside the reachable range")
    return zp + optimize.brentq(f, lo, hi, xtol=1e-14 * z0, rtol=1e-14)
