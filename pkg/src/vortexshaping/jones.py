"""Jones-calculus primitives: Gaussian input beam, half-wave plates, vortex
retarders and linear polarizers.

Jones vectors are plain complex arrays whose last axis has length 2
(``[..., 0]`` is E_x, ``[..., 1]`` is E_y), so whole grids of vectors are
handled by broadcasting. Fields are normalised such that ``|E|²`` is an
intensity in W/m².
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianBeam",
    "VortexRetarder",
    "jones_vector",
    "gaussian_field",
    "retarder_jones",
    "apply_retarder",
    "polarizer_jones",
    "apply_polarizer",
]


@dataclass(frozen=True)
class GaussianBeam:
    """TEM00 beam with its waist at z = 0.

    Parameters
    ----------
    w0 : float
        Waist radius [m].
    wavelength : float
        Vacuum wavelength [m].
    power : float
        Total power [W]. Sets the field amplitude unless ``e0`` is given.
    e0 : complex, optional
        Explicit on-axis field amplitude at the waist [sqrt(W)/m].
    """

    w0: float
    wavelength: float
    power: float = 1e-3
    e0: complex | None = None

    def __post_init__(self):
        if not self.w0 > 0:
            raise ValueError("w0 must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.power < 0:
            raise ValueError("power must be non-negative")

    @property
    def k(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def z0(self) -> float:
        """Rayleigh length π w0² / λ."""
        return np.pi * self.w0**2 / self.wavelength

    @property
    def amplitude(self) -> complex:
        if self.e0 is not None:
            return self.e0
        return np.sqrt(2 * self.power / (np.pi * self.w0**2))

    def radius(self, z):
        """Beam radius w(z)."""
        return self.w0 * np.sqrt(1 + (np.asarray(z) / self.z0) ** 2)

    def gouy(self, z):
        return np.arctan(np.asarray(z) / self.z0)

    def inverse_curvature(self, z):
        """1/R(z), finite at the waist."""
        z = np.asarray(z, dtype=float)
        return z / (z**2 + self.z0**2)

    def with_power(self, power: float) -> "GaussianBeam":
        return GaussianBeam(self.w0, self.wavelength, power, None)


@dataclass(frozen=True)
class VortexRetarder:
    """Half-wave plate whose fast axis turns as m·φ/2, located at ``z_plate``."""

    m: int = 1
    z_plate: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("vortex retarder order must be an integer >= 1")


def jones_vector(ex, ey) -> np.ndarray:
    """Stack two (broadcastable) component arrays into Jones vectors."""
    ex, ey = np.broadcast_arrays(np.asarray(ex, dtype=complex), np.asarray(ey, dtype=complex))
    return np.stack([ex, ey], axis=-1)


def gaussian_field(beam: GaussianBeam, rho, z):
    """Complex scalar field of the Gaussian beam at radius ``rho`` and plane ``z``.

    The wavefront term k·ρ²/2R(z) is written as k·ρ²·z / 2(z² + z0²), which is
    regular at the waist.
    """
    rho = np.asarray(rho, dtype=float)
    z = np.asarray(z, dtype=float)
    k = beam.k
    w = beam.radius(z)
    phase = k * z + 0.5 * k * rho**2 * beam.inverse_curvature(z) - beam.gouy(z)
    return beam.amplitude * (beam.w0 / w) * np.exp(-(rho**2) / w**2) * np.exp(1j * phase)


def retarder_jones(theta) -> np.ndarray:
    """Jones matrix of a half-wave plate with fast axis at angle ``theta``.

    Returns an array of shape ``theta.shape + (2, 2)``.
    """
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2).astype(complex)


def apply_retarder(vr: VortexRetarder, phi, vin) -> np.ndarray:
    """Jones vector right after the vortex retarder at azimuth ``phi``."""
    mat = retarder_jones(0.5 * vr.m * np.asarray(phi, dtype=float))
    vin = np.asarray(vin, dtype=complex)
    return np.einsum("...ij,...j->...i", mat, vin)


def polarizer_jones(axis) -> np.ndarray:
    """Projector onto the linear polarisation direction at angle ``axis`` from x."""
    axis = np.asarray(axis, dtype=float)
    c, s = np.cos(axis), np.sin(axis)
    return np.stack([np.stack([c * c, c * s], -1), np.stack([c * s, s * s], -1)], -2).astype(complex)


def apply_polarizer(axis, vin) -> np.ndarray:
    vin = np.asarray(vin, dtype=complex)
    return np.einsum("...ij,...j->...i", polarizer_jones(axis), vin)
