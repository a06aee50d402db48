"""Dark-state shaping: optical pumping of bright atoms into a dark
ground level by a vortex beam.

Three levels are involved: the dark ground level |1⟩, the bright ground
level |2⟩ and the excited level |e⟩, which decays to |1⟩ at γ₁ and back
to |2⟩ at γ₂. Atoms start in |2⟩. While illuminated, the excited-state
share ρ̃ of the bright manifold settles within a few 1/γ, after which the
bright population decays with the effective rate γ_eff = γ₁·ρ̃. Near the
vortex centre the saturation parameter is parabolic, so the surviving
density is the initial Gaussian multiplied by another Gaussian of width σ_s.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .cloud import CloudSpec, gaussian_density
from .constants import ISAT_CYCLING, RB87_D2_GAMMA
from .errors import IntegratorFailure

__all__ = [
    "ThreeLevelParams",
    "DarkPulse",
    "relative_population",
    "gamma_eff",
    "populations_analytic",
    "full_rate_equations",
    "shaped_density",
    "sigma_s",
    "shaped_width",
    "width_vs_detuning",
    "width_vs_energy",
    "write_width_sweep",
]


@dataclass(frozen=True)
class ThreeLevelParams:
    """Decay rates [rad/s], detuning [rad/s] and saturation intensity [W/m²].

    ``gamma`` is derived as gamma1 + gamma2.
    """

    gamma1: float = 0.5 * RB87_D2_GAMMA
    gamma2: float = 0.5 * RB87_D2_GAMMA
    delta: float = 0.0
    i_sat: float = ISAT_CYCLING

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("partial decay rates must be positive")
        if not self.i_sat > 0:
            raise ValueError("i_sat must be positive")

    @property
    def gamma(self) -> float:
        return self.gamma1 + self.gamma2

    @property
    def detuning_factor(self) -> float:
        """1 + 4δ²/γ²."""
        return 1.0 + 4.0 * self.delta**2 / self.gamma**2

    @property
    def i_sat_eff(self) -> float:
        """Detuning-broadened saturation intensity Ĩ_sat = I_sat·(1 + 4δ²/γ²)."""
        return self.i_sat * self.detuning_factor


@dataclass(frozen=True)
class DarkPulse:
    """Vortex pulse of power ``power`` [W] lasting ``tau_ill`` [s].

    ``alpha0`` is the intensity curvature per power at the beam centre [m⁻⁴].
    """

    power: float
    tau_ill: float
    alpha0: float

    def __post_init__(self):
        if self.power < 0 or self.tau_ill < 0 or self.alpha0 < 0:
            raise ValueError("pulse parameters must be non-negative")

    @property
    def energy(self) -> float:
        return self.power * self.tau_ill

    @classmethod
    def from_energy(cls, energy: float, tau_ill: float, alpha0: float) -> "DarkPulse":
        if not tau_ill > 0:
            raise ValueError("tau_ill must be positive to derive the power")
        return cls(energy / tau_ill, tau_ill, alpha0)

    def beta0(self, p: ThreeLevelParams) -> float:
        """β̃₀ = α₀ / Ĩ_sat [W⁻¹m⁻²]."""
        return self.alpha0 / p.i_sat_eff


def relative_population(p: ThreeLevelParams, intensity) -> np.ndarray:
    """ρ̃ = ½·S / (1 + S + 4δ²/γ²), the excited share of the bright manifold."""
    s = np.asarray(intensity, dtype=float) / p.i_sat
    return 0.5 * s / (1.0 + s + 4.0 * p.delta**2 / p.gamma**2)


def gamma_eff(p: ThreeLevelParams, intensity) -> np.ndarray:
    """Effective pumping rate (γ₁/2)·S̃/(1 + S̃) with S̃ = I / Ĩ_sat."""
    st = np.asarray(intensity, dtype=float) / p.i_sat_eff
    return 0.5 * p.gamma1 * st / (1.0 + st)


def populations_analytic(p: ThreeLevelParams, intensity, t):
    """(ρ₁₁, ρ₂₂, ρ_ee) after illumination time ``t`` in the adiabatic picture.

    Arrays broadcast against each other; each output has the broadcast shape.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    rt = relative_population(p, intensity)
    decay = np.exp(-gamma_eff(p, intensity) * t)
    rho11 = -np.expm1(-gamma_eff(p, intensity) * t)
    return rho11, (1.0 - rt) * decay, rt * decay


def _pump_rate(p: ThreeLevelParams, intensity: float) -> float:
    s = intensity / p.i_sat
    return 0.5 * p.gamma * s / p.detuning_factor


def full_rate_equations(p: ThreeLevelParams, intensity: float, t, y0=(0.0, 1.0, 0.0), rtol=1e-10, atol=1e-13):
    """Integrate the three-level rate equations from ``y0`` = (ρ₁₁, ρ₂₂, ρ_ee).

    ρ̇_ee = R(ρ₂₂ − ρ_ee) − γρ_ee,  ρ̇₂₂ = −R(ρ₂₂ − ρ_ee) + γ₂ρ_ee,  ρ̇₁₁ = γ₁ρ_ee,
    with R = (γ/2)·S/(1 + 4δ²/γ²). The system is stiff for S ≫ 1 (fast
    Rabi-like equilibration vs slow pumping), hence an implicit method.

    Returns a (len(t), 3) array for array-like ``t`` or a length-3 array.
    """
    if intensity < 0:
        raise ValueError("intensity must be non-negative")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    R = _pump_rate(p, intensity)
    g, g1, g2 = p.gamma, p.gamma1, p.gamma2
    M = np.array([[0.0, 0.0, g1],
                  [0.0, -R, R + g2],
                  [0.0, R, -R - g]])

    t_end = float(t_arr.max())
    if t_end == 0:
        out = np.tile(np.asarray(y0, dtype=float), (t_arr.size, 1))
    else:
        sol = solve_ivp(lambda _t, y: M @ y, (0.0, t_end), np.asarray(y0, dtype=float), method="Radau",
                        t_eval=np.sort(t_arr), jac=lambda _t, y: M, rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegratorFailure(sol.message)
        order = np.argsort(t_arr)
        out = np.empty((t_arr.size, 3))
        out[order] = sol.y.T
    return out[0] if np.ndim(t) == 0 else out


def sigma_s(p: ThreeLevelParams, pulse: DarkPulse) -> float:
    """Width of the Gaussian carved by the pulse, (γ₁/2·β̃₀·E_ill)^(-1/2)."""
    k = 0.5 * p.gamma1 * pulse.beta0(p) * pulse.energy
    return np.inf if k == 0 else float(k**-0.5)


def shaped_width(sigma0_i, pulse: DarkPulse, p: ThreeLevelParams):
    """Effective Gaussian width after pumping: 1/σᵢ² = 1/σ_s² + 1/σ₀ᵢ²."""
    sigma0_i = np.asarray(sigma0_i, dtype=float)
    if np.any(sigma0_i <= 0):
        raise ValueError("initial widths must be positive")
    inv = 0.5 * p.gamma1 * pulse.beta0(p) * pulse.energy + 1.0 / sigma0_i**2
    return inv**-0.5


def shaped_density(spec: CloudSpec, pulse: DarkPulse, p: ThreeLevelParams, r, exact: bool = True,
                   axes: str = "xy"):
    """Relative bright-state density after the pulse at points ``r`` (..., 3).

    The vortex propagates along z and is centred on the cloud, so the
    intensity is ½α₀P(x² + y²). With ``axes="y"`` only y enters (the
    parabola of a burger beam). ``exact`` uses the full γ_eff, otherwise
    the weak-saturation Gaussian form.
    """
    r = np.asarray(r, dtype=float)
    if axes == "xy":
        u2 = r[..., 0] ** 2 + r[..., 1] ** 2
    elif axes == "y":
        u2 = r[..., 1] ** 2
    else:
        raise ValueError("axes must be 'xy' or 'y'")
    rho0 = gaussian_density(spec, r)
    I = 0.5 * pulse.alpha0 * pulse.power * u2
    if exact:
        return rho0 * np.exp(-gamma_eff(p, I) * pulse.tau_ill)
    return rho0 * np.exp(-0.5 * p.gamma1 * (I / p.i_sat_eff) * pulse.tau_ill)


def width_vs_detuning(delta, sigma0, e_ill, beta0, gamma1, gamma, c=1.0, delta0=0.0):
    """Shaped width versus detuning, the model fitted to detuning scans.

    σ_y(δ) = σ₀ / sqrt(1 + σ₀²·(γ₁/2)·β₀·E_ill / (1 + (2c(δ − δ₀)/γ)²))

    ``beta0`` is the resonant curvature per power of the saturation
    parameter; ``c`` rescales and ``delta0`` shifts the detuning axis to
    absorb calibration errors of the set frequency.
    """
    x = 2.0 * c * (np.asarray(delta, dtype=float) - delta0) / gamma
    return sigma0 / np.sqrt(1.0 + sigma0**2 * 0.5 * gamma1 * beta0 * e_ill / (1.0 + x * x))


def width_vs_energy(e_ill, sigma0, beta0, gamma1, gamma=None, delta=0.0):
    """Shaped width versus pulse energy for a fixed detuning."""
    broaden = 1.0 if gamma is None else 1.0 + 4.0 * delta**2 / gamma**2
    e = np.asarray(e_ill, dtype=float)
    return (0.5 * gamma1 * beta0 * e / broaden + 1.0 / sigma0**2) ** -0.5


def write_width_sweep(path, energies, sigma_x, sigma_y):
    """CSV with columns E_ill_nJ,sigma_x_um,sigma_y_um."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["E_ill_nJ", "sigma_x_um", "sigma_y_um"])
        for e, sx, sy in zip(energies, sigma_x, sigma_y):
            w.writerow([f"{e * 1e9:.10g}", f"{sx * 1e6:.10g}", f"{sy * 1e6:.10g}"])
