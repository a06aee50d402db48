"""Dynamic shaping: atoms in bright regions are pushed away by the
scattering force of a resonant beam with a dark core.

Each atom obeys m·r̈ = ħk·Γ(r, ṙ) + m·g, where the scattering rate Γ
includes saturation and the Doppler shift. The beam is modelled by its
parabolic core, S(x, y) = β₀·P·u²/2 with β₀ = α₀ / I_sat; u is y for a
burger beam with its dark plane at y = 0 and ρ for a vortex beam.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cloud import AtomEnsemble
from .constants import G_EARTH, HBAR, RB87_D2_GAMMA, RB87_D2_K, RB87_MASS, ISAT_CYCLING
from .ode import integrate_rows

__all__ = [
    "TwoLevelParams",
    "DynamicRun",
    "scattering_rate",
    "scattering_force",
    "simulate_dynamic",
    "doppler_visibility",
    "imaging_axis",
    "central_slab_population",
    "peak_saturation",
    "momentum_ceiling",
]


@dataclass(frozen=True)
class TwoLevelParams:
    """Closed two-level transition driven by a beam along ``k_vec``."""

    gamma: float = RB87_D2_GAMMA
    delta: float = 0.0
    i_sat: float = ISAT_CYCLING
    k_vec: tuple = (0.0, 0.0, RB87_D2_K)
    atom_mass: float = RB87_MASS

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.i_sat > 0:
            raise ValueError("i_sat must be positive")
        object.__setattr__(self, "k_vec", tuple(float(v) for v in self.k_vec))

    @property
    def k(self) -> np.ndarray:
        return np.asarray(self.k_vec)

    @property
    def recoil_velocity(self) -> float:
        return HBAR * float(np.linalg.norm(self.k)) / self.atom_mass


@dataclass(frozen=True)
class DynamicRun:
    """Pulse sequence and beam for one dynamic-scheme run.

    beta0 : curvature per power of the saturation parameter [W⁻¹m⁻²]
    power : beam power [W]
    tau1, tau_ill, tau2 : free expansion, illumination, free expansion [s]
    axis : ``"y"`` (burger beam, dark plane y = 0) or ``"radial"`` (vortex)
    s_max : optional ceiling on the saturation parameter; the parabola is
        clamped at the real beam's peak (see :func:`peak_saturation`).
    """

    beta0: float
    power: float
    tau1: float = 0.0
    tau_ill: float = 0.0
    tau2: float = 0.0
    axis: str = "y"
    gravity: float = G_EARTH
    s_max: float | None = None

    def __post_init__(self):
        if min(self.tau1, self.tau_ill, self.tau2) < 0:
            raise ValueError("sequence times must be non-negative")
        if self.power < 0:
            raise ValueError("power must be non-negative")
        if self.axis not in ("y", "radial"):
            raise ValueError("axis must be 'y' or 'radial'")

    @property
    def duration(self) -> float:
        return self.tau1 + self.tau_ill + self.tau2

    def saturation(self, positions) -> np.ndarray:
        positions = np.asarray(positions)
        if self.axis == "y":
            u2 = positions[..., 1] ** 2
        else:
            u2 = positions[..., 0] ** 2 + positions[..., 1] ** 2
        s = 0.5 * self.beta0 * self.power * u2
        if self.s_max is not None:
            s = np.minimum(s, self.s_max)
        return s


def scattering_rate(p: TwoLevelParams, intensity, velocity) -> np.ndarray:
    """Photon scattering rate Γ = (γ/2)·S / (1 + S + 4(δ + k·v)²/γ²)."""
    s = np.asarray(intensity, dtype=float) / p.i_sat
    kv = np.asarray(velocity, dtype=float) @ p.k
    return 0.5 * p.gamma * s / (1 + s + 4 * (p.delta + kv) ** 2 / p.gamma**2)


def scattering_force(p: TwoLevelParams, intensity, velocity) -> np.ndarray:
    """Mean radiation-pressure force ħk·Γ [N], shape (..., 3)."""
    rate = scattering_rate(p, intensity, velocity)
    return HBAR * np.asarray(rate)[..., None] * p.k


def momentum_ceiling(p: TwoLevelParams, tau_ill: float) -> float:
    """Largest possible velocity change during the pulse, (γ/2)·τ·ħk/m."""
    return 0.5 * p.gamma * tau_ill * p.recoil_velocity


def _ballistic_rhs(gravity):
    def rhs(t, y, rows):
        out = np.zeros_like(y)
        out[:, :3] = y[:, 3:]
        out[:, 4] = -gravity
        return out
    return rhs


def _pulse_rhs(run: DynamicRun, p: TwoLevelParams):
    acc = HBAR * p.k / p.atom_mass

    def rhs(t, y, rows):
        out = np.empty_like(y)
        out[:, :3] = y[:, 3:]
        s = run.saturation(y[:, :3])
        rate = scattering_rate(p, s * p.i_sat, y[:, 3:])
        out[:, 3:] = rate[:, None] * acc
        out[:, 4] -= run.gravity
        return out
    return rhs


def simulate_dynamic(ensemble: AtomEnsemble, run: DynamicRun, p: TwoLevelParams, rtol: float = 1e-8,
                     atol_pos: float = 1e-10, atol_vel: float = 1e-10, trajectory_interval: float | None = None):
    """Propagate every atom through τ₁, τ_ill and τ₂.

    The integrator is restarted at the phase boundaries so the switch-on
    and switch-off of the force is never stepped across. Returns the final
    ensemble; with ``trajectory_interval`` set, also a list of
    ``(t, positions, velocities)`` snapshots taken every interval.
    """
    y = np.hstack([ensemble.positions, ensemble.velocities])
    atol = np.array([atol_pos] * 3 + [atol_vel] * 3)
    t = ensemble.time
    snapshots = [(t, y[:, :3].copy(), y[:, 3:].copy())] if trajectory_interval else None
    phases = [(run.tau1, _ballistic_rhs(run.gravity)), (run.tau_ill, _pulse_rhs(run, p)),
              (run.tau2, _ballistic_rhs(run.gravity))]
    if run.power == 0:
        phases[1] = (run.tau_ill, _ballistic_rhs(run.gravity))
    for duration, rhs in phases:
        if duration == 0:
            continue
        t_end = t + duration
        if trajectory_interval:
            marks = np.arange(snapshots[-1][0] + trajectory_interval, t_end, trajectory_interval)
            for tm in marks:
                if tm > t:
                    y, _ = integrate_rows(rhs, t, y, tm, rtol, atol)
                    t = tm
                    snapshots.append((t, y[:, :3].copy(), y[:, 3:].copy()))
        y, _ = integrate_rows(rhs, t, y, t_end, rtol, atol)
        t = t_end
    if trajectory_interval and snapshots[-1][0] < t:
        snapshots.append((t, y[:, :3].copy(), y[:, 3:].copy()))
    out = ensemble.copy(positions=y[:, :3].copy(), velocities=y[:, 3:].copy())
    out.time = t
    if trajectory_interval:
        return out, snapshots
    return out


def write_trajectories(path, snapshots):
    """Trajectory dump: atom_id,t,x,y,z,vx,vy,vz."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["atom_id", "t", "x", "y", "z", "vx", "vy", "vz"])
        for t, pos, vel in snapshots:
            for i in range(len(pos)):
                w.writerow([i, f"{t:.10g}", *(f"{v:.10g}" for v in pos[i]), *(f"{v:.10g}" for v in vel[i])])


def imaging_axis(angle: float) -> np.ndarray:
    """Unit vector of the imaging beam, rotated from z about y by ``angle``."""
    return np.array([np.sin(angle), 0.0, np.cos(angle)])


def doppler_visibility(velocity, imaging_angle: float, gamma: float = RB87_D2_GAMMA,
                       k_img: float = RB87_D2_K) -> np.ndarray:
    """Relative absorption of a moving atom for a resonant imaging beam.

    weight = 1 / (1 + 4δ_D²/γ²) with δ_D = k_img·(v·n̂_img).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    v_proj = np.asarray(velocity, dtype=float) @ imaging_axis(imaging_angle)
    delta_d = k_img * v_proj
    return 1.0 / (1.0 + 4 * delta_d**2 / gamma**2)


def central_slab_population(ensemble: AtomEnsemble, half_width: float = 25e-6, weighted: bool = True) -> float:
    """(Visibility-weighted) number of atoms with |y| < half_width."""
    inside = np.abs(ensemble.positions[:, 1]) < half_width
    if weighted:
        return float(ensemble.weight[inside].sum())
    return float(inside.sum())


def peak_saturation(model, z: float, i_sat: float) -> float:
    """Peak intensity of the real beam at ``z`` in units of ``i_sat``."""
    from .propagation import peak_intensity

    return peak_intensity(model, z) / i_sat
