"""Thermal atom cloud: Monte Carlo sampling and Gaussian densities."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from .constants import K_B, RB87_MASS

__all__ = ["CloudSpec", "AtomEnsemble", "sample_cloud", "gaussian_density", "expansion_ratio",
           "velocity_width", "expanded_sigma"]


@dataclass(frozen=True)
class CloudSpec:
    """Initial cloud: Gaussian in position, Maxwell-Boltzmann in velocity.

    ``sigma0`` is a 3-tuple of rms radii (x, y, z) in metres; a scalar is
    broadcast to an isotropic cloud.
    """

    n_atoms: int = 100_000
    sigma0: tuple = (100e-6, 100e-6, 100e-6)
    temperature: float = 45e-6
    atom_mass: float = RB87_MASS
    seed: int = 0

    def __post_init__(self):
        s = np.broadcast_to(np.asarray(self.sigma0, dtype=float), (3,))
        object.__setattr__(self, "sigma0", tuple(float(v) for v in s))
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if min(self.sigma0) <= 0:
            raise ValueError("cloud widths must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    @property
    def sigma_v(self) -> float:
        return velocity_width(self.temperature, self.atom_mass)


@dataclass
class AtomEnsemble:
    """Monte Carlo atoms.

    positions, velocities : (N, 3) arrays [m], [m/s]
    weight : (N,) imaging visibility in (0, 1]
    state_pop : (N, 3) populations (ρ11, ρ22, ρee)
    """

    positions: np.ndarray
    velocities: np.ndarray
    weight: np.ndarray = None
    state_pop: np.ndarray = None
    time: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        n = len(self.positions)
        if self.positions.shape != (n, 3) or self.velocities.shape != (n, 3):
            raise ValueError("positions and velocities must be (N, 3)")
        if self.weight is None:
            self.weight = np.ones(n)
        if self.state_pop is None:
            self.state_pop = np.tile([0.0, 1.0, 0.0], (n, 1))
        self.weight = np.asarray(self.weight, dtype=float)
        self.state_pop = np.asarray(self.state_pop, dtype=float)

    def __len__(self):
        return len(self.positions)

    def validate(self):
        if np.any(self.weight <= 0) or np.any(self.weight > 1):
            raise ValueError("weights must lie in (0, 1]")
        if np.any(np.abs(self.state_pop.sum(axis=1) - 1) > 1e-12):
            raise ValueError("state populations must sum to 1")

    def copy(self, **changes) -> "AtomEnsemble":
        out = replace(self, positions=self.positions.copy(), velocities=self.velocities.copy(),
                      weight=self.weight.copy(), state_pop=self.state_pop.copy(), meta=dict(self.meta))
        for k, v in changes.items():
            setattr(out, k, v)
        return out

    def to_csv(self, path):
        """Write the ensemble as atom_id,x,y,z,vx,vy,vz,weight,p11,p22,pee."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["atom_id", "x", "y", "z", "vx", "vy", "vz", "weight", "p11", "p22", "pee"])
            for i in range(len(self)):
                w.writerow([i, *(f"{v:.10g}" for v in self.positions[i]), *(f"{v:.10g}" for v in self.velocities[i]),
                            f"{self.weight[i]:.10g}", *(f"{v:.10g}" for v in self.state_pop[i])])

    @classmethod
    def from_csv(cls, path) -> "AtomEnsemble":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        order = np.argsort(data[:, 0], kind="stable")
        data = data[order]
        return cls(data[:, 1:4], data[:, 4:7], data[:, 7], data[:, 8:11])


def velocity_width(temperature: float, mass: float = RB87_MASS) -> float:
    """σ_v = sqrt(k_B T / m)."""
    return float(np.sqrt(K_B * temperature / mass))


def expanded_sigma(sigma0, temperature: float, t: float, mass: float = RB87_MASS):
    """Width of a freely expanding Gaussian cloud after time t."""
    return np.sqrt(np.asarray(sigma0, dtype=float) ** 2 + (velocity_width(temperature, mass) * t) ** 2)


def _uniforms(seed: int, n_atoms: int, per_atom: int) -> np.ndarray:
    """Open-interval uniforms from a counter-based Philox stream.

    Atom i always receives raw words ``per_atom*i ... per_atom*i + per_atom-1``
    of the stream keyed by ``seed``, so its values do not depend on how many
    other atoms are drawn or in which order.
    """
    bits = np.random.Philox(key=int(seed)).random_raw(n_atoms * per_atom)
    u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return u.reshape(n_atoms, per_atom)


def sample_cloud(spec: CloudSpec) -> AtomEnsemble:
    """Draw positions N(0, σ0²) and velocities N(0, k_B T/m) for every atom.

    All atoms start in the upper ground state (ρ22 = 1).
    """
    u = _uniforms(spec.seed, spec.n_atoms, 6)
    z = ndtri(u)
    pos = z[:, :3] * np.asarray(spec.sigma0)
    vel = z[:, 3:] * spec.sigma_v
    ens = AtomEnsemble(pos, vel)
    ens.meta["seed"] = spec.seed
    return ens


def gaussian_density(spec: CloudSpec, r) -> np.ndarray:
    """Density relative to the cloud centre, for points ``r`` of shape (..., 3)."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(spec.sigma0)
    return np.exp(-0.5 * ((r / s) ** 2).sum(axis=-1))


def expansion_ratio(spec: CloudSpec, tau_ill: float) -> np.ndarray:
    """τ_ill / (σ0_i·sqrt(m / k_B T)) per axis.

    Free expansion during the pulse is negligible when this is ≪ 1.
    """
    if spec.temperature == 0:
        return np.zeros(3)
    return tau_ill * spec.sigma_v / np.asarray(spec.sigma0)
