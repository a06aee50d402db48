"""Hyperfine transition strengths, optical pumping steady states and
effective saturation intensities on the ⁸⁷Rb D₂ line (J = 1/2 → J' = 3/2,
I = 3/2).

Strengths are |⟨F m_F| e r_q |F' m_F + q⟩|² in units of the reduced line
strength |⟨J‖er‖J'⟩|², obtained from exact 3-j and 6-j symbols:

    s = (2F'+1)(2J+1)(2F+1) · {J J' 1; F' F I}² · (F' 1 F; m' −q −m)².

With these units the closed cycling transition has strength 1/2, which
anchors the saturation-intensity scale I_sat = I_ref · (1/2) / |d̄|².
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg, optimize

from .constants import ISAT_CYCLING
from .errors import InvalidQuantumNumbers, NoSteadyState, ZeroCoupling
from .wigner import wigner_3j_sq, wigner_6j_sq

__all__ = [
    "J_GROUND",
    "J_EXCITED",
    "NUCLEAR_SPIN",
    "TransitionTable",
    "PumpScheme",
    "SublevelPopulations",
    "strength",
    "transition_strengths",
    "average_dipole",
    "rate_matrix",
    "steady_state_populations",
    "saturation_intensity",
    "effective_isat",
    "dipole_range",
]

J_GROUND = Fraction(1, 2)
J_EXCITED = Fraction(3, 2)
NUCLEAR_SPIN = Fraction(3, 2)
GROUND_F = (1, 2)
EXCITED_F = (0, 1, 2, 3)
REFERENCE_DIPOLE = 0.5


def strength(F, mF, Fp, mFp) -> Fraction:
    """Exact relative strength of |F m_F⟩ ↔ |F' m_F'⟩ (zero if forbidden)."""
    q = mFp - mF
    if abs(q) > 1 or abs(mF) > F or abs(mFp) > Fp:
        return Fraction(0)
    J, Jp, I = J_GROUND, J_EXCITED, NUCLEAR_SPIN
    return ((2 * Fp + 1) * (2 * J + 1) * (2 * F + 1) * wigner_6j_sq(J, Jp, 1, Fp, F, I)
            * wigner_3j_sq(Fp, 1, F, mFp, -q, -mF))


@dataclass(frozen=True)
class TransitionTable:
    """Strengths for F → F' keyed by (m_F, q), q = m_F' − m_F."""

    F: int
    Fp: int
    strengths: dict

    def get(self, mF: int, q: int) -> float:
        return float(self.strengths.get((mF, q), 0))

    @property
    def m_values(self):
        return list(range(-self.F, self.F + 1))

    def as_array(self) -> np.ndarray:
        """(2F+1, 3) array with columns q = −1, 0, +1."""
        return np.array([[self.get(m, q) for q in (-1, 0, 1)] for m in self.m_values])


@dataclass(frozen=True)
class PumpScheme:
    """Fractions of the beam power in σ⁺, π and σ⁻ light (P₊₁, P₀, P₋₁)."""

    pq: tuple = (0.5, 0.0, 0.5)

    def __post_init__(self):
        pq = tuple(float(v) for v in self.pq)
        if len(pq) != 3 or min(pq) < 0 or abs(sum(pq) - 1) > 1e-12:
            raise ValueError("power fractions must be three non-negative numbers summing to 1")
        object.__setattr__(self, "pq", pq)

    def fraction(self, q: int) -> float:
        return {1: self.pq[0], 0: self.pq[1], -1: self.pq[2]}[q]


@dataclass(frozen=True)
class SublevelPopulations:
    """Ground-state populations P_{m_F}, listed from m_F = −F to +F."""

    F: int
    p: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 2 * self.F + 1:
            raise ValueError(f"need {2 * self.F + 1} populations for F={self.F}")
        if min(p) < 0 or abs(sum(p) - 1) > 1e-9:
            raise ValueError("populations must be non-negative and sum to 1")
        object.__setattr__(self, "p", p)

    def __getitem__(self, mF: int) -> float:
        return self.p[mF + self.F]

    @classmethod
    def uniform(cls, F: int) -> "SublevelPopulations":
        n = 2 * F + 1
        return cls(F, (1.0 / n,) * n)

    @classmethod
    def stretched(cls, F: int, sign: int = 1) -> "SublevelPopulations":
        p = [0.0] * (2 * F + 1)
        p[-1 if sign > 0 else 0] = 1.0
        return cls(F, tuple(p))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.p)


def _check_qn(F, Fp):
    if F not in GROUND_F or Fp not in EXCITED_F:
        raise InvalidQuantumNumbers(f"no D2 hyperfine transition F={F} -> F'={Fp}")
    if abs(F - Fp) > 1:
        raise InvalidQuantumNumbers(f"F={F} -> F'={Fp} violates |ΔF| <= 1")


def transition_strengths(F: int, Fp: int) -> TransitionTable:
    """Table of relative strengths for the D₂ hyperfine transition F → F'."""
    _check_qn(F, Fp)
    table = {}
    for m in range(-F, F + 1):
        for q in (-1, 0, 1):
            if abs(m + q) <= Fp:
                table[(m, q)] = strength(F, m, Fp, m + q)
    return TransitionTable(F, Fp, table)


def average_dipole(table: TransitionTable, pops: SublevelPopulations, scheme: PumpScheme) -> float:
    """|d̄|² = Σ_{m_F, q} P_{m_F}·P_q·s(m_F, q), in units of the line strength."""
    if pops.F != table.F:
        raise ValueError("populations and table refer to different F")
    return float(sum(pops[m] * scheme.fraction(q) * table.get(m, q) for m in table.m_values for q in (-1, 0, 1)))


def _decay_branching(F: int, Fp: int, loss: str) -> np.ndarray:
    """b[j, e]: probability that excited sublevel e decays into ground sublevel j of F.

    With ``loss="renormalize"`` decays into the other ground level are
    redistributed over F in proportion; with ``"include"`` they are lost.
    """
    ms = range(-F, F + 1)
    es = range(-Fp, Fp + 1)
    b = np.zeros((2 * F + 1, 2 * Fp + 1))
    for k, me in enumerate(es):
        to_F = [float(strength(F, m, Fp, me)) for m in ms]
        if loss == "renormalize":
            total = sum(to_F)
        else:
            total = sum(float(strength(Fg, m, Fp, me)) for Fg in GROUND_F if abs(Fg - Fp) <= 1
                        for m in range(-Fg, Fg + 1))
        if total > 0:
            b[:, k] = np.asarray(to_F) / total
    return b


def rate_matrix(F: int, Fp: int, scheme: PumpScheme, loss: str = "renormalize") -> np.ndarray:
    """Weak-excitation generator G for the ground sublevel populations, dP/dt = G·P.

    Time is in units of 1/(γ·S) with S the saturation parameter referred
    to the cycling transition: sublevel m_F is excited to m_F + q at rate
    ∝ P_q·s(m_F, q) and the excited atom immediately decays with the
    branching ratios of the same matrix elements.
    """
    _check_qn(F, Fp)
    if loss not in ("renormalize", "include"):
        raise ValueError("loss must be 'renormalize' or 'include'")
    b = _decay_branching(F, Fp, loss)
    n = 2 * F + 1
    G = np.zeros((n, n))
    for i, m in enumerate(range(-F, F + 1)):
        for q in (-1, 0, 1):
            me = m + q
            if abs(me) > Fp:
                continue
            r = scheme.fraction(q) * float(strength(F, m, Fp, me))
            if r == 0:
                continue
            G[i, i] -= r
            G[:, i] += r * b[:, me + Fp]
    return G


def _full_generator(F, Fp, scheme, saturation, loss):
    """Generator over ground + excited sublevels including stimulated emission.

    Time unit 1/γ. Pump rate between |m⟩ and |m+q⟩ is S·P_q·s(m, q) / (2·½),
    i.e. (γ/2)·S on the cycling transition driven by pure σ⁺.
    """
    b = _decay_branching(F, Fp, loss)
    ng, ne = 2 * F + 1, 2 * Fp + 1
    A = np.zeros((ng + ne, ng + ne))
    for k in range(ne):
        A[ng + k, ng + k] -= 1.0
        A[:ng, ng + k] += b[:, k]
    for i, m in enumerate(range(-F, F + 1)):
        for q in (-1, 0, 1):
            me = m + q
            if abs(me) > Fp:
                continue
            R = saturation * scheme.fraction(q) * float(strength(F, m, Fp, me))
            e = ng + me + Fp
            A[e, e] -= R
            A[e, i] += R
            A[i, i] -= R
            A[i, e] += R
    return A


def _stationary(A):
    """Normalised non-negative null vector of a generator, unique or error."""
    ns = linalg.null_space(A, rcond=1e-12)
    if ns.shape[1] != 1:
        raise NoSteadyState(f"rate matrix has a {ns.shape[1]}-dimensional null space "
                            "(reducible or uncoupled sublevels)")
    v = ns[:, 0]
    v = v / v.sum()
    if np.any(v < -1e-12):
        raise NoSteadyState("stationary vector has negative entries")
    return np.clip(v, 0, None) / np.clip(v, 0, None).sum()


def steady_state_populations(F: int, Fp: int, scheme: PumpScheme = PumpScheme(), loss: str = "renormalize",
                             saturation: float = 0.0) -> SublevelPopulations:
    """Stationary ground-sublevel distribution under continuous pumping.

    Parameters
    ----------
    loss : {"renormalize", "include"}
        Treatment of decays to the other ground level. With ``"include"``
        there is no true steady state inside F; the slowest-decaying
        (quasi-stationary) distribution is returned instead.
    saturation : float
        Saturation parameter of the driving light referred to the cycling
        transition. 0 selects the weak-excitation limit; otherwise excited
        sublevels and stimulated emission are included and the ground-state
        part of the stationary vector is returned, renormalised.

    Raises
    ------
    NoSteadyState
        If no light couples the ground level, or the stationary
        distribution is not unique.
    """
    G = rate_matrix(F, Fp, scheme, loss)
    if not np.any(G):
        raise NoSteadyState(f"scheme {scheme.pq} does not couple F={F} to F'={Fp}")
    if loss == "include":
        w, v = np.linalg.eig(G)
        k = int(np.argmax(w.real))
        p = np.real(v[:, k])
        p = p / p.sum()
        return SublevelPopulations(F, tuple(np.clip(p, 0, None) / np.clip(p, 0, None).sum()))
    if saturation == 0:
        return SublevelPopulations(F, tuple(_stationary(G)))
    if saturation < 0:
        raise ValueError("saturation must be non-negative")
    v = _stationary(_full_generator(F, Fp, scheme, saturation, loss))
    g = v[: 2 * F + 1]
    return SublevelPopulations(F, tuple(g / g.sum()))


def saturation_intensity(dbar_sq: float, i_ref: float = ISAT_CYCLING) -> float:
    """I_sat = I_ref · (1/2) / |d̄|² [W/m² if i_ref is]."""
    if not dbar_sq > 0:
        raise ZeroCoupling("average dipole moment must be positive")
    return i_ref * REFERENCE_DIPOLE / dbar_sq


def effective_isat(F: int, Fp: int, scheme: PumpScheme = PumpScheme(), pops_mode: str = "steady_state",
                   i_ref: float = ISAT_CYCLING, **kw) -> float:
    """Saturation intensity for a population model: uniform, stretched or steady_state."""
    table = transition_strengths(F, Fp)
    if pops_mode == "uniform":
        pops = SublevelPopulations.uniform(F)
    elif pops_mode == "stretched":
        pops = SublevelPopulations.stretched(F)
    elif pops_mode == "steady_state":
        pops = steady_state_populations(F, Fp, scheme, **kw)
    else:
        raise ValueError("pops_mode must be uniform, stretched or steady_state")
    return saturation_intensity(average_dipole(table, pops, scheme), i_ref)


def dipole_range(F: int, Fp: int, scheme: PumpScheme = PumpScheme()):
    """Minimum and maximum of |d̄|² over all sublevel distributions.

    |d̄|² is linear in the populations, so the extremes sit at pure
    sublevels; the result is confirmed by a linear program over the
    probability simplex. Returns ((dmin, p_min), (dmax, p_max)).
    """
    table = transition_strengths(F, Fp)
    c = np.array([sum(scheme.fraction(q) * table.get(m, q) for q in (-1, 0, 1)) for m in table.m_values])
    n = c.size
    out = []
    for sign in (1, -1):
        res = optimize.linprog(sign * c, A_eq=np.ones((1, n)), b_eq=[1.0], bounds=[(0, 1)] * n, method="highs")
        out.append((float(c @ res.x), SublevelPopulations(F, tuple(np.clip(res.x, 0, None)))))
    return out[0], out[1]
