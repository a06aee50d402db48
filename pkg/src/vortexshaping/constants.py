"""Physical constants, ⁸⁷Rb D₂-line data and unit conversion factors.

Everything is SI. The conversion factors turn lab units into SI by
multiplication, e.g. ``2.2e4 * PER_MW_PER_CM2`` for a curvature per power of
the saturation parameter given in mW⁻¹cm⁻².
"""

import math

from scipy import constants as _c

HBAR = _c.hbar
K_B = _c.k
G_EARTH = _c.g

# ⁸⁷Rb D₂ line (Steck, "Rubidium 87 D Line Data")
RB87_MASS = 1.443160648e-25  # kg
RB87_D2_WAVELENGTH = 780.241209686e-9  # m
RB87_D2_GAMMA = 2 * math.pi * 6.0666e6  # rad/s
RB87_D2_K = 2 * math.pi / RB87_D2_WAVELENGTH
# resonant two-level cross-section 3λ²/2π
RB87_D2_CROSS_SECTION = 3 * RB87_D2_WAVELENGTH**2 / (2 * math.pi)
# |F=2, m=2> -> |F'=3, m'=3> cycling transition, σ⁺ light
ISAT_CYCLING = 1.67e-3 / 1e-4  # W/m²

UM = 1e-6
MM = 1e-3
NM = 1e-9
US = 1e-6
MS = 1e-3
MW = 1e-3
UW = 1e-6
NJ = 1e-9
MHZ_2PI = 2 * math.pi * 1e6  # rad/s per MHz
MW_PER_CM2 = 1e-3 / 1e-4  # W/m² per mW/cm²
PER_CM4 = 1e8  # m⁻⁴ per cm⁻⁴
PER_MW_PER_CM2 = 1.0 / (1e-3 * 1e-4)  # W⁻¹m⁻² per mW⁻¹cm⁻²
