"""
Saturation intensities from hyperfine structure
===============================================

How strongly an atom responds to light depends on which magnetic sublevels
it occupies and on the light's polarisation. We compute the relative
transition strengths of the rubidium-87 D2 line from angular-momentum
algebra, let the light pump the populations to a steady state, and read off
the effective saturation intensity.
"""

from fractions import Fraction

import numpy as np

from vortexshaping.atomic import (PumpScheme, dipole_range, effective_isat, steady_state_populations,
                                  transition_strengths)

###############################################################################
# Relative strengths
# ------------------
# Strengths out of each ground sublevel of F=2, summed over excited levels and
# polarisations, add up to one.

for fp in (3, 2, 1):
    t = transition_strengths(2, fp)
    sigma_plus = [str(t.strengths.get((m, 1), Fraction(0))) for m in range(-2, 3)]
    print(f"F=2 -> F'={fp}, sigma+ from m=-2..2: {', '.join(sigma_plus)}")
total = sum(sum(transition_strengths(2, fp).strengths[(0, q)] for q in (-1, 0, 1)
                if (0, q) in transition_strengths(2, fp).strengths) for fp in (1, 2, 3))
print(f"sum rule for m=0: {total}")

###############################################################################
# Saturation intensities
# ----------------------
# Pure σ+ light on the cycling transition pumps atoms into the stretched state
# and gives the textbook 1.67 mW/cm². Equal σ+ and σ- components (light
# polarised transverse to the quantisation axis) leave them spread over
# the sublevels and the effective value is higher.

print("\ncase                               I_sat [mW/cm^2]")
cases = [
    ("F'=3, sigma+ (stretched state)", effective_isat(2, 3, PumpScheme((1.0, 0.0, 0.0)), "stretched")),
    ("F'=3, sigma+/sigma-, steady state", effective_isat(2, 3)),
    ("F'=2, uniform populations", effective_isat(2, 2, pops_mode="uniform")),
    ("F'=2, sigma+/sigma-, steady state", effective_isat(2, 2)),
    ("F'=2, stretched state", effective_isat(2, 2, pops_mode="stretched")),
]
for label, value in cases:
    print(f"{label:34s} {value / 10:8.3f}")
(lo, _), (hi, _) = dipole_range(2, 2)
print(f"F'=2, sigma+/sigma- light: mean strength between {lo:.4f} (m=+-2) and {hi:.4f} (m=0)")

for fp in (3, 2):
    pops = steady_state_populations(2, fp).p
    print(f"steady-state populations F'={fp}, m=-2..2: {np.round(pops, 4)}")
