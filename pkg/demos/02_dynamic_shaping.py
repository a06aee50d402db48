"""
Pushing atoms out of a light sheet
==================================

In the dynamic scheme atoms on a closed transition scatter photons from a
burger beam whose intensity rises quadratically away from its dark plane
y = 0. Atoms near the plane stay; atoms further out are pushed along the
beam. We follow a thermal cloud through free expansion, the pulse and a
second expansion, and count what remains in the central slab.
"""

import numpy as np

from vortexshaping.atomic import effective_isat
from vortexshaping.cloud import CloudSpec, sample_cloud
from vortexshaping.constants import PER_MW_PER_CM2, US
from vortexshaping.dynamic import (DynamicRun, TwoLevelParams, central_slab_population, doppler_visibility,
                                   momentum_ceiling, simulate_dynamic)
from vortexshaping.jones import GaussianBeam, VortexRetarder
from vortexshaping.propagation import VortexBeamModel, distance_for_curvature, peak_intensity

# Saturation intensity of the F=2 -> F'=3 line for atoms pumped by the beam
# itself, and a measured-scale curvature per power of the saturation parameter.
p = TwoLevelParams(i_sat=effective_isat(2, 3))
beta0 = 2.2e4 * PER_MW_PER_CM2
print(f"I_sat = {p.i_sat / 10:.2f} mW/cm^2")

###############################################################################
# Where the parabola stops
# ------------------------
# Far from the axis the real beam's intensity saturates at its ring maximum.
# We place a 1 mm beam at the distance that gives this curvature and cap the
# saturation parameter at the ring peak.

model = VortexBeamModel(GaussianBeam(1e-3, 780.241e-9, 1.0), VortexRetarder(1), np.pi / 2)
peak_per_watt = peak_intensity(model, distance_for_curvature(model, beta0 * p.i_sat))

ens = sample_cloud(CloudSpec(n_atoms=20_000, sigma0=100e-6, temperature=45e-6, seed=1))
timing = dict(tau1=1200 * US, tau_ill=35 * US, tau2=565 * US)

# Pushed atoms leave the imaging resonance; atoms in the dark slab |y| < 25 um
# barely see light and stay visible.
print("\n P [mW]   visible (whole cloud)   visible (central slab)")
for power in (0.0, 0.1, 0.2, 0.4, 0.8):
    run = DynamicRun(beta0, power * 1e-3, s_max=peak_per_watt * power * 1e-3 / p.i_sat if power else None,
                     **timing)
    out = simulate_dynamic(ens, run, p)
    # atoms moving along the imaging axis are Doppler shifted out of resonance
    out.weight = doppler_visibility(out.velocities, np.deg2rad(35))
    slab = central_slab_population(out) / central_slab_population(out, weighted=False)
    print(f"  {power:4.1f}     {out.weight.mean():19.3f}   {slab:22.3f}")

###############################################################################
# How fast can atoms get?
# -----------------------
# A saturated atom scatters at most γ/2 photons per second, which caps the
# velocity gained in a pulse.

run = DynamicRun(beta0, 1.45e-3, tau1=200 * US, tau_ill=300 * US, s_max=peak_per_watt * 1.45e-3 / p.i_sat)
vz = simulate_dynamic(ens, run, p).velocities[:, 2]
print(f"\n300 us pulse at 1.45 mW: max vz = {vz.max():.1f} m/s "
      f"(ceiling {momentum_ceiling(p, 300 * US):.1f} m/s)")
