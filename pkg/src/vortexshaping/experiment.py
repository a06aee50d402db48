"""Experiment configurations, bundled presets and the sweep runner.

A configuration is one JSON document. Every physical field carries its
unit in the key (``tau1_us``, ``power_mW``, ...) and is converted to SI
when the document is resolved. Exactly one parameter is swept per run.

Three schemes are supported:

``beam``
    Intensity maps, line scans and curvatures of the vortex (or burger)
    beam at a list of planes.
``dynamic``
    Monte Carlo atoms pushed by a burger beam, imaged at 35° with Doppler
    dependent visibility.
``dark``
    Dark-state pumping by a vortex beam: shaped column densities, fitted
    widths and the fit of the width law.
"""

from __future__ import annotations

import copy
import hashlib
import json
import platform
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .atomic import effective_isat
from .cloud import CloudSpec, expanded_sigma, sample_cloud
from .constants import (MHZ_2PI, MM, MW, MW_PER_CM2, NM, NJ, PER_CM4, PER_MW_PER_CM2, RB87_D2_GAMMA,
                        RB87_D2_WAVELENGTH, UM, US, UW)
from .darkstate import DarkPulse, ThreeLevelParams, shaped_density, shaped_width, write_width_sweep
from .dynamic import (DynamicRun, TwoLevelParams, central_slab_population, doppler_visibility,
                      simulate_dynamic, write_trajectories)
from .errors import ConfigError, NoSignal, UnknownFigure
from .imaging import (ImagingConfig, energy_series_slope, extract_width, fit_detuning_series, fit_energy_series,
                      fit_parabola_curvature, invert_absorption, project_ensemble, render_density,
                      synthesize_absorption)
from .io import scale_to_uint16, write_csv, write_json, write_pgm
from .jones import GaussianBeam, VortexRetarder
from .propagation import (VortexBeamModel, curvature_analytic, curvature_simple, distance_for_curvature,
                          intensity, peak_intensity, vortex_field_analytic)

__all__ = ["DEFAULTS", "PRESETS", "resolve_config", "config_hash", "run", "reproduce", "load_config"]

FORMATS = ("csv", "pgm", "json")

DEFAULTS = {
    "name": "run",
    "scheme": "dynamic",
    "beam": {
        "w0_mm": 1.0,
        "wavelength_nm": RB87_D2_WAVELENGTH / NM,
        "m": 1,
        "z_plate_mm": 0.0,
        "polarizer_deg": None,
        "power_mW": 1.0,
        "beta0_per_mW_cm2": 2.2e4,
        "isat_mW_cm2": "auto",
        "clamp": True,
        "grid": 256,
        "span_w0": 2.5,
    },
    "cloud": {"n_atoms": 100_000, "sigma0_um": 100.0, "temperature_uK": 45.0, "seed": 0},
    "sequence": {"tau1_us": 0.0, "tau_ill_us": 0.0, "tau2_us": 0.0, "detuning_MHz": 0.0,
                 "gamma1_MHz": 3.0, "gamma2_MHz": RB87_D2_GAMMA / MHZ_2PI - 3.0},
    "imaging": {"angle_deg": 35.0, "pixel_um": 5.0, "frame": [512, 512], "noise": "none", "counts": 1e4,
                "n_average": 1, "noise_seed": 0, "dark_level": 100.0},
    "sweep": {"parameter": None, "values": []},
    "output": {"formats": list(FORMATS), "normalization": "first", "trajectory_interval_us": None,
               "ensemble": False},
}

SWEEPS = {
    "beam": {"plane"},
    "dynamic": {"power_mW", "tau1_us", "tau_ill_us", "tau2_us", "detuning_MHz"},
    "dark": {"power_uW", "tau_ill_us", "pulse", "detuning_MHz"},
}


def _fig5_pulses():
    pulses = [[10.0, 0.0]]
    for tau in (10.0, 20.0, 30.0, 40.0, 50.0):
        for p in (5.0, 10.0, 20.0, 35.0, 49.0, 70.0, 100.0, 140.0):
            if tau * p <= 2450.0:
                pulses.append([tau, p])
    return pulses


_DYN = {"scheme": "dynamic",
        "beam": {"power_mW": 1.45, "polarizer_deg": 90.0, "beta0_per_mW_cm2": 2.2e4},
        "cloud": {"sigma0_um": 100.0, "temperature_uK": 45.0, "n_atoms": 100_000}}
_DARK = {"scheme": "dark",
         "beam": {"beta0_per_mW_cm2": 7.1e3},
         # expands to the fitted 209 µm after tau1 = 4.5 ms at 15 µK
         "cloud": {"sigma0_um": 120.85, "temperature_uK": 15.0, "n_atoms": 1_500_000},
         "sequence": {"tau1_us": 4500.0, "tau2_us": 0.0}}

PRESETS = {
    "fig1": {"name": "fig1", "scheme": "beam", "beam": {"power_mW": 1.0, "grid": 256, "span_w0": 2.5},
             "sweep": {"parameter": "plane", "values": [
                 {"z_over_z0": 0.0}, {"z_over_z0": 0.05}, {"z_over_z0": 0.5},
                 {"z_over_z0": 0.5, "polarizer_deg": 0.0}]},
             "output": {"normalization": "each"}},
    "fig3a": {**_DYN, "name": "fig3a",
              "sequence": {"tau1_us": 1200.0, "tau_ill_us": 35.0, "tau2_us": 565.0},
              "sweep": {"parameter": "power_mW", "values": [0.0, 0.1, 0.2, 0.4, 0.6, 0.8]}},
    "fig3b": {**_DYN, "name": "fig3b",
              "sequence": {"tau1_us": 1200.0, "tau_ill_us": 0.0, "tau2_us": 565.0},
              "sweep": {"parameter": "tau_ill_us", "values": [1.0, 5.0, 10.0, 20.0, 30.0, 40.0]}},
    "fig3c": {**_DYN, "name": "fig3c",
              "sequence": {"tau1_us": 200.0, "tau_ill_us": 300.0, "tau2_us": 0.0},
              "sweep": {"parameter": "tau2_us", "values": [0.0, 50.0, 100.0, 150.0, 200.0, 250.0]}},
    "fig4": {**_DARK, "name": "fig4", "sequence": {**_DARK["sequence"], "tau_ill_us": 10.0},
             "sweep": {"parameter": "power_uW", "values": [0.0, 10.0, 20.0, 40.0, 70.0, 100.0, 130.0]},
             "output": {"normalization": "each"}},
    "fig5": {**_DARK, "name": "fig5",
             "sweep": {"parameter": "pulse", "values": _fig5_pulses()}},
    "fig6": {**_DARK, "name": "fig6", "beam": {"beta0_per_mW_cm2": 8.6e3, "power_mW": 0.13},
             "sequence": {**_DARK["sequence"], "tau_ill_us": 10.0},
             "sweep": {"parameter": "detuning_MHz", "values": [float(v) for v in np.linspace(-20, 20, 41)]}},
    "fig7": {"name": "fig7", "scheme": "beam", "beam": {"power_mW": 1.0, "grid": 256, "span_w0": 2.5},
             "sweep": {"parameter": "plane", "values": [{"alpha0_per_cm4": 1.2e5}]},
             "output": {"normalization": "each"}},
}


def _merge(base, over, path=""):
    out = copy.deepcopy(base)
    for k, v in over.items():
        where = f"{path}.{k}" if path else k
        if k not in base:
            raise ConfigError("unknown field", where)
        if isinstance(base[k], dict) and not isinstance(v, dict):
            raise ConfigError("expected an object", where)
        out[k] = _merge(base[k], v, where) if isinstance(base[k], dict) else copy.deepcopy(v)
    return out


def _num(cfg, section, key, positive=False, nonneg=False):
    v = cfg[section][key]
    where = f"{section}.{key}"
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(f"expected a number, got {v!r}", where)
    if positive and not v > 0:
        raise ConfigError("must be positive", where)
    if nonneg and v < 0:
        raise ConfigError("must be non-negative", where)
    return float(v)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def resolve_config(doc: dict) -> dict:
    """Fill in defaults and validate; returns the full configuration."""
    cfg = _merge(DEFAULTS, doc)
    scheme = cfg["scheme"]
    if scheme not in SWEEPS:
        raise ConfigError(f"unknown scheme {scheme!r} (beam, dynamic or dark)", "scheme")
    for key in ("w0_mm", "wavelength_nm", "span_w0"):
        _num(cfg, "beam", key, positive=True)
    _num(cfg, "beam", "power_mW", nonneg=True)
    _num(cfg, "beam", "beta0_per_mW_cm2", positive=True)
    if cfg["beam"]["isat_mW_cm2"] != "auto":
        _num(cfg, "beam", "isat_mW_cm2", positive=True)
    m = cfg["beam"]["m"]
    if not isinstance(m, int) or m < 1:
        raise ConfigError("retarder order must be an integer >= 1", "beam.m")
    g = cfg["beam"]["grid"]
    if not isinstance(g, int) or g < 16 or g % 2:
        raise ConfigError("grid must be an even integer >= 16", "beam.grid")
    n = cfg["cloud"]["n_atoms"]
    if isinstance(n, float) and n.is_integer():
        cfg["cloud"]["n_atoms"] = n = int(n)
    if not isinstance(n, int) or n < 1:
        raise ConfigError("must be an integer >= 1", "cloud.n_atoms")
    _num(cfg, "cloud", "sigma0_um", positive=True)
    _num(cfg, "cloud", "temperature_uK", nonneg=True)
    if not isinstance(cfg["cloud"]["seed"], int) or cfg["cloud"]["seed"] < 0:
        raise ConfigError("must be a non-negative integer", "cloud.seed")
    for key in ("tau1_us", "tau_ill_us", "tau2_us"):
        _num(cfg, "sequence", key, nonneg=True)
    _num(cfg, "sequence", "detuning_MHz")
    for key in ("gamma1_MHz", "gamma2_MHz"):
        _num(cfg, "sequence", key, positive=True)
    _num(cfg, "imaging", "pixel_um", positive=True)
    _num(cfg, "imaging", "counts", positive=True)
    _num(cfg, "imaging", "angle_deg")
    frame = cfg["imaging"]["frame"]
    if not (isinstance(frame, list) and len(frame) == 2 and all(isinstance(v, int) and v >= 8 for v in frame)):
        raise ConfigError("frame must be [width, height] with integers >= 8", "imaging.frame")
    if cfg["imaging"]["noise"] not in ("none", "poisson"):
        raise ConfigError("noise must be 'none' or 'poisson'", "imaging.noise")

    sweep = cfg["sweep"]
    if sweep["parameter"] is None:
        raise ConfigError("exactly one sweep parameter is required", "sweep.parameter")
    if sweep["parameter"] not in SWEEPS[scheme]:
        raise ConfigError(f"cannot sweep {sweep['parameter']!r} in the {scheme} scheme "
                          f"(allowed: {', '.join(sorted(SWEEPS[scheme]))})", "sweep.parameter")
    vals = sweep["values"]
    if not isinstance(vals, list) or len(vals) == 0:
        raise ConfigError("sweep values must be a non-empty list", "sweep.values")
    for i, v in enumerate(vals):
        where = f"sweep.values[{i}]"
        if sweep["parameter"] == "plane":
            if not isinstance(v, dict) or not set(v) <= {"z_over_z0", "z_mm", "alpha0_per_cm4", "polarizer_deg"} \
                    or len(set(v) & {"z_over_z0", "z_mm", "alpha0_per_cm4"}) != 1:
                raise ConfigError("a plane needs exactly one of z_over_z0, z_mm, alpha0_per_cm4", where)
        elif sweep["parameter"] == "pulse":
            if not (isinstance(v, list) and len(v) == 2 and all(isinstance(u, (int, float)) and u >= 0 for u in v)):
                raise ConfigError("a pulse is [tau_ill_us, power_uW] with non-negative entries", where)
        elif isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
            raise ConfigError("expected a number", where)
        elif sweep["parameter"] != "detuning_MHz" and v < 0:
            raise ConfigError("must be non-negative", where)

    if scheme == "dark" and cfg["sequence"]["tau2_us"] != 0:
        raise ConfigError("the dark scheme images right after the pulse; tau2 must be 0", "sequence.tau2_us")
    out = cfg["output"]
    if not isinstance(out["formats"], list) or not set(out["formats"]) <= set(FORMATS):
        raise ConfigError(f"formats must be a subset of {FORMATS}", "output.formats")
    if out["normalization"] not in ("first", "each", "global"):
        raise ConfigError("normalization must be first, each or global", "output.normalization")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


# --------------------------------------------------------------------------
# physical objects from a resolved configuration

def _beam_model(cfg, polarizer_deg="inherit", power=None):
    b = cfg["beam"]
    pol = b["polarizer_deg"] if polarizer_deg == "inherit" else polarizer_deg
    beam = GaussianBeam(b["w0_mm"] * MM, b["wavelength_nm"] * NM, b["power_mW"] * MW if power is None else power)
    return VortexBeamModel(beam, VortexRetarder(b["m"], b["z_plate_mm"] * MM),
                           None if pol is None else np.deg2rad(pol))


def _isat(cfg, Fp):
    v = cfg["beam"]["isat_mW_cm2"]
    return effective_isat(2, Fp) if v == "auto" else v * MW_PER_CM2


def _imaging(cfg):
    im = cfg["imaging"]
    return ImagingConfig(angle=np.deg2rad(im["angle_deg"]), pixel=im["pixel_um"] * UM, n_px=tuple(im["frame"]),
                         noise_seed=im["noise_seed"], noise_model=im["noise"], counts=im["counts"],
                         dark_level=im["dark_level"], n_average=im["n_average"])


def _point_config(cfg, value):
    """Copy of ``cfg`` with the sweep parameter set to ``value``."""
    c = copy.deepcopy(cfg)
    par = cfg["sweep"]["parameter"]
    if par == "power_mW":
        c["beam"]["power_mW"] = value
    elif par == "power_uW":
        c["beam"]["power_mW"] = value * 1e-3
    elif par == "pulse":
        c["sequence"]["tau_ill_us"], c["beam"]["power_mW"] = value[0], value[1] * 1e-3
    elif par in c["sequence"]:
        c["sequence"][par] = value
    return c


def _normalise(images, mode):
    if mode == "each":
        return [scale_to_uint16(im) for im in images]
    if mode == "first":
        ref = np.nanmax(images[0]) if np.nanmax(images[0]) > 0 else max(np.nanmax(im) for im in images)
    else:
        ref = max(np.nanmax(im) for im in images)
    return [scale_to_uint16(im, ref) for im in images]


def _label(value):
    if isinstance(value, dict):
        return ";".join(f"{k}={value[k]}" for k in sorted(value))
    if isinstance(value, list):
        return "/".join(f"{v:g}" for v in value)
    return value


# --------------------------------------------------------------------------
# scheme runners; each returns (summary header, summary rows, images, extras)

def _beam_point(cfg, value):
    pol = value.get("polarizer_deg", cfg["beam"]["polarizer_deg"])
    model = _beam_model(cfg, pol)
    zp = model.retarder.z_plate
    if "z_over_z0" in value:
        z = zp + value["z_over_z0"] * model.beam.z0
    elif "z_mm" in value:
        z = value["z_mm"] * MM
    else:
        z = distance_for_curvature(model, value["alpha0_per_cm4"] * PER_CM4)
    n = cfg["beam"]["grid"]
    half = cfg["beam"]["span_w0"] * model.beam.w0
    x = (np.arange(n) - n / 2 + 0.5) * (2 * half / n)
    X, Y = np.meshgrid(x, x)
    rho, phi = np.hypot(X, Y), np.arctan2(Y, X)
    I = intensity(vortex_field_analytic(model, rho, phi, z))
    # line scan through the centre across the bright direction
    scan_axis = 0.0 if model.polarizer_axis is None else model.polarizer_axis
    s = np.linspace(-half, half, 2001)
    Is = intensity(vortex_field_analytic(model, np.abs(s), np.where(s >= 0, scan_axis, scan_axis + np.pi), z))
    w = float(model.beam.radius(z - zp))
    if z > zp and model.retarder.m == 1:
        a_an = curvature_analytic(model, z)
        a_simple = curvature_simple(model, z)
        s_fit = np.linspace(-0.05 * w, 0.05 * w, 201)
        I_fit = intensity(vortex_field_analytic(model, np.abs(s_fit),
                                                np.where(s_fit >= 0, scan_axis, scan_axis + np.pi), z))
        a_fit = fit_parabola_curvature(s_fit, I_fit, 0.05 * w, power=model.power, center=0.0) * model.power
        parab = 0.5 * a_simple * s**2
    else:
        a_an = a_simple = a_fit = np.nan
        parab = np.full_like(s, np.nan)
    extras = {
        "linescan": (["s_um", "I_W_m2", "I_parabola_W_m2"], [(u / UM, i, p) for u, i, p in zip(s, Is, parab)]),
        "plane": (["x_um", "y_um", "I_W_m2"],
                  [(xx / UM, yy / UM, ii) for xx, yy, ii in zip(X.ravel(), Y.ravel(), I.ravel())]),
    }
    row = [z / MM, (z - zp) / model.beam.z0, "none" if pol is None else pol, a_an / PER_CM4 / MW,
           a_simple / PER_CM4 / MW, a_fit / PER_CM4 / MW, peak_intensity(model, z) / MW_PER_CM2 if z > zp else I.max() / MW_PER_CM2]
    return row, I, extras


_BEAM_HEADER = ["z_mm", "z_over_z0", "polarizer_deg", "alpha_analytic_mW_cm4", "alpha_simple_mW_cm4",
                "alpha_fit_mW_cm4", "peak_I_mW_cm2"]


def _dynamic_point(cfg, value, cache):
    c = _point_config(cfg, value)
    seq = c["sequence"]
    isat = _isat(c, 3)
    beta0 = c["beam"]["beta0_per_mW_cm2"] * PER_MW_PER_CM2
    power = c["beam"]["power_mW"] * MW
    s_max = None
    if c["beam"]["clamp"] and power > 0:
        if "peak_per_W" not in cache:
            model = _beam_model(c, power=1.0)
            z = distance_for_curvature(model, beta0 * isat)
            cache["peak_per_W"] = peak_intensity(model, z)
        s_max = cache["peak_per_W"] * power / isat
    axis = "radial" if c["beam"]["polarizer_deg"] is None else "y"
    run_ = DynamicRun(beta0=beta0, power=power, tau1=seq["tau1_us"] * US, tau_ill=seq["tau_ill_us"] * US,
                      tau2=seq["tau2_us"] * US, axis=axis, s_max=s_max)
    p = TwoLevelParams(delta=seq["detuning_MHz"] * MHZ_2PI, i_sat=isat)
    cl = c["cloud"]
    ens0 = sample_cloud(CloudSpec(cl["n_atoms"], cl["sigma0_um"] * UM, cl["temperature_uK"] * 1e-6, seed=cl["seed"]))
    interval = c["output"]["trajectory_interval_us"]
    extras = {}
    if interval:
        ens, snaps = simulate_dynamic(ens0, run_, p, trajectory_interval=interval * US)
        extras["trajectories"] = snaps
    else:
        ens = simulate_dynamic(ens0, run_, p)
    icfg = _imaging(c)
    ens.weight = doppler_visibility(ens.velocities, icfg.angle)
    if c["output"]["ensemble"]:
        extras["ensemble"] = ens
    n2d = project_ensemble(ens, icfg)
    img = synthesize_absorption(n2d, icfg)
    od_img = invert_absorption(img)
    wsum = ens.weight.sum()
    my = (ens.weight * ens.positions[:, 1]).sum() / wsum
    sy = np.sqrt((ens.weight * (ens.positions[:, 1] - my) ** 2).sum() / wsum)
    row = [wsum, central_slab_population(ens), float(ens.velocities[:, 2].max()), sy / UM,
           float(ens.weight.mean())]
    return row, od_img, extras


_DYN_HEADER = ["visible_atoms", "central_slab", "max_vz_m_s", "sigma_y_um", "mean_visibility"]


def _dark_params(c):
    seq = c["sequence"]
    return ThreeLevelParams(gamma1=seq["gamma1_MHz"] * MHZ_2PI, gamma2=seq["gamma2_MHz"] * MHZ_2PI,
                            delta=seq["detuning_MHz"] * MHZ_2PI, i_sat=_isat(c, 2))


def _dark_cloud(c):
    cl = c["cloud"]
    s1 = float(expanded_sigma(cl["sigma0_um"] * UM, cl["temperature_uK"] * 1e-6, c["sequence"]["tau1_us"] * US))
    return CloudSpec(cl["n_atoms"], s1, cl["temperature_uK"] * 1e-6, seed=cl["seed"])


def _dark_point(cfg, value):
    c = _point_config(cfg, value)
    p = _dark_params(c)
    beta0 = c["beam"]["beta0_per_mW_cm2"] * PER_MW_PER_CM2
    pulse = DarkPulse(c["beam"]["power_mW"] * MW, c["sequence"]["tau_ill_us"] * US, beta0 * p.i_sat)
    spec = _dark_cloud(c)
    s1 = spec.sigma0[1]
    icfg = _imaging(c)
    peak = spec.n_atoms / ((2 * np.pi) ** 1.5 * np.prod(spec.sigma0))
    n2d = render_density(lambda r: shaped_density(spec, pulse, p, r), icfg, half_depth=6 * max(spec.sigma0),
                         peak_density=peak)
    rng = np.random.default_rng([c["imaging"]["noise_seed"], c["cloud"]["seed"]])
    od_img = invert_absorption(synthesize_absorption(n2d, icfg, rng=rng))
    try:
        w_fit = extract_width(od_img, icfg.pixel)
    except NoSignal:
        w_fit = np.nan
    w_model = float(shaped_width(s1, pulse, p))
    row = [pulse.energy / NJ, c["sequence"]["detuning_MHz"], pulse.tau_ill / US, pulse.power / UW,
           w_fit / UM, w_model / UM, float(shaped_width(spec.sigma0[0], pulse, p)) / UM]
    return row, od_img, {}


_DARK_HEADER = ["E_ill_nJ", "detuning_MHz", "tau_ill_us", "power_uW", "sigma_y_fit_um", "sigma_y_model_um",
                "sigma_x_model_um"]


def _dark_analysis(cfg, rows, out, formats):
    """Fit the width law to the extracted widths and export curves."""
    c = cfg
    p = _dark_params(c)
    spec = _dark_cloud(c)
    s0 = spec.sigma0[1]
    beta_true = c["beam"]["beta0_per_mW_cm2"] * PER_MW_PER_CM2
    rows = np.array([[r[0], r[1], r[4]] for r in rows], dtype=float)
    ok = np.isfinite(rows[:, 2])
    report = {"beta0_planted_per_mW_cm2": c["beam"]["beta0_per_mW_cm2"], "sigma0_um": s0 / UM}
    beta_fit = beta_true
    par = c["sweep"]["parameter"]
    try:
        if par == "detuning_MHz" and ok.sum() >= 5:
            e = c["beam"]["power_mW"] * MW * c["sequence"]["tau_ill_us"] * US
            (cc, d0, beta_fit), fit = fit_detuning_series(rows[ok, 1] * MHZ_2PI, rows[ok, 2] * UM, s0, e,
                                                          p.gamma1, p.gamma)
            report.update(fit=fit.to_dict(), c=cc, delta0_MHz=d0 / MHZ_2PI, beta0_per_mW_cm2=beta_fit / PER_MW_PER_CM2)
        elif par != "detuning_MHz" and len(set(rows[ok, 0])) >= 3:
            beta_fit, fit = fit_energy_series(rows[ok, 0] * NJ, rows[ok, 2] * UM, s0, p.gamma1, p.delta, p.gamma)
            report.update(fit=fit.to_dict(), beta0_per_mW_cm2=beta_fit / PER_MW_PER_CM2,
                          high_energy_slope=float(energy_series_slope(rows[ok, 0].max() * NJ, s0, beta_fit, p.gamma1)))
    except Exception as exc:  # the fit is a best-effort summary of the run
        report["fit_error"] = f"{type(exc).__name__}: {exc}"
    if "json" in formats:
        write_json(out / "fit.json", report)
    if "csv" in formats:
        # width law with the (fitted) curvature and its high-energy asymptote
        energies = np.geomspace(0.01, 10.0, 61) * NJ
        broaden = p.detuning_factor
        law = (0.5 * p.gamma1 * beta_fit * energies / broaden + 1 / s0**2) ** -0.5
        asym = (0.5 * p.gamma1 * beta_fit * energies / broaden) ** -0.5
        write_csv(out / "width_law.csv", ["E_ill_nJ", "sigma_y_um", "asymptote_um"],
                  [(e / NJ, s / UM, a / UM) for e, s, a in zip(energies, law, asym)])
        # model widths at the swept energies (unit pulse length, same energy)
        pulses = [DarkPulse(e * NJ, 1.0, beta_true * p.i_sat) for e in rows[:, 0]]
        write_width_sweep(out / "width_sweep.csv", rows[:, 0] * NJ,
                          [float(shaped_width(spec.sigma0[0], pl, p)) for pl in pulses],
                          [float(shaped_width(s0, pl, p)) for pl in pulses])
    return report


# --------------------------------------------------------------------------

def run(doc: dict, out_dir, formats=None, threads: int = 1, seed: int | None = None, preset: str | None = None,
        normalization: str | None = None) -> dict:
    """Run a configuration and write its artifacts into ``out_dir``.

    Returns the manifest (also written as ``manifest.json``).
    """
    doc = copy.deepcopy(doc)
    if seed is not None:
        doc.setdefault("cloud", {})["seed"] = int(seed)
    if formats:
        doc.setdefault("output", {})["formats"] = list(dict.fromkeys(formats))
    if normalization:
        doc.setdefault("output", {})["normalization"] = normalization
    cfg = resolve_config(doc)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats = cfg["output"]["formats"]
    scheme = cfg["scheme"]
    values = cfg["sweep"]["values"]
    cache = {}
    if scheme == "beam":
        fn = lambda v: _beam_point(cfg, v)
        header = _BEAM_HEADER
    elif scheme == "dynamic":
        if cfg["beam"]["clamp"]:
            # evaluate the (power independent) clamp once, before any parallel work
            model = _beam_model(cfg, power=1.0)
            beta0 = cfg["beam"]["beta0_per_mW_cm2"] * PER_MW_PER_CM2
            cache["peak_per_W"] = peak_intensity(model, distance_for_curvature(model, beta0 * _isat(cfg, 3)))
        fn = lambda v: _dynamic_point(cfg, v, cache)
        header = _DYN_HEADER
    else:
        fn = lambda v: _dark_point(cfg, v)
        header = _DARK_HEADER

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fn, values))
    else:
        results = [fn(v) for v in values]

    par = cfg["sweep"]["parameter"]
    rows = [[i, _label(v), *r[0]] for i, (v, r) in enumerate(zip(values, results))]
    files = []
    if "csv" in formats:
        write_csv(out / "summary.csv", ["index", f"sweep_{par}", *header], rows)
        files.append("summary.csv")
    images = [r[1] for r in results]
    pgms = _normalise(images, cfg["output"]["normalization"])
    for i, (img, pgm, (_, _, extras)) in enumerate(zip(images, pgms, results)):
        stem = f"point_{i:02d}"
        if "pgm" in formats:
            write_pgm(out / f"{stem}.pgm", pgm)
            files.append(f"{stem}.pgm")
        if "csv" in formats:
            if scheme == "beam":
                for key in ("plane", "linescan"):
                    h, r = extras[key]
                    write_csv(out / f"{stem}_{key}.csv", h, r)
                    files.append(f"{stem}_{key}.csv")
            else:
                pix = cfg["imaging"]["pixel_um"]
                hgt, wid = img.shape
                yc = (np.arange(hgt) - hgt / 2 + 0.5) * pix
                xc = (np.arange(wid) - wid / 2 + 0.5) * pix
                write_csv(out / f"{stem}_profile_y.csv", ["y_um", "column_sum_per_m"],
                          zip(yc, np.nansum(img, axis=1) * pix * UM))
                write_csv(out / f"{stem}_profile_x.csv", ["x_um", "column_sum_per_m"],
                          zip(xc, np.nansum(img, axis=0) * pix * UM))
                files += [f"{stem}_profile_y.csv", f"{stem}_profile_x.csv"]
            if "trajectories" in extras:
                write_trajectories(out / f"{stem}_trajectories.csv", extras["trajectories"])
                files.append(f"{stem}_trajectories.csv")
            if "ensemble" in extras:
                extras["ensemble"].to_csv(out / f"{stem}_ensemble.csv")
                files.append(f"{stem}_ensemble.csv")

    manifest = {
        "preset": preset,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "seed": cfg["cloud"]["seed"],
        "threads": threads,
        "versions": {"vortexshaping": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "files": files,
    }
    if scheme == "dark":
        manifest["analysis"] = _dark_analysis(cfg, [r[0] for r in results], out, formats)
        manifest["files"] += [f for f, fmt in (("fit.json", "json"), ("width_law.csv", "csv"),
                                               ("width_sweep.csv", "csv")) if fmt in formats]
    write_json(out / "manifest.json", manifest)
    return manifest


def reproduce(figure_id: str, out_dir, **kw) -> dict:
    """Run a bundled preset."""
    if figure_id not in PRESETS:
        raise UnknownFigure(f"unknown figure {figure_id!r}; available: {', '.join(sorted(PRESETS))}")
    return run(PRESETS[figure_id], out_dir, preset=figure_id, **kw)
