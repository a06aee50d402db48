"""Command line front end.

    python -m vortexshaping run --preset fig3a --out out/fig3a
    python -m vortexshaping run --config my.json --out out/my --seed 3 --format csv
    python -m vortexshaping reproduce fig5 --out out/fig5
    python -m vortexshaping sat --json
    python -m vortexshaping presets

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 unknown preset.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .atomic import (PumpScheme, average_dipole, effective_isat, saturation_intensity, steady_state_populations,
                     transition_strengths)
from .constants import MW_PER_CM2
from .errors import ConfigError, NumericalError, UnknownFigure, VortexShapingError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PRESET = 0, 2, 3, 4


def _add_run_options(p):
    p.add_argument("--out", default=None, help="output directory (default: out/<name>)")
    p.add_argument("--seed", type=int, default=None, help="override the cloud seed")
    p.add_argument("--threads", type=int, default=1,
                   help="sweep points run in parallel; 1 is the deterministic reference mode")
    p.add_argument("--format", dest="formats", action="append", choices=["csv", "pgm", "json"],
                   help="output format (repeatable; default: all)")
    p.add_argument("--normalization", choices=["first", "each", "global"], default=None,
                   help="grey-scale reference of the PGM images: the first image of the sweep, each image "
                        "separately, or the brightest image")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vortexshaping", description="Cold-atom cloud shaping with vortex beams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON configuration or a bundled preset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON configuration")
    src.add_argument("--preset", help="bundled preset id (see 'presets')")
    _add_run_options(p)

    p = sub.add_parser("reproduce", help="run the preset for one figure")
    p.add_argument("figure_id")
    _add_run_options(p)

    sub.add_parser("presets", help="list bundled presets")

    p = sub.add_parser("sat", help="transition strengths, steady states and saturation intensities")
    p.add_argument("--json", action="store_true", help="print JSON instead of a text table")
    p.add_argument("--scheme", default="0.5,0,0.5", help="power fractions P+1,P0,P-1 (default 0.5,0,0.5)")
    return parser


def _sat_report(scheme: PumpScheme) -> dict:
    report = {"scheme": list(scheme.pq), "transitions": []}
    for Fp in (3, 2):
        table = transition_strengths(2, Fp)
        ss = steady_state_populations(2, Fp, scheme)
        entry = {
            "F": 2, "Fp": Fp,
            "strengths": {f"{m},{q}": table.get(m, q) for (m, q) in sorted(table.strengths)},
            "steady_state": dict(zip(range(-2, 3), ss.p)),
            "isat_mW_cm2": {},
        }
        for mode in ("uniform", "stretched", "steady_state"):
            entry["isat_mW_cm2"][mode] = effective_isat(2, Fp, scheme, mode) / MW_PER_CM2
        entry["dbar_sq_steady_state"] = average_dipole(table, ss, scheme)
        report["transitions"].append(entry)
    report["isat_reference_mW_cm2"] = saturation_intensity(0.5) / MW_PER_CM2
    return report


def _print_sat(report):
    print(f"pump scheme (P+1, P0, P-1) = {tuple(report['scheme'])}")
    print(f"reference I_sat (|d|^2 = 1/2): {report['isat_reference_mW_cm2']:.3f} mW/cm^2")
    for t in report["transitions"]:
        print(f"\nF=2 -> F'={t['Fp']}")
        print("  m_F   q=-1      q=0       q=+1")
        for m in range(-2, 3):
            cells = [t["strengths"].get(f"{m},{q}", 0.0) for q in (-1, 0, 1)]
            print(f"  {m:+d}  " + "  ".join(f"{c:8.5f}" for c in cells))
        pops = "  ".join(f"{m:+d}: {p:.4f}" for m, p in t["steady_state"].items())
        print(f"  steady state  {pops}")
        for mode, v in t["isat_mW_cm2"].items():
            print(f"  I_sat ({mode:12s}) = {v:7.3f} mW/cm^2")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            from .experiment import PRESETS

            for name, doc in PRESETS.items():
                n = len(doc["sweep"]["values"])
                print(f"{name:6s} {doc['scheme']:8s} sweep {doc['sweep']['parameter']} "
                      f"({n} point{'s' if n != 1 else ''})")
            return EXIT_OK
        if args.command == "sat":
            try:
                pq = tuple(float(v) for v in args.scheme.split(","))
                scheme = PumpScheme(pq)
            except ValueError as exc:
                raise ConfigError(str(exc), "--scheme") from exc
            report = _sat_report(scheme)
            if args.json:
                print(json.dumps(report, indent=2))
            else:
                _print_sat(report)
            return EXIT_OK

        from .experiment import PRESETS, load_config, reproduce, run

        if args.threads < 1:
            raise ConfigError("must be >= 1", "--threads")
        kw = dict(formats=args.formats, threads=args.threads, seed=args.seed, normalization=args.normalization)
        if args.command == "reproduce" or args.preset:
            fid = args.figure_id if args.command == "reproduce" else args.preset
            out = args.out or f"out/{fid}"
            manifest = reproduce(fid, out, **kw)
        else:
            doc = load_config(args.config)
            out = args.out or f"out/{doc.get('name', 'run')}"
            manifest = run(doc, out, **kw)
        print(f"wrote {len(manifest['files']) + 1} files to {out} (config {manifest['config_hash'][:12]})")
        return EXIT_OK
    except UnknownFigure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRESET
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, VortexShapingError, ValueError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
