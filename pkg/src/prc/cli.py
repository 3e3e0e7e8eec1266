"""Command-line front end: manifests in, certificates/reports/CSV profiles out.

Exit codes: 0 success (certify: PASS), 2 input error, 3 FAIL / not totally
real, 4 INCONCLUSIVE.  Set PRC_LOG to error|warn|info|debug for logging.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys as _sys

import numpy as np

from . import hullprobe, trgeom
from .certify import (DEFAULT_OPTIONS, ManifestError,
                      certificate_to_dict, certify as run_certify,
                      compact_z_bbox, load_manifest, reproduce_example,
                      sanitize_json)
from .trgeom import GRAPH, is_totally_real_graph, is_totally_real_submersion

log = logging.getLogger("prc")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FAIL = 3
EXIT_INCONCLUSIVE = 4

_DEG_DEFAULT = 6
_DENSITY_DEFAULT = 64
_ANGLES = 16


def _setup_logging():
    level = os.environ.get("PRC_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _dump_json(obj, out_path: str | None) -> None:
    text = json.dumps(sanitize_json(obj), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        _sys.stdout.write(text)


def _load_manifest_file(path: str):
    with open(path) as f:
        data = json.load(f)
    return load_manifest(data)


def _merged_options(manifest_options: dict, args) -> dict:
    opts = dict(DEFAULT_OPTIONS)
    opts.update(manifest_options)
    if args.max_depth is not None:
        opts["max_depth"] = args.max_depth
    if args.margin is not None:
        opts["margin"] = args.margin
    if args.inflation is not None:
        opts["inflation"] = args.inflation
    return opts


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_totally_real(args) -> int:
    sys_, K, _, _ = _load_manifest_file(args.manifest)
    lo, hi = compact_z_bbox(K)
    g = args.grid
    axes = [np.linspace(lo[i], hi[i], g) if hi[i] > lo[i] else np.array([lo[i]])
            for i in range(len(lo))]
    mesh = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    results = []
    all_ok = True
    witness = None
    for row in mesh:
        z = tuple(complex(row[2 * j], row[2 * j + 1]) for j in range(sys_.n))
        res = (is_totally_real_graph(sys_, z) if sys_.kind == GRAPH
               else is_totally_real_submersion(sys_, z))
        ok = bool(res["totally_real"])
        entry = {"z": [[c.real, c.imag] for c in z],
                 "sigma_min": res["sigma_min"], "totally_real": ok}
        if not ok and witness is None:
            witness = entry
        all_ok = all_ok and ok
        results.append(entry)
    report = {"grid": g, "points": len(results), "all_totally_real": all_ok,
              "results": results}
    if witness is not None:
        report["witness"] = witness
    _dump_json(report, args.out)
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_tube_profile(args) -> int:
    sys_, K, _, _ = _load_manifest_file(args.manifest)
    start = _parse_point(args.ray_from, sys_.n)
    end = _parse_point(args.ray_to, sys_.n)
    steps = args.steps
    if steps < 2:
        raise ManifestError("--steps must be >= 2")
    zs = [tuple(s + (e - s) * t / (steps - 1) for s, e in zip(start, end))
          for t in range(steps)]
    profile = trgeom.tube_profile(sys_, zs)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = []
    for j in range(sys_.n):
        header += [f"re_z{j+1}", f"im_z{j+1}"]
    header += ["m", "L", "radius"]
    writer.writerow(header)
    for pt in profile.points:
        row = []
        for c in pt.z:
            row += [repr(c.real), repr(c.imag)]
        radius = "inf" if math.isinf(pt.radius) else repr(pt.radius)
        row += [repr(pt.m), repr(pt.L), radius]
        writer.writerow(row)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        _sys.stdout.write(text)
    return EXIT_OK


def _parse_point(text: str, n: int) -> tuple[complex, ...]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    vals = [float(p) for p in parts]
    if len(vals) != 2 * n:
        raise ManifestError(
            f"point needs {2*n} comma-separated reals (re,im per coordinate), "
            f"got {len(vals)}")
    return tuple(complex(vals[2 * j], vals[2 * j + 1]) for j in range(n))


def cmd_certify(args) -> int:
    sys_, K, omega, manifest_opts = _load_manifest_file(args.manifest)
    opts = _merged_options(manifest_opts, args)
    cert = run_certify(sys_, K, omega,
                            max_depth=int(opts["max_depth"]),
                            margin=float(opts["margin"]),
                            inflation=float(opts["inflation"]),
                            threads=args.threads,
                            node_budget=int(opts["node_budget"]))
    _dump_json(certificate_to_dict(cert), args.out)
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL,
            "INCONCLUSIVE": EXIT_INCONCLUSIVE}[cert.verdict]


def cmd_hull_probe(args) -> int:
    sys_, K, _, _ = _load_manifest_file(args.manifest)
    ambient = 2 * sys_.n if sys_.kind == GRAPH else sys_.n
    q = _parse_point(args.q, ambient)
    cloud = hullprobe.sample_compact(sys_, K, density=args.density, seed=args.seed)
    result = hullprobe.probe(cloud, q, degree=args.degree, angles=_ANGLES,
                             margin=args.margin if args.margin is not None else 0.05)
    if result.separated:
        dense = hullprobe.sample_compact(sys_, K, density=args.density * 3,
                                         seed=args.seed)
        result = hullprobe.fragility_check(result, q, dense)
    report = {
        "hull_probe": {
            "evidence_only": True,
            "q": [[c.real, c.imag] for c in q],
            "degree": result.degree,
            "angles": result.angles,
            "margin": result.margin,
            "cloud_size": int(cloud.points.shape[0]),
            "separated": result.separated,
            "ratio": result.ratio,
            "objective": result.objective,
            "fragile": result.fragile,
            "coefficients": [[c.real, c.imag] for c in result.coefficients],
        }
    }
    _dump_json(report, args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    params = {}
    if args.max_depth is not None:
        params["max_depth"] = args.max_depth
    if args.margin is not None:
        params["margin"] = args.margin
    if args.inflation is not None and args.name == "wermer":
        params["inflation"] = args.inflation
    params["threads"] = args.threads
    report = reproduce_example(args.name, params)
    _dump_json(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="prc",
        description="Polynomial-convexity certification toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, manifest=True):
        if manifest:
            sp.add_argument("manifest", help="problem manifest (JSON)")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--max-depth", type=int, default=None)
        sp.add_argument("--margin", type=float, default=None)
        sp.add_argument("--inflation", type=float, default=None)
        sp.add_argument("--degree", type=int, default=_DEG_DEFAULT)
        sp.add_argument("--density", type=int, default=_DENSITY_DEFAULT)
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("totally-real", help="grid total-reality check")
    common(sp)
    sp.add_argument("--grid", type=int, default=41)
    sp.set_defaults(fn=cmd_totally_real)

    sp = sub.add_parser("tube-profile", help="CSV of m, L, radius along a ray")
    common(sp)
    sp.add_argument("--ray-from", required=True,
                    help="start point: re,im per coordinate")
    sp.add_argument("--ray-to", required=True, help="end point: re,im per coordinate")
    sp.add_argument("--steps", type=int, default=101)
    sp.set_defaults(fn=cmd_tube_profile)

    sp = sub.add_parser("certify", help="emit a certification certificate")
    common(sp)
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("hull-probe", help="polynomial separation probe")
    common(sp)
    sp.add_argument("--q", required=True,
                    help="query point: re,im per ambient coordinate")
    sp.set_defaults(fn=cmd_hull_probe)

    sp = sub.add_parser("reproduce", help="reproduce a worked example")
    common(sp, manifest=False)
    sp.add_argument("name", choices=["wermer", "graph_over_r2"])
    sp.set_defaults(fn=cmd_reproduce)
    return p


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.fn(args)
    except (ManifestError, FileNotFoundError, json.JSONDecodeError,
            ValueError) as exc:
        log.error("%s", exc)
        _sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
