"""End-to-end certificates: total reality on omega, K in omega, omega in tube.

A PASS certificate witnesses the containment chain

    K  subset  omega  subset  { residual sum < m/(cL) }

with omega an open polydisc (the only omega shape admitted in v1; the
sub-level function Psi is never materialized).  FAIL carries a concrete
witness point; INCONCLUSIVE arises only from subdivision-depth or node-budget
exhaustion.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rigor
from .intervals import INFLATION, ParamBox
from .realpoly import _eval_box_raw
from .rigor import (FAILED, INCONCLUSIVE, PROVED, Region, VerifyNode,
                    _BoxBounds, verify_box, verify_totally_real)
from .trgeom import (GRAPH, SUBMERSION, ProblemSystem, big_l_value,
                     bbar_matrix, m_value, tube_radius)


class ManifestError(ValueError):
    """Malformed problem manifest or unknown option keys."""


# ---------------------------------------------------------------------------
# Compact sets and omega polydiscs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscRegion:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")


@dataclass(frozen=True)
class BoxRegion:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def __post_init__(self):
        if self.re_lo > self.re_hi or self.im_lo > self.im_hi:
            raise ValueError("empty box region")


@dataclass(frozen=True)
class CompactSpec:
    """K for a graph system (graph of F over a parameter region in z) or for a
    submersion system (K = M intersected with a closed polydisc cap)."""

    kind: str
    regions: tuple[DiscRegion | BoxRegion, ...] = ()
    cap_center: tuple[complex, ...] = ()
    cap_radii: tuple[float, ...] = ()

    @staticmethod
    def graph_over(regions: Sequence[DiscRegion | BoxRegion]) -> CompactSpec:
        return CompactSpec(GRAPH, regions=tuple(regions))

    @staticmethod
    def submersion_cap(center: Sequence[complex], radii: Sequence[float]) -> CompactSpec:
        radii = tuple(float(r) for r in radii)
        if any(r <= 0 for r in radii):
            raise ValueError("cap radii must be positive")
        return CompactSpec(SUBMERSION, cap_center=tuple(complex(c) for c in center),
                           cap_radii=radii)


@dataclass(frozen=True)
class OmegaSpec:
    """Open polydisc: per-coordinate centers and radii (z part, plus w part
    for graph problems)."""

    z_center: tuple[complex, ...]
    z_radii: tuple[float, ...]
    w_center: tuple[complex, ...] | None = None
    w_radii: tuple[float, ...] | None = None

    def __post_init__(self):
        if any(r <= 0 for r in self.z_radii):
            raise ValueError("omega radii must be positive")
        if self.w_radii is not None and any(r <= 0 for r in self.w_radii):
            raise ValueError("omega radii must be positive")

    def region(self) -> Region:
        discs = [(c.real, c.imag, r) for c, r in zip(self.z_center, self.z_radii)]
        if self.w_center is not None:
            discs += [(c.real, c.imag, r) for c, r in zip(self.w_center, self.w_radii)]
        return Region(tuple(discs))

    def bounding_box(self, n: int) -> ParamBox:
        lo, hi = [], []
        for c, r in zip(self.z_center, self.z_radii):
            lo += [c.real - r, c.imag - r]
            hi += [c.real + r, c.imag + r]
        if self.w_center is not None:
            for c, r in zip(self.w_center, self.w_radii):
                lo += [c.real - r, c.imag - r]
                hi += [c.real + r, c.imag + r]
        return ParamBox(n, lo, hi)


@dataclass
class Certificate:
    verdict: str
    problem_hash: str
    problem: dict
    omega: OmegaSpec
    checks: dict
    options: dict
    tolerances: dict
    witness: dict | None = None


# ---------------------------------------------------------------------------
# Region helpers
# ---------------------------------------------------------------------------

def _region_bbox(regions: Sequence[DiscRegion | BoxRegion]) -> tuple[list[float], list[float]]:
    lo, hi = [], []
    for reg in regions:
        if isinstance(reg, DiscRegion):
            lo += [reg.center.real - reg.radius, reg.center.imag - reg.radius]
            hi += [reg.center.real + reg.radius, reg.center.imag + reg.radius]
        else:
            lo += [reg.re_lo, reg.im_lo]
            hi += [reg.re_hi, reg.im_hi]
    return lo, hi


def _region_discs(regions: Sequence[DiscRegion | BoxRegion]) -> Region | None:
    """Pruning region for the parameter set D (discs only; boxes are exact)."""
    discs = []
    any_disc = False
    for reg in regions:
        if isinstance(reg, DiscRegion):
            discs.append((reg.center.real, reg.center.imag, reg.radius))
            any_disc = True
        else:
            # enclosing disc of the box; never prunes more than the box itself
            cx = 0.5 * (reg.re_lo + reg.re_hi)
            cy = 0.5 * (reg.im_lo + reg.im_hi)
            r = math.hypot(reg.re_hi - reg.re_lo, reg.im_hi - reg.im_lo) / 2
            discs.append((cx, cy, max(r, 1e-300)))
    return Region(tuple(discs)) if any_disc else None


def _enclosing_disc(reg: DiscRegion | BoxRegion) -> tuple[complex, float]:
    if isinstance(reg, DiscRegion):
        return reg.center, reg.radius
    c = complex(0.5 * (reg.re_lo + reg.re_hi), 0.5 * (reg.im_lo + reg.im_hi))
    return c, math.hypot(reg.re_hi - reg.re_lo, reg.im_hi - reg.im_lo) / 2


def _grid_cells(lo: Sequence[float], hi: Sequence[float], per_axis: int,
                prune: Region | None):
    """Uniform grid cells over the box, pruned against the region."""
    dims = len(lo)
    steps = [(hi[i] - lo[i]) / per_axis if hi[i] > lo[i] else 0.0 for i in range(dims)]
    idx = [0] * dims
    while True:
        cl = [lo[i] + idx[i] * steps[i] if steps[i] else lo[i] for i in range(dims)]
        ch = [lo[i] + (idx[i] + 1) * steps[i] if steps[i] else hi[i] for i in range(dims)]
        if prune is None or not prune.outside(cl, ch):
            yield tuple(cl), tuple(ch)
        for i in range(dims):
            idx[i] += 1
            if idx[i] < (per_axis if steps[i] else 1):
                break
            idx[i] = 0
        else:
            return


def _image_grid(n: int) -> int:
    # fine enough that the enclosure slack is small against the inflation
    return {1: 64, 2: 12}.get(n, 4)


# ---------------------------------------------------------------------------
# suggest_omega
# ---------------------------------------------------------------------------

def suggest_omega(sys: ProblemSystem, K: CompactSpec, inflation: float) -> OmegaSpec:
    """Inflate K into a candidate omega polydisc.

    Graph: the z-polydisc encloses the parameter region D with `inflation`
    slack; the w-polydisc encloses a subdivided interval enclosure of F over D
    (region-pruned cells, so the enclosure tracks F(D) rather than the
    bounding-box image) with the same slack.
    """
    if inflation <= 0:
        raise ValueError("inflation must be positive")
    if K.kind != sys.kind:
        raise ValueError(f"compact kind {K.kind!r} does not match system {sys.kind!r}")
    if sys.kind == SUBMERSION:
        return OmegaSpec(z_center=K.cap_center,
                         z_radii=tuple(r + inflation for r in K.cap_radii))

    z_center, z_radii = [], []
    for reg in K.regions:
        c, r = _enclosing_disc(reg)
        z_center.append(c)
        z_radii.append(r + inflation)

    lo, hi = _region_bbox(K.regions)
    prune = _region_discs(K.regions)
    cells = list(_grid_cells(lo, hi, _image_grid(sys.n), prune))
    bounds = _BoxBounds(sys)
    w_center, w_radii = [], []
    for t in sys.tables:
        rects = [_eval_box_raw(t.value, cl, ch, bounds.tables_for(cl, ch))
                 for cl, ch in cells]
        c = complex(0.5 * (min(r[0] for r in rects) + max(r[1] for r in rects)),
                    0.5 * (min(r[2] for r in rects) + max(r[3] for r in rects)))
        rad = 0.0
        for rlo, rhi, ilo, ihi in rects:
            dre = max(abs(rlo - c.real), abs(rhi - c.real))
            dim = max(abs(ilo - c.imag), abs(ihi - c.imag))
            rad = max(rad, math.hypot(dre, dim))
        w_center.append(c)
        w_radii.append(rad + inflation)
    return OmegaSpec(tuple(z_center), tuple(z_radii), tuple(w_center), tuple(w_radii))


# ---------------------------------------------------------------------------
# K in omega
# ---------------------------------------------------------------------------

def _check_k_in_omega(sys: ProblemSystem, K: CompactSpec, omega: OmegaSpec,
                      max_depth: int) -> dict:
    if sys.kind == SUBMERSION:
        margins = []
        for c, r, oc, orad in zip(K.cap_center, K.cap_radii,
                                  omega.z_center, omega.z_radii):
            margins.append(orad - (abs(c - oc) + r))
        ok = all(m > 0 for m in margins)
        out = {"status": PROVED if ok else FAILED, "margins": margins}
        if not ok:
            j = margins.index(min(margins))
            c = K.cap_center[j] + K.cap_radii[j]
            out["witness"] = {"z": [[c.real, c.imag]], "coordinate": j}
        return out

    # graph: D inside omega_z ...
    z_margins = []
    for reg, oc, orad in zip(K.regions, omega.z_center, omega.z_radii):
        if isinstance(reg, DiscRegion):
            z_margins.append(orad - (abs(reg.center - oc) + reg.radius))
        else:
            corners = [complex(reg.re_lo, reg.im_lo), complex(reg.re_lo, reg.im_hi),
                       complex(reg.re_hi, reg.im_lo), complex(reg.re_hi, reg.im_hi)]
            z_margins.append(orad - max(abs(c - oc) for c in corners))
    if not all(m > 0 for m in z_margins):
        j = z_margins.index(min(z_margins))
        reg = K.regions[j]
        c, r = _enclosing_disc(reg)
        p = c + r
        return {"status": FAILED, "z_margins": z_margins,
                "witness": {"z": [[p.real, p.imag]], "coordinate": j}}

    # ... and F(D) inside omega_w, by adaptive enclosure refinement
    lo, hi = _region_bbox(K.regions)
    prune = _region_discs(K.regions)
    bb = _BoxBounds(sys)
    frontier = [(tuple(lo), tuple(hi), 0)]
    cells_checked = 0
    status = PROVED
    witness = None
    while frontier:
        cl, ch, depth = frontier.pop()
        if prune is not None:
            clipped = prune.clip(cl, ch)
            if clipped is None:
                continue
            cl, ch = clipped
        cells_checked += 1
        tabs = bb.tables_for(cl, ch)
        contained = True
        for t, oc, orad in zip(sys.tables, omega.w_center, omega.w_radii):
            rlo, rhi, ilo, ihi = _eval_box_raw(t.value, cl, ch, tabs)
            dre = max(abs(rlo - oc.real), abs(rhi - oc.real))
            dim = max(abs(ilo - oc.imag), abs(ihi - oc.imag))
            if math.hypot(dre, dim) >= orad:
                contained = False
                break
        if contained:
            continue
        # pointwise check before splitting: a graph point (over a parameter
        # inside D) outside omega_w is a definite failure
        mid = (prune.probe(cl, ch) if prune is not None
               else tuple(0.5 * (a + b) for a, b in zip(cl, ch)))
        z = tuple(complex(mid[2 * j], mid[2 * j + 1]) for j in range(sys.n))
        fv = sys.values_at(z)
        for nu, (oc, orad) in enumerate(zip(omega.w_center, omega.w_radii)):
            if abs(fv[nu] - oc) >= orad * (1.0 - 1e-12):
                status = FAILED
                witness = {"z": [[c.real, c.imag] for c in z],
                           "w": [[float(v.real), float(v.imag)] for v in fv],
                           "coordinate": nu}
                frontier = []
                break
        else:
            if depth >= max_depth:
                status = INCONCLUSIVE
                continue
            widths = [b - a for a, b in zip(cl, ch)]
            i = max(range(len(widths)), key=lambda t_: (widths[t_], -t_))
            m = 0.5 * (cl[i] + ch[i])
            l1, h1 = list(cl), list(ch)
            l2, h2 = list(cl), list(ch)
            h1[i] = m
            l2[i] = m
            frontier.append((tuple(l1), tuple(h1), depth + 1))
            frontier.append((tuple(l2), tuple(h2), depth + 1))
    out = {"status": status, "z_margins": z_margins, "cells_checked": cells_checked}
    if witness is not None:
        out["witness"] = witness
    return out


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

DEFAULT_OPTIONS = {"max_depth": 14, "margin": 1e-6, "inflation": 0.05,
                   "node_budget": 500_000}


def compact_z_bbox(K: CompactSpec) -> tuple[list[float], list[float]]:
    """Bounding box of the compact's z-side parameter region."""
    if K.kind == GRAPH:
        return _region_bbox(K.regions)
    lo, hi = [], []
    for c, r in zip(K.cap_center, K.cap_radii):
        lo += [c.real - r, c.imag - r]
        hi += [c.real + r, c.imag + r]
    return lo, hi


def certify(sys: ProblemSystem, K: CompactSpec, omega: OmegaSpec | None = None,
            *, max_depth: int = 14, margin: float = 1e-6, inflation: float = 0.05,
            threads: int = 1, node_budget: int = 500_000) -> Certificate:
    """Run the three checks of the certification chain and assemble a certificate.

    PASS requires (a) a positive rigorous lower bound for m over the
    z-projection of omega, (b) K inside omega by enclosure, and (c) the tube
    inclusion PROVED over omega.  FAIL carries a witness point;
    INCONCLUSIVE arises only from depth/budget exhaustion.
    """
    if K.kind != sys.kind:
        raise ManifestError(
            f"compact kind {K.kind!r} does not match system kind {sys.kind!r}")
    if omega is None:
        omega = suggest_omega(sys, K, inflation)
    if sys.kind == GRAPH and omega.w_center is None:
        raise ManifestError("graph omega needs a w polydisc")
    if sys.kind == SUBMERSION and omega.w_center is not None:
        raise ManifestError("submersion omega has no w polydisc")

    region = omega.region()
    z_region = Region(region.discs[:sys.n])
    z_lo, z_hi = [], []
    for c, r in zip(omega.z_center, omega.z_radii):
        z_lo += [c.real - r, c.imag - r]
        z_hi += [c.real + r, c.imag + r]
    z_box = ParamBox(sys.n, z_lo, z_hi)

    tr = verify_totally_real(sys, z_box, max_depth=max_depth, region=z_region,
                             threads=threads, node_budget=node_budget)
    tr_check = {
        "status": tr.status,
        "m_lower": tr.min_m_lower(),
        "leaf_count": tr.leaf_count(),
        "depth": tr.max_depth_used(),
        "leaves": [_tr_leaf_dict(leaf) for leaf in tr.leaves()],
    }
    if tr.witness is not None:
        tr_check["witness"] = tr.witness

    k_check = _check_k_in_omega(sys, K, omega, max_depth)

    tube_root = verify_box(sys, omega.bounding_box(sys.n), max_depth=max_depth,
                           margin=margin, region=region, threads=threads,
                           node_budget=node_budget)
    tube_check = {
        "status": tube_root.status,
        "report": _report_dict(tube_root.report),
        "leaves": [_leaf_dict(leaf) for leaf in tube_root.leaves()],
    }
    if tube_root.witness is not None:
        tube_check["witness"] = tube_root.witness

    checks = {"totally_real": tr_check, "k_in_omega": k_check,
              "omega_in_tube": tube_check}
    statuses = [tr_check["status"], k_check["status"], tube_check["status"]]
    if all(s == PROVED for s in statuses):
        verdict = "PASS"
        witness = None
    elif FAILED in statuses:
        verdict = "FAIL"
        witness = None
        for name in ("totally_real", "k_in_omega", "omega_in_tube"):
            w = checks[name].get("witness")
            if checks[name]["status"] == FAILED and w is not None:
                witness = dict(w)
                witness["check"] = name
                break
    else:
        verdict = "INCONCLUSIVE"
        witness = None

    problem = problem_manifest(sys, K)
    options = {"max_depth": max_depth, "margin": margin, "inflation": inflation,
               "node_budget": node_budget}
    tolerances = {
        "epsilon_inflation_per_op": INFLATION,
        "violation_guard": 1e-9,
        "totally_real_tol": "1e-8*(1+sigma_max)",
    }
    return Certificate(verdict=verdict, problem_hash=manifest_hash(problem),
                       problem=problem, omega=omega, checks=checks,
                       options=options, tolerances=tolerances, witness=witness)


def _report_dict(rep: rigor.BoundReport | None) -> dict | None:
    if rep is None:
        return None
    return {"m_lower": rep.m_lower, "L_upper": rep.L_upper,
            "residual_upper": rep.residual_upper, "radius_lower": rep.radius_lower,
            "depth": rep.depth, "leaf_count": rep.leaf_count}


def _leaf_dict(leaf: VerifyNode) -> dict:
    d = {"box": [list(pair) for pair in zip(leaf.box.lo, leaf.box.hi)],
         "status": "OUTSIDE" if leaf.outside else leaf.status,
         "depth": leaf.depth}
    if not leaf.outside and leaf.report is not None:
        d["m_lower"] = leaf.report.m_lower
        d["L_upper"] = leaf.report.L_upper
        d["residual_upper"] = leaf.report.residual_upper
    return d


def _tr_leaf_dict(leaf) -> dict:
    return {"box": [list(pair) for pair in zip(leaf.box.lo, leaf.box.hi)],
            "status": "OUTSIDE" if leaf.outside else leaf.status,
            "depth": leaf.depth,
            "m_lower": leaf.m_lower if not leaf.outside else None}


# ---------------------------------------------------------------------------
# Manifests, hashing, JSON
# ---------------------------------------------------------------------------

def problem_manifest(sys: ProblemSystem, K: CompactSpec) -> dict:
    from .expr import format_expr

    m = {"kind": sys.kind, "n": sys.n,
         "functions": [format_expr(e) for e in sys.exprs]}
    if sys.kind == SUBMERSION:
        m["k"] = sys.k
        m["compact"] = {"cap": {
            "center": [[c.real, c.imag] for c in K.cap_center],
            "radii": list(K.cap_radii)}}
    else:
        m["compact"] = {"region": [_region_to_json(r) for r in K.regions]}
    return m


def _region_to_json(reg: DiscRegion | BoxRegion) -> dict:
    if isinstance(reg, DiscRegion):
        return {"shape": "disc", "center": [reg.center.real, reg.center.imag],
                "radius": reg.radius}
    return {"shape": "box", "re": [reg.re_lo, reg.re_hi], "im": [reg.im_lo, reg.im_hi]}


def manifest_hash(problem: dict) -> str:
    payload = json.dumps(sanitize_json(problem), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def sanitize_json(obj):
    """Replace non-finite floats with the strings "inf"/"-inf"/"nan"."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: sanitize_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize_json(v) for v in obj]
    return obj


def _parse_float_maybe(x):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    if x == "nan":
        return math.nan
    return x


def load_manifest(data: dict) -> tuple[ProblemSystem, CompactSpec, OmegaSpec | None, dict]:
    """Validate and decode a problem manifest dictionary."""
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    allowed = {"kind", "n", "k", "functions", "compact", "omega", "options"}
    unknown = set(data) - allowed
    if unknown:
        raise ManifestError(f"unknown manifest keys: {sorted(unknown)}")
    try:
        kind = data["kind"]
        n = int(data["n"])
        functions = list(data["functions"])
    except KeyError as exc:
        raise ManifestError(f"manifest missing key: {exc}") from exc
    if kind not in (GRAPH, SUBMERSION):
        raise ManifestError(f"unknown kind {kind!r}")
    try:
        if kind == GRAPH:
            if "k" in data:
                raise ManifestError("graph manifests take no 'k'")
            sys_ = ProblemSystem.graph(functions, n)
        else:
            if "k" not in data:
                raise ManifestError("submersion manifests need 'k'")
            sys_ = ProblemSystem.submersion(functions, n, int(data["k"]))
    except ManifestError:
        raise
    except Exception as exc:
        raise ManifestError(f"bad system definition: {exc}") from exc

    compact = data.get("compact")
    if not isinstance(compact, dict):
        raise ManifestError("manifest needs a 'compact' object")
    try:
        if kind == GRAPH:
            regions = []
            for rj in compact["region"]:
                if rj.get("shape") == "disc":
                    regions.append(DiscRegion(complex(rj["center"][0], rj["center"][1]),
                                              float(rj["radius"])))
                elif rj.get("shape") == "box":
                    regions.append(BoxRegion(float(rj["re"][0]), float(rj["re"][1]),
                                             float(rj["im"][0]), float(rj["im"][1])))
                else:
                    raise ManifestError(f"unknown region shape {rj.get('shape')!r}")
            if len(regions) != n:
                raise ManifestError(f"graph compact needs {n} region entries")
            K = CompactSpec.graph_over(regions)
        else:
            cap = compact["cap"]
            center = [complex(c[0], c[1]) for c in cap["center"]]
            radii = [float(r) for r in cap["radii"]]
            if len(center) != n or len(radii) != n:
                raise ManifestError(f"cap needs {n} centers and radii")
            K = CompactSpec.submersion_cap(center, radii)
    except ManifestError:
        raise
    except Exception as exc:
        raise ManifestError(f"bad compact spec: {exc}") from exc

    omega = None
    if "omega" in data and data["omega"] is not None:
        omega = omega_from_json(data["omega"], kind)

    options = dict(data.get("options") or {})
    unknown = set(options) - set(DEFAULT_OPTIONS)
    if unknown:
        raise ManifestError(f"unknown option keys: {sorted(unknown)}")
    return sys_, K, omega, options


def omega_to_json(omega: OmegaSpec) -> dict:
    out = {"z": {"center": [[c.real, c.imag] for c in omega.z_center],
                 "radii": list(omega.z_radii)}}
    if omega.w_center is not None:
        out["w"] = {"center": [[c.real, c.imag] for c in omega.w_center],
                    "radii": list(omega.w_radii)}
    return out


def omega_from_json(data: dict, kind: str) -> OmegaSpec:
    try:
        unknown = set(data) - {"z", "w"}
        if unknown:
            raise ManifestError(f"unknown omega keys: {sorted(unknown)} "
                                "(v1 admits polydisc omegas only)")
        zc = tuple(complex(c[0], c[1]) for c in data["z"]["center"])
        zr = tuple(float(r) for r in data["z"]["radii"])
        wc = wr = None
        if kind == GRAPH:
            wc = tuple(complex(c[0], c[1]) for c in data["w"]["center"])
            wr = tuple(float(r) for r in data["w"]["radii"])
        elif "w" in data:
            raise ManifestError("submersion omega has no w polydisc")
        return OmegaSpec(zc, zr, wc, wr)
    except ManifestError:
        raise
    except Exception as exc:
        raise ManifestError(f"bad omega spec: {exc}") from exc


def certificate_to_dict(cert: Certificate) -> dict:
    return sanitize_json({
        "format": "prc-certificate/1",
        "verdict": cert.verdict,
        "problem_hash": cert.problem_hash,
        "problem": cert.problem,
        "omega": omega_to_json(cert.omega),
        "checks": cert.checks,
        "options": cert.options,
        "tolerances": cert.tolerances,
        "witness": cert.witness,
    })


def certificate_from_dict(data: dict) -> Certificate:
    def unsan(obj):
        if isinstance(obj, dict):
            return {k: unsan(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [unsan(v) for v in obj]
        return _parse_float_maybe(obj)

    data = unsan(data)
    kind = data["problem"]["kind"]
    return Certificate(
        verdict=data["verdict"],
        problem_hash=data["problem_hash"],
        problem=data["problem"],
        omega=omega_from_json(data["omega"], kind),
        checks=data["checks"],
        options=data["options"],
        tolerances=data["tolerances"],
        witness=data.get("witness"),
    )


def replay_certificate(cert: Certificate) -> bool:
    """Re-run every recorded leaf of a PASS certificate against fresh bounds."""
    if cert.verdict != "PASS":
        raise ValueError("only PASS certificates replay")
    sys_, K, _, _ = load_manifest(dict(cert.problem, options=None))
    region = cert.omega.region()
    z_region = Region(region.discs[:sys_.n])
    margin = float(cert.options["margin"])
    bb = _BoxBounds(sys_)
    for leaf in cert.checks["omega_in_tube"]["leaves"]:
        lo = [float(_parse_float_maybe(p[0])) for p in leaf["box"]]
        hi = [float(_parse_float_maybe(p[1])) for p in leaf["box"]]
        box = ParamBox(sys_.n, lo, hi)
        if leaf["status"] == "OUTSIDE":
            if not region.outside(box.lo, box.hi):
                return False
            continue
        if leaf["status"] != PROVED:
            return False
        if not rigor.check_leaf(sys_, box, margin, region=None):
            return False
    for leaf in cert.checks["totally_real"]["leaves"]:
        lo = [float(_parse_float_maybe(p[0])) for p in leaf["box"]]
        hi = [float(_parse_float_maybe(p[1])) for p in leaf["box"]]
        if leaf["status"] == "OUTSIDE":
            if not z_region.outside(lo, hi):
                return False
            continue
        if leaf["status"] != PROVED:
            return False
        tabs = bb.tables_for(lo, hi)
        if not bb.m_lower(lo, hi, tabs) > 0.0:
            return False
    return True


# ---------------------------------------------------------------------------
# Example reproductions
# ---------------------------------------------------------------------------

WERMER_F = "-(1+i)*conj(z1) + i*z1*conj(z1)^2 + z1^2*conj(z1)^3"


def wermer_system() -> ProblemSystem:
    return ProblemSystem.graph([WERMER_F], 1)


def wermer_compact(r: float) -> CompactSpec:
    return CompactSpec.graph_over([DiscRegion(0j, r)])


def graph_over_r2_system(c: float = 0.05, d: float = 0.05) -> ProblemSystem:
    rho1 = f"Im(z1) - {c!r}*(Re(z1)^2 + Re(z2)^3)"
    rho2 = f"Im(z2) - {d!r}*(Re(z2)^2 + Re(z1)^3)"
    return ProblemSystem.submersion([rho1, rho2], n=2, k=2)


def _wermer_m_closed(r: float) -> float:
    return 9 * r ** 8 - 2 * r ** 4 - 4 * r ** 2 + 2


def _wermer_L_closed(r: float) -> float:
    return 2 * r * math.sqrt(1 + 9 * r ** 4)


def _cert_summary(cert: Certificate) -> dict:
    rep = cert.checks["omega_in_tube"].get("report") or {}
    return {
        "verdict": cert.verdict,
        "m_lower": rep.get("m_lower"),
        "L_upper": rep.get("L_upper"),
        "residual_upper": rep.get("residual_upper"),
        "radius_lower": rep.get("radius_lower"),
        "leaf_count": rep.get("leaf_count"),
        "depth": rep.get("depth"),
        "omega": omega_to_json(cert.omega),
        "witness": cert.witness,
    }


def reproduce_example(name: str, params: dict | None = None) -> dict:
    """Reproduce a worked example end to end and report discrepancies."""
    params = dict(params or {})
    if name == "wermer":
        return _reproduce_wermer(params)
    if name == "graph_over_r2":
        return _reproduce_graph_over_r2(params)
    raise ValueError(f"unknown example {name!r}; choose 'wermer' or 'graph_over_r2'")


def _reproduce_wermer(params: dict) -> dict:
    inflation = float(params.pop("inflation", 0.05))
    max_depth = int(params.pop("max_depth", 30))
    margin = float(params.pop("margin", 1e-6))
    threads = int(params.pop("threads", 1))
    # marginal radii burn the whole budget before going INCONCLUSIVE, so the
    # search budget caps the per-probe cost; 150k is ~4x what r = 0.3 needs
    node_budget = int(params.pop("node_budget", 150_000))
    resolution = float(params.pop("resolution", 1e-3))
    if params:
        raise ValueError(f"unknown wermer params: {sorted(params)}")

    sys_ = wermer_system()
    r_max_stated = 1.0 / math.sqrt(3.0)

    spot = []
    for r in (0.1, 0.3, r_max_stated, 1.0):
        z = (complex(r, 0.0),)
        m = m_value(sys_, z)
        L = big_l_value(sys_, z)
        dfdzbar = complex(bbar_matrix(sys_, z)[0, 0])
        closed_df = -(1 + 1j) + 2j * r * r + 3 * r ** 4
        spot.append({
            "r": r,
            "m": m, "m_closed_form": _wermer_m_closed(r),
            "L": L, "L_closed_form": _wermer_L_closed(r),
            "dfdzbar": [dfdzbar.real, dfdzbar.imag],
            "dfdzbar_closed_form": [closed_df.real, closed_df.imag],
            "radius": tube_radius(sys_, z),
        })

    # recompute inf m / sup L over |z| <= 1/sqrt(3); both are radial
    rs = np.linspace(0.0, r_max_stated, 2001)
    m_vals = np.array([m_value(sys_, (complex(r, 0),)) for r in rs])
    L_vals = np.array([big_l_value(sys_, (complex(r, 0),)) for r in rs])
    inf_m = float(m_vals.min())
    sup_L = float(L_vals.max())
    exact_inf_m = Fraction(9, 81) - Fraction(2, 9) - Fraction(4, 3) + 2
    exact_sup_L = 2 * math.sqrt(2) / math.sqrt(3)
    stated_inf_m = 1.0
    stated_sup_L = 4.0 / (3.0 * 3.0 ** 0.25)

    certs = {}
    for r in (0.3, 1.0):
        cert = certify(sys_, wermer_compact(r), max_depth=max_depth, margin=margin,
                       inflation=inflation, threads=threads, node_budget=node_budget)
        certs[f"r={r!r}"] = _cert_summary(cert)

    # binary search for the largest certifiable r at the configured depth
    def passes(r: float) -> bool:
        cert = certify(sys_, wermer_compact(r), max_depth=max_depth, margin=margin,
                       inflation=inflation, threads=threads, node_budget=node_budget)
        return cert.verdict == "PASS"

    lo_r, hi_r = 0.0, r_max_stated
    if passes(hi_r):
        max_r = hi_r
    else:
        if certs["r=0.3"]["verdict"] == "PASS":
            lo_r = 0.3
        elif passes(0.05):
            lo_r = 0.05
        while hi_r - lo_r > resolution:
            mid = 0.5 * (lo_r + hi_r)
            if passes(mid):
                lo_r = mid
            else:
                hi_r = mid
        max_r = lo_r

    return sanitize_json({
        "example": "wermer",
        "function": WERMER_F,
        "params": {"inflation": inflation, "max_depth": max_depth,
                   "margin": margin, "resolution": resolution,
                   "node_budget": node_budget},
        "closed_form_spot_checks": spot,
        "stated": {"inf_m": stated_inf_m, "sup_L": stated_sup_L,
                   "certified_r_range": [0.0, r_max_stated]},
        "recomputed": {"inf_m": inf_m, "sup_L": sup_L,
                       "inf_m_from_closed_form_at_r_max": float(exact_inf_m),
                       "inf_m_exact_fraction": f"{exact_inf_m.numerator}/{exact_inf_m.denominator}",
                       "sup_L_closed_form": exact_sup_L},
        "discrepancy": {
            "inf_m_matches_stated": abs(inf_m - stated_inf_m) <= 1e-6 * (1 + stated_inf_m),
            "sup_L_matches_stated": abs(sup_L - stated_sup_L) <= 1e-6 * (1 + stated_sup_L),
            "note": ("recomputed inf m and sup L over |z| <= 1/sqrt(3) disagree with "
                     "the stated values; this report carries the recomputed numbers "
                     "and the certified range below is derived from them"),
        },
        "certifications": certs,
        "max_certifiable_r": max_r,
    })


def _reproduce_graph_over_r2(params: dict) -> dict:
    c = float(params.pop("c", 0.05))
    d = float(params.pop("d", 0.05))
    cap_radius = float(params.pop("cap_radius", 1.0))
    eps = float(params.pop("eps", 0.04))
    max_depth = int(params.pop("max_depth", 30))
    margin = float(params.pop("margin", 1e-6))
    threads = int(params.pop("threads", 1))
    node_budget = int(params.pop("node_budget", 400_000))
    if params:
        raise ValueError(f"unknown graph_over_r2 params: {sorted(params)}")
    if not (0 <= c <= 0.05 and 0 <= d <= 0.05 and max(c, d) > 0):
        raise ValueError("c, d must lie in [0, 1/20] with max(c, d) > 0")

    sys_ = graph_over_r2_system(c, d)
    B0 = bbar_matrix(sys_, (0j, 0j))
    unit_box = ParamBox(2, [-1.0, -1.0, -1.0, -1.0], [1.0, 1.0, 1.0, 1.0])
    L_up = rigor.bound_L_above(sys_, unit_box)
    m_lo = rigor.bound_m_below(sys_, unit_box)

    K = CompactSpec.submersion_cap((0j, 0j), (cap_radius, cap_radius))
    cert = certify(sys_, K, max_depth=max_depth, margin=margin, inflation=eps,
                   threads=threads, node_budget=node_budget)

    return sanitize_json({
        "example": "graph_over_r2",
        "params": {"c": c, "d": d, "cap_radius": cap_radius, "eps": eps,
                   "max_depth": max_depth, "margin": margin,
                   "node_budget": node_budget},
        "bbar_at_origin": [[[x.real, x.imag] for x in row] for row in B0.tolist()],
        "stated": {"L_bound": 2 * max(c, d), "m_bound": 0.25,
                   "tube_lower_bound": 1.0 / (8.0 * max(c, d))},
        "rigorous_unit_box_bounds": {"L_upper": L_up, "m_lower": m_lo},
        "certification": _cert_summary(cert),
    })
