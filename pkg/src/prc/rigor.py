"""Rigorous interval bounds of m, L and residual sums over boxes, with
adaptive bisection.

Bounds are computed from the canonical-polynomial derivative tables of a
ProblemSystem:

* m_lower: Gershgorin lower bound of lambda_min(B* B) over the interval
  enclosure of the dbar-matrix B,
* L_upper: Frobenius-norm upper bound of the numerical radius of each Levi
  matrix enclosure,
* residual_upper: upper bound of the residual sum (graph boxes carry the w
  rectangles).

verify_box establishes the strict tube inclusion residual < m/(cL) on a box by
bisection of the widest coordinate; the comparison is division-free
(residual_upper * c * L_upper < m_lower * (1 - margin)) so an infinite radius
needs no special casing.  An optional region (product of per-coordinate discs,
i.e. the omega polydisc) prunes sub-boxes that lie wholly outside omega.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .intervals import INFLATION, ParamBox
from .realpoly import _eval_box_raw, mag_upper, power_tables
from .trgeom import (GRAPH, ProblemSystem, is_totally_real_graph,
                     is_totally_real_submersion, radius_factor)

log = logging.getLogger(__name__)

PROVED = "PROVED"
FAILED = "FAILED"
INCONCLUSIVE = "INCONCLUSIVE"

_VIOLATION_GUARD = 1e-9
_PRUNE_GUARD = 1.0 + 1e-12


@dataclass(frozen=True)
class BoundReport:
    m_lower: float
    L_upper: float
    residual_upper: float
    radius_lower: float
    depth: int
    leaf_count: int


@dataclass(frozen=True)
class Region:
    """Product of per-complex-coordinate open discs (the omega polydisc).

    discs[j] = (center_re, center_im, radius), aligned with the complex
    coordinates of the boxes being verified (z coordinates first, then w for
    graph problems).
    """

    discs: tuple[tuple[float, float, float], ...]

    def outside(self, lo: Sequence[float], hi: Sequence[float]) -> bool:
        """True when the box provably misses the region in some coordinate."""
        for j, (cx, cy, r) in enumerate(self.discs):
            if 2 * j + 1 >= len(lo):
                break
            dx = max(lo[2 * j] - cx, cx - hi[2 * j], 0.0)
            dy = max(lo[2 * j + 1] - cy, cy - hi[2 * j + 1], 0.0)
            if dx * dx + dy * dy >= (r * r) * _PRUNE_GUARD:
                return True
        return False

    def probe(self, lo: Sequence[float], hi: Sequence[float]) -> tuple[float, ...]:
        """A point of the box close to (normally inside) the region."""
        pt = []
        for j, (cx, cy, r) in enumerate(self.discs):
            if 2 * j + 1 >= len(lo):
                break
            pt.append(min(max(cx, lo[2 * j]), hi[2 * j]))
            pt.append(min(max(cy, lo[2 * j + 1]), hi[2 * j + 1]))
        for i in range(len(pt), len(lo)):
            pt.append(0.5 * (lo[i] + hi[i]))
        return tuple(pt)

    def clip(self, lo: Sequence[float], hi: Sequence[float]):
        """AABB of (box intersect region), or None when they are disjoint.

        Sound: the returned box contains every point of the box that lies in
        the region, and is contained in the input box.
        """
        lo = list(lo)
        hi = list(hi)
        for j, (cx, cy, r) in enumerate(self.discs):
            jx, jy = 2 * j, 2 * j + 1
            if jy >= len(lo):
                break
            dx = max(lo[jx] - cx, cx - hi[jx], 0.0)
            dy = max(lo[jy] - cy, cy - hi[jy], 0.0)
            if dx * dx + dy * dy >= (r * r) * _PRUNE_GUARD:
                return None
            sx = math.sqrt(max(r * r - dy * dy, 0.0)) * _PRUNE_GUARD
            sy = math.sqrt(max(r * r - dx * dx, 0.0)) * _PRUNE_GUARD
            lo[jx] = max(lo[jx], cx - sx)
            hi[jx] = min(hi[jx], cx + sx)
            lo[jy] = max(lo[jy], cy - sy)
            hi[jy] = min(hi[jy], cy + sy)
            if lo[jx] > hi[jx]:
                lo[jx] = hi[jx] = 0.5 * (lo[jx] + hi[jx])
            if lo[jy] > hi[jy]:
                lo[jy] = hi[jy] = 0.5 * (lo[jy] + hi[jy])
        return tuple(lo), tuple(hi)


@dataclass
class VerifyNode:
    """One node of the subdivision tree."""

    box: ParamBox
    depth: int
    status: str = INCONCLUSIVE
    report: BoundReport | None = None
    children: list["VerifyNode"] = field(default_factory=list)
    witness: dict | None = None
    outside: bool = False

    def leaves(self) -> Iterator["VerifyNode"]:
        if not self.children:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()


# ---------------------------------------------------------------------------
# Raw bound kernels
# ---------------------------------------------------------------------------

class _BoxBounds:
    """Shared power-table evaluation of all system polynomials over one box."""

    __slots__ = ("sys", "maxdeg")

    def __init__(self, sys: ProblemSystem):
        self.sys = sys
        deg = 0
        for t in sys.tables:
            deg = max(deg, t.value.total_degree())
            for p in t.dzbar:
                deg = max(deg, p.total_degree())
            for row in t.levi:
                for p in row:
                    deg = max(deg, p.total_degree())
        self.maxdeg = deg

    def tables_for(self, lo: Sequence[float], hi: Sequence[float]):
        nz = 2 * self.sys.n
        return power_tables(lo[:nz], hi[:nz], self.maxdeg)

    def m_lower(self, lo, hi, tabs) -> float:
        """Gershgorin lower bound of lambda_min(B* B) over the box.

        Diagonal entries are enclosed tightly via |entry|^2 = re^2 + im^2;
        off-diagonal entries of B* B are accumulated as rectangle sums of
        rectangle products so that sign cancellation between rows survives.
        """
        sys = self.sys
        n = sys.n
        ents = [[_eval_box_raw(t.dzbar[j], lo, hi, tabs) for j in range(n)]
                for t in sys.tables]
        los2 = [[0.0] * n for _ in range(sys.rows)]
        for r in range(sys.rows):
            for j in range(n):
                rlo, rhi, ilo, ihi = ents[r][j]
                re_mig = 0.0 if rlo <= 0.0 <= rhi else min(abs(rlo), abs(rhi))
                im_mig = 0.0 if ilo <= 0.0 <= ihi else min(abs(ilo), abs(ihi))
                los2[r][j] = (re_mig * re_mig + im_mig * im_mig) * (1.0 - INFLATION)
        best = math.inf
        for j in range(n):
            diag = sum(los2[r][j] for r in range(sys.rows))
            off = 0.0
            for i in range(n):
                if i == j:
                    continue
                # H[j,i] = sum_r conj(B[r,j]) * B[r,i]
                hr_lo = hr_hi = hi_lo = hi_hi = 0.0
                for r in range(sys.rows):
                    alo, ahi, blo, bhi = ents[r][j]
                    blo, bhi = -bhi, -blo  # conjugate
                    clo, chi, dlo, dhi = ents[r][i]
                    # real: a*c - b*d; imag: a*d + b*c
                    p = (alo * clo, alo * chi, ahi * clo, ahi * chi)
                    q = (blo * dlo, blo * dhi, bhi * dlo, bhi * dhi)
                    hr_lo += min(p) - max(q)
                    hr_hi += max(p) - min(q)
                    p = (alo * dlo, alo * dhi, ahi * dlo, ahi * dhi)
                    q = (blo * clo, blo * chi, bhi * clo, bhi * chi)
                    hi_lo += min(p) + min(q)
                    hi_hi += max(p) + max(q)
                off += math.hypot(max(abs(hr_lo), abs(hr_hi)),
                                  max(abs(hi_lo), abs(hi_hi)))
            best = min(best, diag - off * (1.0 + 4.0 * INFLATION))
        return max(0.0, best)

    def L_upper(self, lo, hi, tabs) -> float:
        sys = self.sys
        n = sys.n
        best = 0.0
        for t in sys.tables:
            fro2 = 0.0
            for j in range(n):
                for k in range(n):
                    p = t.levi[j][k]
                    if p.is_zero:
                        continue
                    m = mag_upper(_eval_box_raw(p, lo, hi, tabs))
                    fro2 += m * m
            best = max(best, math.sqrt(fro2) * (1.0 + INFLATION))
        return best

    def residual_upper(self, lo, hi, tabs) -> float:
        sys = self.sys
        total = 0.0
        if sys.kind == GRAPH:
            if len(lo) != 4 * sys.n:
                raise ValueError("graph residual bound needs w intervals on the box")
            off = 2 * sys.n
            for nu, t in enumerate(sys.tables):
                rlo, rhi, ilo, ihi = _eval_box_raw(t.value, lo, hi, tabs)
                wr_lo, wr_hi = lo[off + 2 * nu], hi[off + 2 * nu]
                wi_lo, wi_hi = lo[off + 2 * nu + 1], hi[off + 2 * nu + 1]
                dre = max(abs(rlo - wr_hi), abs(rhi - wr_lo))
                dim = max(abs(ilo - wi_hi), abs(ihi - wi_lo))
                total += math.hypot(dre, dim)
        else:
            for t in sys.tables:
                total += mag_upper(_eval_box_raw(t.value, lo, hi, tabs))
        return total * (1.0 + INFLATION)


def _radius_from(m_lower: float, L_upper: float, kind: str) -> float:
    if m_lower <= 0.0:
        return 0.0
    if L_upper == 0.0:
        return math.inf
    return m_lower / (radius_factor(kind) * L_upper)


# -- public one-shot bound API ------------------------------------------------

def bound_m_below(sys: ProblemSystem, box: ParamBox) -> float:
    """Sound lower bound of m_value over the box (0 when vacuous)."""
    bb = _BoxBounds(sys)
    return bb.m_lower(box.lo, box.hi, bb.tables_for(box.lo, box.hi))


def bound_L_above(sys: ProblemSystem, box: ParamBox) -> float:
    """Sound upper bound of big_l_value over the box (w(M) <= Frobenius norm)."""
    bb = _BoxBounds(sys)
    return bb.L_upper(box.lo, box.hi, bb.tables_for(box.lo, box.hi))


def bound_residual_above(sys: ProblemSystem, box: ParamBox) -> float:
    """Sound upper bound of the residual sum over the box."""
    bb = _BoxBounds(sys)
    return bb.residual_upper(box.lo, box.hi, bb.tables_for(box.lo, box.hi))


# ---------------------------------------------------------------------------
# Pointwise violation probe
# ---------------------------------------------------------------------------

def _probe_point(box: ParamBox, region: Region | None) -> tuple[float, ...]:
    if region is None:
        return box.center()
    return region.probe(box.lo, box.hi)


def _point_quantities(sys: ProblemSystem, pt: Sequence[float]) -> tuple[float, float]:
    """(residual, tube radius) at a real-coordinate point; low-overhead path."""
    n = sys.n
    xs = list(pt[:2 * n])
    vals = [t.value.eval_real(xs) for t in sys.tables]
    if sys.kind == GRAPH:
        off = 2 * n
        residual = sum(abs(vals[j] - complex(pt[off + 2 * j], pt[off + 2 * j + 1]))
                       for j in range(n))
    else:
        residual = sum(abs(v) for v in vals)

    B = [[t.dzbar[j].eval_real(xs) for j in range(n)] for t in sys.tables]
    if n == 1:
        # a column has a single singular value, its norm
        m = sum(abs(row[0]) ** 2 for row in B)
    elif n == 2:
        h00 = sum(abs(row[0]) ** 2 for row in B)
        h11 = sum(abs(row[1]) ** 2 for row in B)
        h01 = sum(row[0].conjugate() * row[1] for row in B)
        half = math.sqrt(((h00 - h11) / 2) ** 2 + abs(h01) ** 2)
        m = max((h00 + h11) / 2 - half, 0.0)
    else:
        import numpy as np

        s = np.linalg.svd(np.array(B), compute_uv=False)
        m = float(s[-1]) ** 2
    if m == 0.0:
        return residual, 0.0

    L = 0.0
    for t in sys.tables:
        lev = [[t.levi[j][k].eval_real(xs) for k in range(n)] for j in range(n)]
        if n == 1:
            w = abs(lev[0][0])
        elif sys.kind != GRAPH and n == 2:
            # Hermitian 2x2 closed form
            a = lev[0][0].real
            d = lev[1][1].real
            b = 0.5 * (lev[0][1] + lev[1][0].conjugate())
            half = math.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
            w = max(abs((a + d) / 2 + half), abs((a + d) / 2 - half))
        else:
            import numpy as np

            from .trgeom import numerical_radius

            w = numerical_radius(np.array(lev))
        L = max(L, w)
    radius = math.inf if L == 0.0 else m / (radius_factor(sys.kind) * L)
    return residual, radius


def _point_violates(sys: ProblemSystem, pt: Sequence[float]) -> dict | None:
    n = sys.n
    residual, radius = _point_quantities(sys, pt)
    if math.isinf(radius):
        return None
    if residual >= radius * (1.0 + _VIOLATION_GUARD):
        z = tuple(complex(pt[2 * j], pt[2 * j + 1]) for j in range(n))
        w = None
        if sys.kind == GRAPH:
            off = 2 * n
            w = tuple(complex(pt[off + 2 * j], pt[off + 2 * j + 1]) for j in range(n))
        return {
            "z": [[c.real, c.imag] for c in z],
            "w": None if w is None else [[c.real, c.imag] for c in w],
            "residual": residual,
            "radius": radius,
        }
    return None


# ---------------------------------------------------------------------------
# Adaptive verification
# ---------------------------------------------------------------------------

def _map_level(fn, items, pool: ThreadPoolExecutor | None):
    if pool is None or len(items) < 16:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // 64)
    return list(pool.map(fn, items, chunksize=chunk))


def _aggregate(node: VerifyNode, kind: str) -> None:
    """Bottom-up statuses and reports; deterministic and order-independent."""
    if not node.children:
        return
    for c in node.children:
        _aggregate(c, kind)
    statuses = [c.status for c in node.children]
    if FAILED in statuses:
        node.status = FAILED
        for c in node.children:
            if c.status == FAILED and c.witness is not None:
                node.witness = c.witness
                break
    elif INCONCLUSIVE in statuses:
        node.status = INCONCLUSIVE
    else:
        node.status = PROVED
    m_lo = math.inf
    L_up = 0.0
    r_up = 0.0
    depth = node.depth
    leaves = 0
    for c in node.children:
        rep = c.report
        if rep is None:
            continue
        leaves += rep.leaf_count
        depth = max(depth, rep.depth)
        if not c.outside:
            m_lo = min(m_lo, rep.m_lower)
            L_up = max(L_up, rep.L_upper)
            r_up = max(r_up, rep.residual_upper)
    # m_lo stays +inf for a fully pruned subtree
    node.report = BoundReport(m_lo, L_up, r_up, _radius_from(m_lo, L_up, kind),
                              depth, leaves)


def verify_box(sys: ProblemSystem, box: ParamBox, max_depth: int = 14,
               margin: float = 1e-6, region: Region | None = None,
               threads: int = 1, node_budget: int = 500_000) -> VerifyNode:
    """Prove residual < m/(cL) on the box (intersected with `region` if given).

    PROVED: the strict inequality holds with the given relative margin at
    every point of the box (or the box misses the region entirely).
    FAILED: a sample point violating the inequality is attached as witness.
    INCONCLUSIVE: bisection depth (or the node budget) was exhausted.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if sys.kind == GRAPH and not box.has_w:
        raise ValueError("graph verification needs w intervals on the box")
    bb = _BoxBounds(sys)
    c_factor = float(radius_factor(sys.kind))
    root = VerifyNode(box, 0)
    frontier = [root]
    total_nodes = 1
    failed = False
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            def evaluate(node: VerifyNode):
                lo, hi = node.box.lo, node.box.hi
                if region is not None:
                    clipped = region.clip(lo, hi)
                    if clipped is None:
                        return ("outside", None, None)
                    lo, hi = clipped
                    # shrink to the AABB of (box intersect region); sound and
                    # kills the overhang beyond omega at the boundary
                    node.box = ParamBox._new(node.box.n, lo, hi)
                tabs = bb.tables_for(lo, hi)
                m_lo = bb.m_lower(lo, hi, tabs)
                L_up = bb.L_upper(lo, hi, tabs)
                r_up = bb.residual_upper(lo, hi, tabs)
                if m_lo > 0.0 and r_up * (c_factor * L_up) < m_lo * (1.0 - margin):
                    return ("proved", (m_lo, L_up, r_up), None)
                wit = _point_violates(sys, _probe_point(node.box, region))
                if wit is not None:
                    return ("failed", (m_lo, L_up, r_up), wit)
                return ("split", (m_lo, L_up, r_up), None)

            results = _map_level(evaluate, frontier, pool)
            next_frontier: list[VerifyNode] = []
            level_failed = False
            for node, (kind_r, bounds, wit) in zip(frontier, results):
                if kind_r == "outside":
                    node.status = PROVED
                    node.outside = True
                    node.report = BoundReport(math.inf, 0.0, 0.0, math.inf,
                                              node.depth, 1)
                    continue
                m_lo, L_up, r_up = bounds
                node.report = BoundReport(m_lo, L_up, r_up,
                                          _radius_from(m_lo, L_up, sys.kind),
                                          node.depth, 1)
                if kind_r == "proved":
                    node.status = PROVED
                elif kind_r == "failed":
                    node.status = FAILED
                    node.witness = wit
                    level_failed = True
                else:
                    node.status = INCONCLUSIVE  # resolved by splitting below
                    next_frontier.append(node)
            failed = failed or level_failed
            if failed:
                break  # witnesses trump further refinement; tree stays partial
            splittable = []
            for node in next_frontier:
                if node.depth >= max_depth or total_nodes + 2 > node_budget:
                    continue
                splittable.append(node)
            if total_nodes + 2 * len(splittable) > node_budget:
                log.warning("verify_box node budget %d exhausted", node_budget)
                splittable = splittable[:max(0, (node_budget - total_nodes) // 2)]
            frontier = []
            for node in splittable:
                b1, b2 = node.box.split()
                node.children = [VerifyNode(b1, node.depth + 1),
                                 VerifyNode(b2, node.depth + 1)]
                frontier.extend(node.children)
                total_nodes += 2
    finally:
        if pool is not None:
            pool.shutdown()
    _aggregate(root, sys.kind)
    return root


def check_leaf(sys: ProblemSystem, box: ParamBox, margin: float,
               region: Region | None = None) -> bool:
    """Recompute the bounds on a recorded leaf box and re-run the tube test."""
    if region is not None and region.outside(box.lo, box.hi):
        return True
    bb = _BoxBounds(sys)
    tabs = bb.tables_for(box.lo, box.hi)
    m_lo = bb.m_lower(box.lo, box.hi, tabs)
    L_up = bb.L_upper(box.lo, box.hi, tabs)
    r_up = bb.residual_upper(box.lo, box.hi, tabs)
    c = float(radius_factor(sys.kind))
    return m_lo > 0.0 and r_up * (c * L_up) < m_lo * (1.0 - margin)


# ---------------------------------------------------------------------------
# Totally-real verification (m_lower > 0 over a z-region)
# ---------------------------------------------------------------------------

@dataclass
class TotallyRealNode:
    box: ParamBox
    depth: int
    status: str = INCONCLUSIVE
    m_lower: float = 0.0
    children: list["TotallyRealNode"] = field(default_factory=list)
    witness: dict | None = None
    outside: bool = False

    def leaves(self) -> Iterator["TotallyRealNode"]:
        if not self.children:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()

    def min_m_lower(self) -> float:
        vals = [leaf.m_lower for leaf in self.leaves() if not leaf.outside]
        return min(vals) if vals else math.inf

    def leaf_count(self) -> int:
        return sum(1 for _ in self.leaves())

    def max_depth_used(self) -> int:
        return max(leaf.depth for leaf in self.leaves())


def verify_totally_real(sys: ProblemSystem, box: ParamBox, max_depth: int = 14,
                        region: Region | None = None, threads: int = 1,
                        node_budget: int = 500_000) -> TotallyRealNode:
    """Prove sigma_min(B)^2 > 0 over the z-box via the Gershgorin lower bound."""
    bb = _BoxBounds(sys)
    root = TotallyRealNode(box, 0)
    frontier = [root]
    total_nodes = 1
    failed = False
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            def evaluate(node: TotallyRealNode):
                lo, hi = node.box.lo, node.box.hi
                if region is not None:
                    clipped = region.clip(lo, hi)
                    if clipped is None:
                        return ("outside", 0.0, None)
                    lo, hi = clipped
                    node.box = ParamBox._new(node.box.n, lo, hi)
                tabs = bb.tables_for(lo, hi)
                m_lo = bb.m_lower(lo, hi, tabs)
                if m_lo > 0.0:
                    return ("proved", m_lo, None)
                pt = _probe_point(node.box, region)
                z = tuple(complex(pt[2 * j], pt[2 * j + 1]) for j in range(sys.n))
                res = (is_totally_real_graph(sys, z) if sys.kind == GRAPH
                       else is_totally_real_submersion(sys, z))
                if not res["totally_real"]:
                    wit = {"z": [[c.real, c.imag] for c in z],
                           "sigma_min": res["sigma_min"]}
                    return ("failed", m_lo, wit)
                return ("split", m_lo, None)

            results = _map_level(evaluate, frontier, pool)
            next_frontier: list[TotallyRealNode] = []
            for node, (kind_r, m_lo, wit) in zip(frontier, results):
                node.m_lower = m_lo if kind_r != "outside" else math.inf
                if kind_r == "outside":
                    node.status = PROVED
                    node.outside = True
                elif kind_r == "proved":
                    node.status = PROVED
                elif kind_r == "failed":
                    node.status = FAILED
                    node.witness = wit
                    failed = True
                else:
                    next_frontier.append(node)
            if failed:
                break
            frontier = []
            for node in next_frontier:
                if node.depth >= max_depth or total_nodes + 2 > node_budget:
                    continue
                b1, b2 = node.box.split()
                node.children = [TotallyRealNode(b1, node.depth + 1),
                                 TotallyRealNode(b2, node.depth + 1)]
                frontier.extend(node.children)
                total_nodes += 2
    finally:
        if pool is not None:
            pool.shutdown()
    _tr_aggregate(root)
    return root


def _tr_aggregate(node: TotallyRealNode) -> None:
    if not node.children:
        return
    for c in node.children:
        _tr_aggregate(c)
    statuses = [c.status for c in node.children]
    if FAILED in statuses:
        node.status = FAILED
        for c in node.children:
            if c.status == FAILED and c.witness is not None:
                node.witness = c.witness
                break
    elif INCONCLUSIVE in statuses:
        node.status = INCONCLUSIVE
    else:
        node.status = PROVED
