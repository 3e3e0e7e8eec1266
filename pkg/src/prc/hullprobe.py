"""Heuristic hull-membership evidence via degree-bounded polynomial separation.

A query point q is *separated* from a sample cloud of K when some polynomial p
of total degree <= d satisfies |p(q)| > (1 + margin) * max over the cloud of
|p|.  Modulus constraints are relaxed to a regular g-gon (Re(e^{i phi} p) <= 1
for g uniformly spaced angles), which turns the search into a linear program
over the real and imaginary parts of the coefficients.

Everything here is EVIDENCE, never proof: hull membership is undecidable from
finite data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .certify import BoxRegion, CompactSpec, DiscRegion
from .trgeom import GRAPH, SUBMERSION, ProblemSystem


@dataclass(frozen=True)
class SampleCloud:
    """Points of the ambient space (C^{2n} for graphs, C^n for submersions)."""

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("empty sample cloud")

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass
class SeparationResult:
    separated: bool
    degree: int
    coefficients: np.ndarray          # complex, aligned with `monomials`
    monomials: tuple[tuple[int, ...], ...]
    ratio: float
    angles: int
    margin: float
    objective: float
    fragile: bool | None = None


class ProjectionError(RuntimeError):
    """Newton projection onto the level set failed for most seeds."""


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_compact(sys: ProblemSystem, K: CompactSpec, density: int,
                   seed: int = 0) -> SampleCloud:
    """Deterministic sample of K.

    Graph: a density-per-real-axis grid over the parameter region (pruned to
    discs), mapped through F; disc coordinates additionally contribute an
    8*density boundary ring.  Submersion: a seed lattice over the cap is
    Newton-projected onto rho = 0 and non-converged seeds are discarded.
    """
    if density < 2:
        raise ValueError("density must be >= 2 per real dimension")
    if K.kind != sys.kind:
        raise ValueError("compact kind does not match system kind")
    if sys.kind == GRAPH:
        return _sample_graph(sys, K, density, seed)
    return _sample_submersion(sys, K, density, seed)


def _coordinate_samples(reg: DiscRegion | BoxRegion, density: int) -> np.ndarray:
    if isinstance(reg, DiscRegion):
        if reg.radius == 0:
            return np.array([reg.center])
        ts = np.linspace(-reg.radius, reg.radius, density)
        xx, yy = np.meshgrid(ts, ts, indexing="ij")
        grid = xx.ravel() + 1j * yy.ravel()
        grid = grid[np.abs(grid) <= reg.radius] + reg.center
        theta = 2 * np.pi * np.arange(8 * density) / (8 * density)
        ring = reg.center + reg.radius * np.exp(1j * theta)
        return np.concatenate([grid, ring])
    xs = np.linspace(reg.re_lo, reg.re_hi, density) if reg.re_hi > reg.re_lo \
        else np.array([reg.re_lo])
    ys = np.linspace(reg.im_lo, reg.im_hi, density) if reg.im_hi > reg.im_lo \
        else np.array([reg.im_lo])
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    return (xx + 1j * yy).ravel()


def _sample_graph(sys: ProblemSystem, K: CompactSpec, density: int,
                  seed: int) -> SampleCloud:
    per_coord = [_coordinate_samples(reg, density) for reg in K.regions]
    if sys.n == 1:
        zs = per_coord[0][:, None]
    else:
        # stride the product lattice deterministically without materializing it
        budget = 20_000
        total = math.prod(len(p) for p in per_coord)
        stride = max(1, int(math.ceil(total / budget)))
        flat = np.arange(0, total, stride)
        idx = np.unravel_index(flat, tuple(len(p) for p in per_coord))
        zs = np.stack([per_coord[j][idx[j]] for j in range(sys.n)], axis=1)
    xs = np.empty((len(zs), 2 * sys.n))
    xs[:, 0::2] = zs.real
    xs[:, 1::2] = zs.imag
    fvals = np.stack([t.value.eval_batch(xs) for t in sys.tables], axis=1)
    pts = np.concatenate([zs, fvals], axis=1)
    return SampleCloud(points=pts, meta={"density": density, "seed": seed,
                                         "kind": GRAPH, "count": len(pts)})


def _sample_submersion(sys: ProblemSystem, K: CompactSpec, density: int,
                       seed: int) -> SampleCloud:
    n = sys.n
    rows = sys.rows
    per_axis = max(2, min(density, int(round(65536 ** (1.0 / (2 * n))))))
    axes = []
    for c, r in zip(K.cap_center, K.cap_radii):
        axes.append(np.linspace(c.real - r, c.real + r, per_axis))
        axes.append(np.linspace(c.imag - r, c.imag + r, per_axis))
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)

    xs = mesh.copy()
    tables = sys.tables

    def residuals(pts: np.ndarray) -> np.ndarray:
        return np.stack([t.value.eval_batch(pts).real for t in tables], axis=1)

    def jacobian(pts: np.ndarray) -> np.ndarray:
        # real Jacobian rows: d rho_l / dx_j = 2 Re(d rho_l/dz_j),
        #                     d rho_l / dy_j = -2 Im(d rho_l/dz_j)
        J = np.empty((len(pts), rows, 2 * n))
        for l, t in enumerate(tables):
            for j in range(n):
                dz = t.dz[j].eval_batch(pts)
                J[:, l, 2 * j] = 2.0 * dz.real
                J[:, l, 2 * j + 1] = -2.0 * dz.imag
        return J

    res = residuals(xs)
    err = np.max(np.abs(res), axis=1)
    active = err > 1e-13
    for _ in range(60):
        if not active.any():
            break
        J = jacobian(xs[active])
        step = np.linalg.pinv(J) @ res[active][:, :, None]
        step = step[:, :, 0]
        # damped update: halve until the residual norm decreases
        cand = xs[active] - step
        new_res = residuals(cand)
        worse = np.max(np.abs(new_res), axis=1) > np.max(np.abs(res[active]), axis=1)
        damp = step.copy()
        for _ in range(20):
            if not worse.any():
                break
            damp[worse] *= 0.5
            cand[worse] = xs[active][worse] - damp[worse]
            new_res[worse] = residuals(cand[worse])
            worse = np.max(np.abs(new_res), axis=1) > np.max(np.abs(res[active]), axis=1)
        xs[active] = cand
        res[active] = new_res
        err = np.max(np.abs(res), axis=1)
        active = err > 1e-13

    converged = err <= 1e-12
    frac = float(np.mean(converged))
    if frac < 0.5:
        raise ProjectionError(
            f"Newton projection converged for only {frac:.0%} of seeds")
    pts = xs[converged]
    zs = pts[:, 0::2] + 1j * pts[:, 1::2]
    keep = np.ones(len(zs), dtype=bool)
    for j, (c, r) in enumerate(zip(K.cap_center, K.cap_radii)):
        keep &= np.abs(zs[:, j] - c) <= r + 1e-9
    zs = zs[keep]
    if len(zs) == 0:
        raise ProjectionError("no projected seed landed inside the cap")
    # seeds differing only along the normal directions collapse to the same
    # manifold point; deduplicate on a fixed grid, order-stable
    rounded = np.round(np.column_stack([zs.real, zs.imag]), 4)
    _, idx = np.unique(rounded, axis=0, return_index=True)
    zs = zs[np.sort(idx)]
    return SampleCloud(points=zs, meta={"density": density, "seed": seed,
                                        "kind": SUBMERSION, "count": len(zs),
                                        "converged_fraction": frac})


# ---------------------------------------------------------------------------
# Separation probe
# ---------------------------------------------------------------------------

def monomial_basis(n_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples with total degree <= degree, constant included."""
    out = [e for e in itertools.product(range(degree + 1), repeat=n_vars)
           if sum(e) <= degree]
    out.sort()
    return tuple(out)


def _monomial_values(points: np.ndarray, monos) -> np.ndarray:
    vals = np.ones((len(points), len(monos)), dtype=np.complex128)
    for t, e in enumerate(monos):
        for v, k in enumerate(e):
            if k:
                vals[:, t] *= points[:, v] ** k
    return vals


def probe(cloud: SampleCloud, q: Sequence[complex], degree: int,
          angles: int = 16, margin: float = 0.05) -> SeparationResult:
    """Search for a degree-bounded polynomial separating q from the cloud.

    Solves, for each objective angle phi_0, the LP

        max Re(e^{i phi_0} p(q))
        s.t. Re(e^{i phi_a} p(s)) <= 1      for all cloud points s, all angles

    over the real/imag parts of the coefficients; the polygon relaxation means
    |p(s)| <= sec(pi/angles) on the cloud, and separation is declared when the
    best objective exceeds (1 + margin) * sec(pi/angles).
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if angles < 8:
        raise ValueError("angles must be >= 8")
    q = np.asarray(q, dtype=np.complex128)
    if q.shape != (cloud.ambient_dim,):
        raise ValueError(f"query point has dimension {q.shape}, "
                         f"cloud ambient is {cloud.ambient_dim}")

    monos = monomial_basis(cloud.ambient_dim, degree)
    mvals = _monomial_values(cloud.points, monos)          # (s, t)
    qvals = _monomial_values(q[None, :], monos)[0]         # (t,)
    nt = len(monos)

    phis = 2 * np.pi * np.arange(angles) / angles
    rot = np.exp(1j * phis)                                # (a,)
    # constraint rows: Re(e^{i phi} sum_t c_t M_t(s)) <= 1
    rotated = rot[None, :, None] * mvals[:, None, :]       # (s, a, t)
    A = np.empty((len(cloud.points) * angles, 2 * nt))
    A[:, 0::2] = rotated.real.reshape(-1, nt)
    A[:, 1::2] = -rotated.imag.reshape(-1, nt)
    b = np.ones(len(A))

    sec = 1.0 / math.cos(math.pi / angles)
    best_obj = -math.inf
    best_x = None
    for phi0 in rot:
        obj = np.empty(2 * nt)
        obj[0::2] = (phi0 * qvals).real
        obj[1::2] = -(phi0 * qvals).imag
        res = linprog(-obj, A_ub=A, b_ub=b, bounds=(None, None), method="highs")
        if res.status != 0:
            raise RuntimeError(f"LP solver failed with status {res.status}: "
                               f"{res.message}")
        if -res.fun > best_obj:
            best_obj = -res.fun
            best_x = res.x

    coeffs = best_x[0::2] + 1j * best_x[1::2]
    ratio = _ratio(coeffs, mvals, qvals)
    separated = best_obj > (1.0 + margin) * sec
    return SeparationResult(separated=bool(separated), degree=degree,
                            coefficients=coeffs, monomials=monos, ratio=ratio,
                            angles=angles, margin=margin, objective=float(best_obj))


def _ratio(coeffs: np.ndarray, mvals: np.ndarray, qvals: np.ndarray) -> float:
    cloud_max = float(np.max(np.abs(mvals @ coeffs)))
    at_q = float(np.abs(qvals @ coeffs))
    if cloud_max == 0.0:
        return math.inf if at_q > 0 else 0.0
    return at_q / cloud_max


def evaluate_polynomial(result: SeparationResult, points: np.ndarray) -> np.ndarray:
    """Evaluate the separating polynomial on arbitrary ambient points."""
    return _monomial_values(np.asarray(points, dtype=np.complex128),
                            result.monomials) @ result.coefficients


def fragility_check(result: SeparationResult, q: Sequence[complex],
                    dense_cloud: SampleCloud) -> SeparationResult:
    """Re-evaluate a separation on a denser cloud; flags it fragile if the
    ratio drops to 1 or below."""
    if not result.separated:
        result.fragile = None
        return result
    q = np.asarray(q, dtype=np.complex128)
    mvals = _monomial_values(dense_cloud.points, result.monomials)
    qvals = _monomial_values(q[None, :], result.monomials)[0]
    dense_ratio = _ratio(result.coefficients, mvals, qvals)
    result.fragile = bool(dense_ratio <= 1.0)
    return result
