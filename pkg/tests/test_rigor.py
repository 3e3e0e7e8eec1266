import math

import numpy as np
import pytest

from conftest import random_system, wermer_m_closed
from prc import ProblemSystem
from prc.intervals import ParamBox
from prc.realpoly import RealPoly
from prc.rigor import (FAILED, INCONCLUSIVE, PROVED, Region, bound_L_above,
                       bound_m_below, bound_residual_above, check_leaf,
                       verify_box, verify_totally_real)
from prc.trgeom import GRAPH, big_l_value, m_value


def _random_zbox(rng, n, width=1.0):
    lo = rng.uniform(-1.5, 1.0, size=2 * n)
    hi = lo + rng.uniform(0.05, width, size=2 * n)
    return ParamBox(n, lo, hi)


def _sample_m_L_res(sys_, box, rng, count):
    xs = box.sample_uniform(rng, count)
    n = sys_.n
    ms, Ls, rs = [], [], []
    for row in xs:
        z = tuple(complex(row[2 * j], row[2 * j + 1]) for j in range(n))
        ms.append(m_value(sys_, z))
        Ls.append(big_l_value(sys_, z))
        if sys_.kind == GRAPH:
            off = 2 * n
            w = [complex(row[off + 2 * j], row[off + 2 * j + 1]) for j in range(n)]
            vals = sys_.values_at(z)
            rs.append(float(sum(abs(vals[j] - w[j]) for j in range(n))))
        else:
            rs.append(float(sum(abs(v) for v in sys_.values_at(z))))
    return np.array(ms), np.array(Ls), np.array(rs)


# ---------------------------------------------------------------------------
# bound_m_below
# ---------------------------------------------------------------------------

def test_bound_m_wermer_small_box(wermer):
    box = ParamBox(1, [-0.05, -0.05], [0.05, 0.05])
    lb = bound_m_below(wermer, box)
    true_min = wermer_m_closed(0.05 * math.sqrt(2))
    assert 1.5 <= lb <= true_min


def test_bound_m_conjugate_graph():
    sys_ = ProblemSystem.graph(["conj(z1)"], 1)
    lb = bound_m_below(sys_, ParamBox(1, [-9, -9], [9, 9]))
    assert abs(lb - 1.0) <= 1e-9


def test_bound_m_holomorphic_zero():
    sys_ = ProblemSystem.graph(["z1"], 1)
    assert bound_m_below(sys_, ParamBox(1, [-1, -1], [1, 1])) == 0.0


def test_bound_m_example2_unit_box(example2):
    lb = bound_m_below(example2, ParamBox(2, [-1, -1, -1, -1], [1, 1, 1, 1]))
    assert lb >= 0.2


# ---------------------------------------------------------------------------
# bound_L_above
# ---------------------------------------------------------------------------

def test_bound_L_pluriharmonic_zero():
    sys_ = ProblemSystem.graph(["z1 + conj(z1)"], 1)
    assert bound_L_above(sys_, ParamBox(1, [-5, -5], [5, 5])) == 0.0


def test_bound_L_wermer_near_one(wermer):
    box = ParamBox(1, [1 - 1e-3, -1e-3], [1 + 1e-3, 1e-3])
    ub = bound_L_above(wermer, box)
    assert 2 * math.sqrt(10) <= ub <= 2 * math.sqrt(10) + 0.1


def test_bound_L_example2_unit_box(example2):
    ub = bound_L_above(example2, ParamBox(2, [-1, -1, -1, -1], [1, 1, 1, 1]))
    assert ub <= 0.2  # within 2x of the displayed bound 2*max(c,d) = 0.1


# ---------------------------------------------------------------------------
# bound_residual_above
# ---------------------------------------------------------------------------

def test_residual_degenerate_graph_box(wermer):
    z = 0.17 + 0.05j
    w = complex(wermer.values_at((z,))[0])
    box = ParamBox(1, [z.real, z.imag, w.real, w.imag],
                   [z.real, z.imag, w.real, w.imag])
    assert bound_residual_above(wermer, box) <= 1e-9


def test_residual_graph_needs_w(wermer):
    with pytest.raises(ValueError):
        bound_residual_above(wermer, ParamBox(1, [-1, -1], [1, 1]))


def test_residual_wermer_on_circle(wermer):
    # f vanishes on |z| = 1, so the residual against w = 0 is 0 there
    box = ParamBox(1, [1, 0, 0, 0], [1, 0, 0, 0])
    assert bound_residual_above(wermer, box) <= 1e-9


def test_residual_example2_shrinks_on_manifold(example2):
    rng = np.random.default_rng(21)
    for _ in range(20):
        x1, x2 = rng.uniform(-1, 1, 2)
        z = (complex(x1, 0.05 * (x1 ** 2 + x2 ** 3)),
             complex(x2, 0.05 * (x2 ** 2 + x1 ** 3)))
        w = 1e-4
        lo = [z[0].real - w, z[0].imag - w, z[1].real - w, z[1].imag - w]
        hi = [z[0].real + w, z[0].imag + w, z[1].real + w, z[1].imag + w]
        assert bound_residual_above(example2, ParamBox(2, lo, hi)) <= 1e-3


# ---------------------------------------------------------------------------
# soundness and monotonicity properties
# ---------------------------------------------------------------------------

def test_bounds_one_sided_random_suite():
    rng = np.random.default_rng(30)
    for _ in range(30):
        sys_ = random_system(rng)
        if sys_.kind == GRAPH:
            lo = list(rng.uniform(-1, 0.5, size=2 * sys_.n)) + \
                 list(rng.uniform(-2, 1, size=2 * sys_.n))
            hi = [a + rng.uniform(0.05, 0.8) for a in lo]
        else:
            lo = rng.uniform(-1, 0.5, size=2 * sys_.n)
            hi = lo + rng.uniform(0.05, 0.8, size=2 * sys_.n)
        box = ParamBox(sys_.n, lo, hi)
        m_lo = bound_m_below(sys_, box)
        L_up = bound_L_above(sys_, box)
        r_up = bound_residual_above(sys_, box)
        ms, Ls, rs = _sample_m_L_res(sys_, box, rng, 200)
        assert np.all(ms >= m_lo - 1e-9 * (1 + np.abs(ms)))
        assert np.all(Ls <= L_up + 1e-9 * (1 + np.abs(Ls)))
        assert np.all(rs <= r_up + 1e-9 * (1 + np.abs(rs)))


def test_bounds_monotone_under_subdivision():
    rng = np.random.default_rng(31)
    for _ in range(100):
        sys_ = random_system(rng)
        box = _random_zbox(rng, sys_.n)
        m_parent = bound_m_below(sys_, box)
        L_parent = bound_L_above(sys_, box)
        for child in box.split():
            assert bound_m_below(sys_, child) >= m_parent - 1e-12 * (1 + m_parent)
            assert bound_L_above(sys_, child) <= L_parent + 1e-12 * (1 + L_parent)


# ---------------------------------------------------------------------------
# verify_box
# ---------------------------------------------------------------------------

def test_verify_wermer_inflated_graph_box(wermer):
    width = 0.2
    zlo, zhi = [-width, -width], [width, width]
    fbox = RealPoly.from_expr(wermer.exprs[0], 1).eval_box(ParamBox(1, zlo, zhi))
    pad = 0.05
    box = ParamBox(1, zlo + [fbox.re.lo - pad, fbox.im.lo - pad],
                   zhi + [fbox.re.hi + pad, fbox.im.hi + pad])
    root = verify_box(wermer, box, max_depth=8)
    assert root.status == PROVED
    assert root.report.depth <= 8
    # every proved leaf replays against fresh bounds
    for leaf in root.leaves():
        assert check_leaf(wermer, leaf.box, margin=1e-6)


def test_verify_holomorphic_fails_with_witness():
    sys_ = ProblemSystem.graph(["z1"], 1)
    box = ParamBox(1, [-1, -1, -1, -1], [1, 1, 1, 1])
    root = verify_box(sys_, box, max_depth=6)
    assert root.status == FAILED
    assert root.witness is not None
    assert root.witness["residual"] >= root.witness["radius"]


def test_verify_depth_zero_inconclusive(wermer):
    box = ParamBox(1, [-0.35, -0.35, -0.5, -0.5], [0.35, 0.35, 0.5, 0.5])
    root = verify_box(wermer, box, max_depth=0)
    assert root.status == INCONCLUSIVE


def test_verify_graph_box_needs_w(wermer):
    with pytest.raises(ValueError):
        verify_box(wermer, ParamBox(1, [-1, -1], [1, 1]))


def test_verify_region_pruning(wermer):
    # an omega far outside the box region prunes everything
    box = ParamBox(1, [10, 10, 10, 10], [11, 11, 11, 11])
    region = Region(((0.0, 0.0, 0.5), (0.0, 0.0, 0.5)))
    root = verify_box(wermer, box, max_depth=3, region=region)
    assert root.status == PROVED
    assert root.outside


def test_verify_proved_leaves_hold_on_samples(wermer):
    """Monte Carlo: no sampled point of a proved leaf violates the tube."""
    rng = np.random.default_rng(33)
    width = 0.15
    zlo, zhi = [-width, -width], [width, width]
    fbox = RealPoly.from_expr(wermer.exprs[0], 1).eval_box(ParamBox(1, zlo, zhi))
    box = ParamBox(1, zlo + [fbox.re.lo - 0.03, fbox.im.lo - 0.03],
                   zhi + [fbox.re.hi + 0.03, fbox.im.hi + 0.03])
    root = verify_box(wermer, box, max_depth=10)
    assert root.status == PROVED
    from prc.trgeom import tube_radius

    leaves = [leaf for leaf in root.leaves() if not leaf.outside]
    stride = max(1, len(leaves) // 10)
    for leaf in leaves[::stride]:
        xs = leaf.box.sample_uniform(rng, 1000)
        for row in xs:
            z = (complex(row[0], row[1]),)
            w = complex(row[2], row[3])
            resid = abs(complex(wermer.values_at(z)[0]) - w)
            assert resid < tube_radius(wermer, z)


def test_verify_threads_match_single(wermer):
    width = 0.2
    zlo, zhi = [-width, -width], [width, width]
    fbox = RealPoly.from_expr(wermer.exprs[0], 1).eval_box(ParamBox(1, zlo, zhi))
    box = ParamBox(1, zlo + [fbox.re.lo - 0.05, fbox.im.lo - 0.05],
                   zhi + [fbox.re.hi + 0.05, fbox.im.hi + 0.05])
    r1 = verify_box(wermer, box, max_depth=8, threads=1)
    r4 = verify_box(wermer, box, max_depth=8, threads=4)
    l1 = [(leaf.box.lo, leaf.box.hi, leaf.status) for leaf in r1.leaves()]
    l4 = [(leaf.box.lo, leaf.box.hi, leaf.status) for leaf in r4.leaves()]
    assert l1 == l4
    assert r1.report == r4.report


# ---------------------------------------------------------------------------
# verify_totally_real
# ---------------------------------------------------------------------------

def test_verify_totally_real_wermer_disc(wermer):
    box = ParamBox(1, [-0.35, -0.35], [0.35, 0.35])
    region = Region(((0.0, 0.0, 0.35),))
    node = verify_totally_real(wermer, box, max_depth=10, region=region)
    assert node.status == PROVED
    assert node.min_m_lower() > 0


def test_verify_totally_real_fails_holomorphic():
    sys_ = ProblemSystem.graph(["z1^2"], 1)
    node = verify_totally_real(sys_, ParamBox(1, [-1, -1], [1, 1]), max_depth=5)
    assert node.status == FAILED
    assert node.witness is not None
