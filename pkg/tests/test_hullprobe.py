import numpy as np
import pytest

from prc.certify import BoxRegion, CompactSpec, wermer_compact
from prc.hullprobe import (SampleCloud, fragility_check, monomial_basis, probe,
                           sample_compact)


@pytest.fixture(scope="module")
def circle_cloud():
    theta = 2 * np.pi * np.arange(360) / 360
    return SampleCloud(points=np.exp(1j * theta)[:, None])


@pytest.fixture(scope="module")
def wermer_cloud(wermer):
    return sample_compact(wermer, wermer_compact(1.0), density=40)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_wermer_on_graph(wermer, wermer_cloud):
    pts = wermer_cloud.points
    assert pts.shape[1] == 2
    assert len(pts) >= 1000
    xs = np.column_stack([pts[:, 0].real, pts[:, 0].imag])
    fvals = wermer.tables[0].value.eval_batch(xs)
    assert np.max(np.abs(fvals - pts[:, 1])) <= 1e-9
    # the boundary ring is present: many points on |z| = 1
    assert np.sum(np.abs(np.abs(pts[:, 0]) - 1.0) < 1e-12) >= 8 * 40


def test_sample_example2_projects_onto_manifold(example2):
    K = CompactSpec.submersion_cap((0j, 0j), (1.0, 1.0))
    cloud = sample_compact(example2, K, density=40)
    pts = cloud.points
    assert pts.shape[1] == 2
    xs = np.column_stack([pts[:, 0].real, pts[:, 0].imag,
                          pts[:, 1].real, pts[:, 1].imag])
    for t in example2.tables:
        assert np.max(np.abs(t.value.eval_batch(xs))) <= 1e-9
    assert cloud.meta["converged_fraction"] >= 0.5


def test_sample_degenerate_point(wermer):
    K = CompactSpec.graph_over([BoxRegion(0.25, 0.25, -0.1, -0.1)])
    cloud = sample_compact(wermer, K, density=2)
    assert len(cloud.points) == 1
    z = cloud.points[0, 0]
    assert z == 0.25 - 0.1j


def test_sample_rejects_tiny_density(wermer):
    with pytest.raises(ValueError):
        sample_compact(wermer, wermer_compact(0.5), density=1)


def test_sample_submersion_projection_failure():
    from prc import ProblemSystem
    from prc.hullprobe import ProjectionError

    # |z|^2 + 1 is real-valued but never vanishes: no seed can converge
    sys_ = ProblemSystem.submersion(["z1*conj(z1) + 1"], 1, 1)
    K = CompactSpec.submersion_cap((0j,), (1.0,))
    with pytest.raises(ProjectionError):
        sample_compact(sys_, K, density=8)


# ---------------------------------------------------------------------------
# probe basics
# ---------------------------------------------------------------------------

def test_monomial_basis_counts():
    assert len(monomial_basis(1, 6)) == 7
    assert len(monomial_basis(2, 6)) == 28  # C(8, 2)
    assert (0, 0) in monomial_basis(2, 3)


def test_circle_center_not_separated(circle_cloud):
    res = probe(circle_cloud, [0j], degree=6)
    assert not res.separated
    assert res.ratio <= 1.0 + 1e-9


def test_circle_outside_point_separated(circle_cloud):
    res = probe(circle_cloud, [1.5 + 0j], degree=1)
    assert res.separated
    assert abs(res.ratio - 1.5) <= 0.02


def test_probe_validates_arguments(circle_cloud):
    with pytest.raises(ValueError):
        probe(circle_cloud, [0j], degree=0)
    with pytest.raises(ValueError):
        probe(circle_cloud, [0j], degree=2, angles=4)
    with pytest.raises(ValueError):
        probe(circle_cloud, [0j, 0j], degree=2)


def test_probe_never_separates_cloud_member(circle_cloud):
    for idx in (0, 90, 200):
        q = circle_cloud.points[idx]
        res = probe(circle_cloud, q, degree=4)
        assert not res.separated
        assert res.ratio <= 1.0 + 1e-9


def test_probe_monotone_in_degree(circle_cloud):
    objs = [probe(circle_cloud, [1.2 + 0.3j], degree=d).objective
            for d in (1, 2, 3, 4)]
    for a, b in zip(objs, objs[1:]):
        assert b >= a - 1e-7


def test_separation_ratio_reproducible(circle_cloud):
    res = probe(circle_cloud, [1.5 + 0j], degree=2)
    mvals = np.ones((len(circle_cloud.points), len(res.monomials)), dtype=complex)
    for t, e in enumerate(res.monomials):
        mvals[:, t] = circle_cloud.points[:, 0] ** e[0]
    cloud_max = np.max(np.abs(mvals @ res.coefficients))
    qv = np.array([(1.5 + 0j) ** e[0] for e in res.monomials])
    ratio = abs(qv @ res.coefficients) / cloud_max
    assert abs(ratio - res.ratio) <= 1e-9 * (1 + ratio)


def test_fragility_check_solid_separation(circle_cloud):
    res = probe(circle_cloud, [1.5 + 0j], degree=2)
    theta = 2 * np.pi * np.arange(3600) / 3600
    dense = SampleCloud(points=np.exp(1j * theta)[:, None])
    res = fragility_check(res, [1.5 + 0j], dense)
    assert res.fragile is False


# ---------------------------------------------------------------------------
# Wermer hull evidence
# ---------------------------------------------------------------------------

def test_wermer_origin_not_separated(wermer_cloud):
    res = probe(wermer_cloud, [0j, 0j], degree=3)
    assert not res.separated


def test_wermer_far_point_separated(wermer_cloud):
    res = probe(wermer_cloud, [0j, 2 + 0j], degree=2)
    assert res.separated
    assert res.ratio >= 1.5
