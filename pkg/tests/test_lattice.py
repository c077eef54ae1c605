import numpy as np
import pytest

from src.errors import DimensionMismatch, SingularCalculus
from src.hilbert import probe_vectors
from src.lattice import (
    LATTICE_EDGES,
    NODE_FORMS,
    MetricOp,
    ScaleSpace,
    build_metric_from_closed,
    collapse_check,
    dual_pairing_residual,
    lattice_norms,
    rg_norm,
    scale_unitarity,
    similarity_check,
    spectral_distance,
)


def positive(rng, dim, floor=0.3):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return z @ z.conj().T / dim + floor * np.eye(dim)


@pytest.fixture
def metric(rng):
    return MetricOp.from_matrix(positive(rng, 5))


def test_strict_positivity_flag():
    assert MetricOp.from_matrix(np.diag([1.0, 2.0])).strictly_positive
    singular = MetricOp.from_matrix(np.diag([0.0, 2.0]))
    assert not singular.strictly_positive
    with pytest.raises(SingularCalculus):
        singular.power(-1.0)


def test_rg_norm_is_graph_norm(metric):
    root = metric.power(0.5)
    for f in probe_vectors(metric.dim, seed=3, count=100):
        expected = np.sqrt(np.linalg.norm(f) ** 2 + np.linalg.norm(root @ f) ** 2)
        assert rg_norm(metric, f) == pytest.approx(expected, rel=1e-10)


def test_lattice_edges_hold(metric):
    for f in probe_vectors(metric.dim, seed=4, count=100):
        lattice = lattice_norms(metric, f)
        assert set(lattice.norms) == set(NODE_FORMS)
        assert len(lattice.edges) == len(LATTICE_EDGES)
        assert all(np.isfinite(edge.constant) for edge in lattice.edges)
        assert lattice.all_edges_hold


def test_join_is_dual_of_rg(metric):
    for f in probe_vectors(metric.dim, seed=5, count=20):
        assert dual_pairing_residual(metric, f) < 1e-9


def test_lattice_needs_strict_positivity():
    with pytest.raises(SingularCalculus):
        lattice_norms(MetricOp.from_matrix(np.diag([0.0, 1.0])), np.ones(2))


def test_collapse_for_bounded_metric(metric):
    ratio, bound = collapse_check(metric)
    assert ratio <= bound


def test_scale_conventions():
    above_one = MetricOp.from_matrix(np.diag([1.0, 4.0]))
    below_one = MetricOp.from_matrix(np.diag([0.25, 4.0]))
    assert ScaleSpace(above_one, 1.0).convention == "power"
    assert ScaleSpace(below_one, 1.0).convention == "graph"

    f = np.array([1.0, 1.0])
    assert ScaleSpace(above_one, 2.0).norm(f) == pytest.approx(np.sqrt(1.0 + 16.0))
    assert ScaleSpace(below_one, 2.0).norm(f) == pytest.approx(np.sqrt(2.0 + 0.0625 + 16.0))
    assert ScaleSpace(below_one, 0.0).norm(f) == pytest.approx(np.sqrt(2.0))


def test_scale_nesting(rng):
    g = MetricOp.from_matrix(np.eye(4) + positive(rng, 4))
    orders = (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0)
    for f in probe_vectors(4, seed=6):
        norms = [ScaleSpace(g, a).norm(f) for a in orders]
        assert all(lo <= hi * (1.0 + 1e-12) for lo, hi in zip(norms, norms[1:]))


def test_scale_unitarity(metric):
    assert scale_unitarity(metric, -2, 2) < 1e-9


def test_closed_metrics_trivial_cases():
    g1, g2 = build_metric_from_closed(np.zeros((2, 2)))
    np.testing.assert_allclose(g1.op.matrix, np.eye(2))
    np.testing.assert_allclose(g2.op.matrix, np.eye(2))

    g1, g2 = build_metric_from_closed(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(g1.op.matrix, np.diag([2.0, 5.0]), atol=1e-14)
    np.testing.assert_allclose(g2.op.matrix, np.diag([0.5, 0.2]), atol=1e-14)


def test_closed_metrics_random(rng):
    closed = build_metric_from_closed(rng.standard_normal((5, 4)))
    assert closed.g1.op.lambda_min >= 1.0 - 1e-12
    assert closed.g2.op.norm <= 1.0 + 1e-12
    assert closed.triplet_violation <= 1e-10
    assert closed.inverse_residual <= 1e-10


def test_constructed_conjugations_are_similar(rng):
    for _ in range(25):
        a = rng.standard_normal((4, 4))
        t = MetricOp.from_matrix(positive(rng, 4, floor=0.5))
        b = t.op.matrix @ a @ t.power(-1.0)
        report = similarity_check(a, b, t)
        assert report.similar
        assert report.spectra_match


def test_unrelated_operators_are_not_similar(rng):
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([1.0, 2.0, 4.0])
    report = similarity_check(a, b, MetricOp.from_matrix(positive(rng, 3)))
    assert not report.similar
    assert report.spectral_distance is None


def test_similarity_shapes():
    with pytest.raises(DimensionMismatch):
        similarity_check(np.eye(2), np.eye(3), MetricOp.from_matrix(np.eye(2)))


def test_spectral_distance_ignores_order():
    assert spectral_distance(np.diag([1.0, 2.0, 3.0]), np.diag([3.0, 1.0, 2.0])) == pytest.approx(0.0)
    assert spectral_distance(np.diag([1.0, 2.0]), np.diag([1.0, 2.5])) == pytest.approx(0.5)


def test_rg_norm_on_explicit_metric():
    metric = MetricOp.from_matrix(np.diag([3.0, 8.0]))
    assert rg_norm(metric, np.array([1.0, 0.0])) ** 2 == pytest.approx(4.0)
    assert rg_norm(MetricOp.from_matrix(np.eye(2)), np.array([0.0, 1.0])) ** 2 == pytest.approx(2.0)
