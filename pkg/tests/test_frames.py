import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.errors import DimensionMismatch, EmptyFamily, GridMismatch, InconsistentScan
from src.frames import (
    MeasureGrid,
    TruncationScan,
    VectorFamily,
    Verdict,
    analysis,
    check_duality,
    classify,
    classify_trajectory,
    frame_bounds,
    frame_operator,
    is_reproducing_pair,
    mixed_frame_operator,
    mixed_operator_norm,
    omega_bound,
    synthesis,
)
from src.hilbert import AmbientSpace

REFINEMENTS = (10.0, 100.0, 1000.0, 10000.0)


def test_analysis_rows(make_family):
    family = make_family(5, 3)
    an = analysis(family)
    for i in range(family.size):
        for k in range(family.dim):
            e = np.zeros(family.dim, dtype=complex)
            e[k] = 1.0
            expected = np.sqrt(family.grid.weights[i]) * np.vdot(family.vectors[i], e)
            assert (an.matrix @ e)[i] == pytest.approx(expected)


def test_synthesis_weak_form(make_family, rng):
    family = make_family(6, 3)
    xi = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    f = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lhs = np.vdot(f, synthesis(analysis(family), xi))
    rhs = np.sum(family.grid.weights * xi * np.array([np.vdot(f, phi) for phi in family.vectors]))
    assert lhs == pytest.approx(rhs)


def test_synthesis_length_mismatch(make_family):
    with pytest.raises(DimensionMismatch):
        synthesis(analysis(make_family(4, 2)), np.ones(3))


def test_empty_family():
    empty = VectorFamily(MeasureGrid((), []), np.zeros((0, 2)), AmbientSpace(2))
    with pytest.raises(EmptyFamily):
        analysis(empty)


def test_grid_validation():
    with pytest.raises(GridMismatch):
        MeasureGrid((0, 1), [1.0])
    with pytest.raises(GridMismatch):
        MeasureGrid((0, 1), [1.0, -1.0])


def test_two_vectors_bounds(two_vectors):
    np.testing.assert_allclose(frame_operator(two_vectors).matrix, 2.0 * np.eye(2), atol=1e-14)
    bounds = frame_bounds(two_vectors)
    assert bounds.lower == pytest.approx(2.0)
    assert bounds.upper == pytest.approx(2.0)
    assert classify(two_vectors).verdict == Verdict.FRAME


def test_orthonormal_basis_is_parseval():
    assert classify(VectorFamily.from_vectors(np.eye(3))).verdict == Verdict.PARSEVAL


def test_not_total_has_witness():
    result = classify(VectorFamily.from_vectors([[1.0, 0.0]]))
    assert result.verdict == Verdict.NOT_TOTAL
    witness = np.array([complex(re, im) for re, im in result.evidence["null_witness"]])
    assert abs(witness[0]) == pytest.approx(0.0, abs=1e-12)


def test_rank_one_sum(make_family):
    family = make_family(7, 3)
    expected = sum(w * np.outer(v, v.conj()) for w, v in zip(family.grid.weights, family.vectors))
    np.testing.assert_allclose(frame_operator(family).matrix, expected, atol=1e-12)


def test_scan_must_refine(make_family):
    family = make_family(4, 2)
    with pytest.raises(InconsistentScan):
        TruncationScan((family, family), (2.0, 2.0))
    with pytest.raises(InconsistentScan):
        TruncationScan((family,), (1.0, 2.0))


@pytest.mark.parametrize("lowers, uppers, verdict", [
    ([1.0] * 4, list(REFINEMENTS), Verdict.PROPER_LOWER),
    ([1.0 / r for r in REFINEMENTS], [1.0] * 4, Verdict.UPPER_SEMI),
    ([1.0 / r for r in REFINEMENTS], list(REFINEMENTS), Verdict.NONE),
    ([1.0, 1.0, 1.0, 0.05], [1.0] * 4, Verdict.BESSEL_ONLY),
    ([1.0] * 4, [1.0] * 4, Verdict.PARSEVAL),
    ([0.5] * 4, [2.0] * 4, Verdict.FRAME),
    ([0.0] * 4, [0.0] * 4, Verdict.NONE),
    ([0.5, 0.5, 0.0, 0.5], [2.0] * 4, Verdict.NOT_TOTAL),
])
def test_trajectory_verdicts(lowers, uppers, verdict):
    assert classify_trajectory(REFINEMENTS, lowers, uppers).verdict == verdict


def test_short_scans_never_diverge():
    result = classify_trajectory((1.0, 10.0, 100.0), [1.0] * 3, [1.0, 1e3, 1e6])
    assert result.verdict == Verdict.FRAME
    assert result.evidence["divergence"]["slope"] is None


def test_canonical_dual_reproduces(make_family):
    family = make_family(8, 3)
    dual = family.mapped(np.linalg.inv(frame_operator(family).matrix))
    assert check_duality(family, dual) < 1e-8
    assert check_duality(family, family) > 1e-3


def test_mixed_operator_weak_form(make_family, rng):
    phi = make_family(6, 3)
    psi = phi.with_vectors(rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3)))
    f = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    g = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lhs = np.vdot(g, mixed_frame_operator(psi, phi) @ f)
    rhs = np.sum(psi.grid.weights * np.array([np.vdot(p, f) * np.vdot(g, q) for p, q in zip(psi.vectors, phi.vectors)]))
    assert lhs == pytest.approx(rhs)
    assert mixed_operator_norm(psi, phi) <= omega_bound(phi, psi) * (1.0 + 1e-12)


def test_mixed_operator_needs_shared_grid(make_family):
    with pytest.raises(GridMismatch):
        mixed_frame_operator(make_family(4, 2), make_family(5, 2))


def test_reproducing_pair(make_family):
    phi = make_family(6, 3)
    dual = phi.mapped(np.linalg.inv(frame_operator(phi).matrix))
    report = is_reproducing_pair(dual, phi)
    assert report.is_pair
    assert report.condition == pytest.approx(1.0)
    thin = VectorFamily.from_vectors([[1.0, 0.0], [2.0, 0.0]])
    assert not is_reproducing_pair(thin, thin).is_pair


@seed(21)
@settings(max_examples=25, deadline=None)
@given(c=st.floats(min_value=0.1, max_value=10.0), size=st.integers(min_value=3, max_value=8))
def test_scaling_keeps_verdict(c, size):
    rng = np.random.default_rng(size)
    family = VectorFamily.from_vectors(rng.standard_normal((size, 3)) + 1j * rng.standard_normal((size, 3)))
    scaled = family.scaled(c)
    assert classify(scaled).verdict == classify(family).verdict
    assert frame_bounds(scaled).upper == pytest.approx(c * c * frame_bounds(family).upper, rel=1e-10)
    assert frame_bounds(scaled).lower == pytest.approx(c * c * frame_bounds(family).lower, rel=1e-8)


def test_omega_bound_is_attained_by_rank_one_families():
    a = np.array([1.0, -2.0, 0.5])
    weights = np.array([0.5, 1.0, 2.0])
    h = np.array([1.0, 1.0j])
    phi = VectorFamily.from_vectors(np.outer(a, h), weights)
    expected = np.linalg.norm(h) ** 2 * np.sum(weights * a ** 2)
    assert omega_bound(phi, phi) == pytest.approx(expected)
    assert mixed_operator_norm(phi, phi) == pytest.approx(expected)


def test_duality_of_diagonal_pair():
    phi = VectorFamily.from_vectors([[2.0, 0.0], [0.0, 1.0]])
    psi = VectorFamily.from_vectors([[0.5, 0.0], [0.0, 1.0]])
    assert check_duality(phi, psi) <= 1e-12
