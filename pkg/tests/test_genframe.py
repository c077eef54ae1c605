import numpy as np
import pytest

from src.errors import DependentSpanningSet, NotInvertible, PostconditionFailed
from src.frames import DomainSubspace, VectorFamily, frame_bounds, frame_operator
from src.genframe import (
    build_genframe,
    canonical_dual,
    canonical_tight,
    dual_is_upper_semiframe,
    inverse_representer,
    kato_residual,
    lower_bound_certificate,
    orthonormal_basis,
    reconstruction_residual,
    representer_residual,
    restricted_bounds,
    riesz_representer,
)


def test_orthonormal_basis(rng):
    spanning = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    q = orthonormal_basis(spanning)
    assert q.shape == (5, 3)
    np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)


def test_dependent_spanning_set():
    with pytest.raises(DependentSpanningSet):
        orthonormal_basis(np.array([[1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(DependentSpanningSet):
        orthonormal_basis(np.zeros((1, 2)))


def test_full_domain_is_frame_operator(make_family):
    family = make_family(8, 4)
    gf = build_genframe(family)
    assert gf.full_domain
    np.testing.assert_allclose(gf.op.matrix, frame_operator(family).matrix)
    np.testing.assert_allclose(gf.power(0.0), np.eye(4))


def test_proper_domain_compresses(two_vectors):
    gf = build_genframe(two_vectors, DomainSubspace([[0.0, 1.0]]))
    assert gf.domain_dim == 1
    np.testing.assert_allclose(gf.op.matrix, np.diag([0.0, 2.0]), atol=1e-14)
    np.testing.assert_allclose(gf.power(0.0), np.diag([0.0, 1.0]), atol=1e-14)
    np.testing.assert_allclose(gf.power(-1.0), np.diag([0.0, 0.5]), atol=1e-14)
    assert gf.restricted.lambda_min == pytest.approx(2.0)


def test_declared_domain_is_used_by_default(two_vectors):
    family = VectorFamily.from_vectors(two_vectors.vectors, domain=DomainSubspace([[0.0, 1.0]]))
    assert build_genframe(family).domain_dim == 1


def test_negative_power_needs_invertibility():
    gf = build_genframe(VectorFamily.from_vectors([[1.0, 0.0]]))
    assert not gf.is_invertible()
    with pytest.raises(NotInvertible):
        gf.power(-0.5)
    np.testing.assert_allclose(gf.power(0.5), np.diag([1.0, 0.0]), atol=1e-14)


def test_kato_identity(make_family, rng):
    family = make_family(9, 4)
    domain = DomainSubspace(rng.standard_normal((2, 4)) + 0j)
    assert kato_residual(build_genframe(family), family) < 1e-9
    assert kato_residual(build_genframe(family, domain), family) < 1e-9


def test_certificate_on_two_vectors(two_vectors):
    for m, holds in ((1.0, True), (2.0, True), (3.0, False)):
        cert = lower_bound_certificate(two_vectors, m)
        assert cert.consistent
        assert cert.holds is holds
    cert = lower_bound_certificate(two_vectors, 1.0)
    assert cert.values["frame_bound"] == pytest.approx(2.0)
    assert cert.values["analysis"] == pytest.approx(np.sqrt(2.0))
    assert cert.thresholds["analysis"] == pytest.approx(1.0)


def test_certificate_straddles_the_bound(make_family):
    for size in range(4, 14):
        family = make_family(size, 4)
        gf = build_genframe(family)
        lowest = gf.restricted.lambda_min
        for factor in (0.5, 0.9, 0.999, 1.001, 1.1, 2.0):
            cert = lower_bound_certificate(family, factor * lowest, gf)
            assert cert.consistent
            assert cert.holds is (factor < 1.0)


def test_canonical_dual_and_tight(make_family):
    family = make_family(10, 4)
    gf = build_genframe(family)
    dual = canonical_dual(gf, family)
    assert reconstruction_residual(gf, family, dual) < 1e-8
    assert frame_bounds(dual).upper <= gf.inverse_norm() * (1.0 + 1e-10)

    tight = canonical_tight(gf, family)
    bounds = restricted_bounds(gf, tight)
    assert bounds.lower == pytest.approx(1.0, abs=1e-8)
    assert bounds.upper == pytest.approx(1.0, abs=1e-8)


def test_tight_family_on_proper_domain(make_family, rng):
    family = make_family(10, 4)
    gf = build_genframe(family, DomainSubspace(rng.standard_normal((2, 4)) + 0j))
    bounds = restricted_bounds(gf, canonical_tight(gf, family))
    assert bounds.lower == pytest.approx(1.0, abs=1e-8)
    assert bounds.upper == pytest.approx(1.0, abs=1e-8)


def test_riesz_representer_round_trip(make_family):
    family = make_family(6, 3)
    gf = build_genframe(family)
    chi = np.array([riesz_representer(family, i, gf) for i in range(family.size)])
    assert representer_residual(gf, family, 2, chi[2]) < 1e-9
    eta = inverse_representer(family.with_vectors(chi), gf)
    np.testing.assert_allclose(eta.vectors, family.vectors, atol=1e-10)


def test_dual_is_upper_semiframe(make_family):
    assert dual_is_upper_semiframe(make_family(8, 3))
    assert not dual_is_upper_semiframe(VectorFamily.from_vectors([[1.0, 0.0]]))


DIAGONAL = VectorFamily.from_vectors([[2.0, 0.0], [0.0, 1.0]])


def test_rank_one_domain():
    v = np.array([1.0, 1.0])
    gf = build_genframe(VectorFamily.from_vectors([v]), DomainSubspace(np.array([v], dtype=complex)))
    u = v / np.sqrt(2.0)
    np.testing.assert_allclose(gf.projector.matrix, np.outer(u, u), atol=1e-12)
    np.testing.assert_allclose(gf.op.matrix @ u, 2.0 * u, atol=1e-12)
    assert gf.restricted.lambda_min == pytest.approx(2.0)


def test_diagonal_dual_tight_and_representers():
    gf = build_genframe(DIAGONAL)
    np.testing.assert_allclose(canonical_dual(gf, DIAGONAL).vectors, [[0.5, 0.0], [0.0, 1.0]], atol=1e-12)
    np.testing.assert_allclose(canonical_tight(gf, DIAGONAL).vectors, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(riesz_representer(DIAGONAL, 0, gf), [0.5, 0.0], atol=1e-12)

    chi = VectorFamily.from_vectors([[0.5, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(inverse_representer(chi, gf).vectors, DIAGONAL.vectors, atol=1e-12)


@pytest.mark.parametrize("m, holds", [(2.0, True), (2.5, False)])
def test_certificate_on_explicit_spectrum(m, holds):
    family = VectorFamily.from_vectors(np.diag([np.sqrt(2.0), np.sqrt(3.0)]))
    cert = lower_bound_certificate(family, m)
    assert cert.consistent
    assert cert.holds is holds
    assert all(statement is holds for statement in cert.statements.values())


def test_dual_and_tight_reject_a_foreign_operator(make_family):
    family = make_family(8, 3)
    foreign = build_genframe(family.scaled(2.0))
    with pytest.raises(PostconditionFailed, match="reconstruction"):
        canonical_dual(foreign, family)
    with pytest.raises(PostconditionFailed, match="bounds"):
        canonical_tight(foreign, family)


def test_representer_identity_is_enforced(make_family, monkeypatch):
    family = make_family(6, 3)
    monkeypatch.setattr("src.genframe.representer_residual", lambda *args, **kwargs: 1.0)
    with pytest.raises(PostconditionFailed, match="index 1"):
        riesz_representer(family, 1)


def test_inverse_representer_needs_vectors_in_h_phi():
    gf = build_genframe(VectorFamily.from_vectors(np.eye(3)), DomainSubspace(np.eye(3, dtype=complex)[:2]))
    with pytest.raises(PostconditionFailed, match="leaves H_phi"):
        inverse_representer(VectorFamily.from_vectors([[0.0, 0.0, 1.0]]), gf)
