import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import DimensionMismatch, NotHermitian, SingularCalculus
from src.hilbert import (
    AmbientSpace,
    SpectralFn,
    SymOp,
    as_vec,
    fn_calculus,
    inner,
    inner_weighted,
    probe_vectors,
)

DIM = 4


def positive_from(entries: np.ndarray) -> np.ndarray:
    return entries @ entries.T + np.eye(entries.shape[0])


def test_from_matrix_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        SymOp.from_matrix([[1.0, 2.0], [0.0, 1.0]])


def test_from_matrix_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        SymOp.from_matrix(np.ones((2, 3)))


def test_eigenvalues_ascending():
    op = SymOp.from_matrix(np.diag([4.0, 1.0, 9.0]))
    np.testing.assert_allclose(op.eigenvalues, [1.0, 4.0, 9.0])
    assert op.lambda_min == pytest.approx(1.0)
    assert op.lambda_max == pytest.approx(9.0)


def test_square_root_of_diagonal():
    root = fn_calculus(SymOp.diagonal([1.0, 4.0]), SpectralFn.power(0.5))
    np.testing.assert_allclose(root.matrix, np.diag([1.0, 2.0]), atol=1e-14)


def test_negative_power_of_singular_operator():
    with pytest.raises(SingularCalculus):
        fn_calculus(SymOp.diagonal([0.0, 1.0]), SpectralFn.power(-1.0))


def test_calculus_needs_positive_operator():
    with pytest.raises(SingularCalculus):
        fn_calculus(SymOp.diagonal([-1.0, 1.0]), SpectralFn.power(0.5))


def test_zero_power_is_identity_even_with_kernel():
    result = fn_calculus(SymOp.diagonal([0.0, 3.0]), SpectralFn.power(0.0))
    np.testing.assert_allclose(result.matrix, np.eye(2))


def test_spectral_fn_algebra():
    product = SpectralFn.power(0.5) * SpectralFn.power(1.5)
    assert product.exponent == pytest.approx(2.0)
    assert SpectralFn.power(2.0).reciprocal().exponent == pytest.approx(-2.0)
    mixed = SpectralFn(lambda t: 1.0 + t, "1+t").reciprocal()
    assert mixed.exponent is None
    np.testing.assert_allclose(mixed(np.array([0.0, 1.0])), [1.0, 0.5])


def test_inner_is_linear_in_first_argument():
    f = np.array([1.0 + 1j, 2.0])
    g = np.array([0.5, -1j])
    assert inner(2j * f, g) == pytest.approx(2j * inner(f, g))
    assert inner(f, 2j * g) == pytest.approx(-2j * inner(f, g))


def test_weight_zero_is_ambient_product():
    base = SymOp.diagonal([2.0, 3.0])
    f, g = np.array([1.0, 1j]), np.array([2.0, 1.0])
    assert inner_weighted(f, g, base, 0.0) == inner(f, g)


def test_weight_one_uses_the_operator():
    base = SymOp.diagonal([2.0, 3.0])
    f, g = np.array([1.0, 1.0]), np.array([1.0, 1.0])
    assert inner_weighted(f, g, base, 1.0) == pytest.approx(4.0 + 9.0)


def test_vector_helpers():
    space = AmbientSpace(3)
    np.testing.assert_allclose(space.basis_vector(1), [0.0, 1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        as_vec([1.0, 2.0], 3)
    with pytest.raises(DimensionMismatch):
        AmbientSpace(0)


def test_probe_vectors_are_seeded_unit_vectors():
    probes = probe_vectors(3, seed=5, count=10)
    assert probes.shape == (13, 3)
    np.testing.assert_allclose(probes[:3], np.eye(3))
    np.testing.assert_allclose(np.linalg.norm(probes, axis=1), 1.0)
    np.testing.assert_array_equal(probes, probe_vectors(3, seed=5, count=10))


@seed(11)
@settings(max_examples=30, deadline=None)
@given(
    entries=arrays(np.float64, (DIM, DIM), elements=st.floats(min_value=-1.0, max_value=1.0)),
    a=st.sampled_from([-1.0, -0.5, 0.5, 1.0, 2.0]),
    b=st.sampled_from([-1.0, -0.5, 0.5, 1.0, 2.0]),
)
def test_powers_compose(entries, a, b):
    op = SymOp.from_matrix(positive_from(entries))
    left = fn_calculus(op, SpectralFn.power(a)).matrix @ fn_calculus(op, SpectralFn.power(b)).matrix
    right = fn_calculus(op, SpectralFn.power(a + b)).matrix
    np.testing.assert_allclose(left, right, rtol=1e-8, atol=1e-8 * np.linalg.norm(right))


@seed(12)
@settings(max_examples=30, deadline=None)
@given(entries=arrays(np.float64, (DIM, DIM), elements=st.floats(min_value=-1.0, max_value=1.0)))
def test_decomposition_reconstructs(entries):
    matrix = positive_from(entries)
    op = SymOp.from_matrix(matrix)
    v = op.eigenvectors
    np.testing.assert_allclose((v * op.eigenvalues) @ v.conj().T, matrix, atol=1e-10 * np.linalg.norm(matrix))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(DIM), atol=1e-10)
