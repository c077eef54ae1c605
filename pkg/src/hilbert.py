"""
Finite-dimensional ambient Hilbert space: vectors, inner products,
self-adjoint operators and their spectral functional calculus.

Inner products are linear in the first argument.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import linalg

from .config import RANDOM_PROBES, TAU_HERM, TAU_NULL, TAU_ORTH, TAU_PSD, TAU_RECON
from .errors import DimensionMismatch, NotHermitian, SingularCalculus

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Vec = np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AmbientSpace:
    """
    Truncated Hilbert space C^dim
    """
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionMismatch(f"Ambient dimension must be positive, got {self.dim}")

    def vector(self, coords) -> Vec:
        return as_vec(coords, self.dim)

    def zero(self) -> Vec:
        return np.zeros(self.dim, dtype=complex)

    def basis_vector(self, k: int) -> Vec:
        e = self.zero()
        e[k] = 1.0
        return e


def as_vec(coords, dim: Optional[int] = None) -> Vec:
    v = np.asarray(coords, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatch(f"Expected a 1-D coordinate array, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"Vector has length {v.shape[0]}, space has dim {dim}")
    return v


def inner(f: Vec, g: Vec) -> complex:
    return complex(np.vdot(g, f))


def norm(f: Vec) -> float:
    return float(np.linalg.norm(f))


@dataclass(frozen=True, eq=False)
class SymOp:
    """
    Self-adjoint operator stored densely together with its eigendecomposition

    Eigenvalues are ascending; eigenvectors are the columns of `eigenvectors`.
    """
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, matrix) -> "SymOp":
        a = np.array(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"Operator matrix must be square, got shape {a.shape}")

        scale = np.linalg.norm(a, "fro")
        asym = np.linalg.norm(a - a.conj().T, "fro")
        if asym > TAU_HERM * max(scale, np.finfo(float).tiny):
            raise NotHermitian(f"Matrix is not Hermitian: |A - A*|_F = {asym:.3e}, |A|_F = {scale:.3e}")

        a = 0.5 * (a + a.conj().T)
        eigenvalues, eigenvectors = linalg.eigh(a)
        op = cls(_frozen(a), _frozen(eigenvalues), _frozen(eigenvectors))
        op._check_decomposition(scale)
        return op

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> "SymOp":
        """
        Assemble V diag(values) V* from a known orthonormal eigenbasis
        """
        values = np.asarray(eigenvalues, dtype=float)
        vectors = np.asarray(eigenvectors, dtype=complex)
        order = np.argsort(values, kind="stable")
        values, vectors = values[order], vectors[:, order]
        a = (vectors * values) @ vectors.conj().T
        a = 0.5 * (a + a.conj().T)
        return cls(_frozen(a), _frozen(values.copy()), _frozen(vectors.copy()))

    @classmethod
    def identity(cls, dim: int) -> "SymOp":
        eye = np.eye(dim, dtype=complex)
        return cls.from_spectrum(np.ones(dim), eye)

    @classmethod
    def diagonal(cls, values) -> "SymOp":
        values = np.asarray(values, dtype=float)
        return cls.from_spectrum(values, np.eye(values.shape[0], dtype=complex))

    def _check_decomposition(self, scale: float) -> None:
        v = self.eigenvectors
        orth = np.max(np.abs(v.conj().T @ v - np.eye(self.dim))) if self.dim else 0.0
        if orth > TAU_ORTH * max(1.0, np.sqrt(self.dim)):
            logger.warning(f"Eigenvectors lose orthonormality: {orth:.3e}")
        recon = np.linalg.norm(self.matrix - (v * self.eigenvalues) @ v.conj().T, "fro")
        if recon > TAU_RECON * max(scale, 1.0) * max(1.0, np.sqrt(self.dim)):
            logger.warning(f"Eigendecomposition reconstruction error {recon:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.dim else 0.0

    def is_positive_semidefinite(self) -> bool:
        return self.lambda_min >= -TAU_PSD * max(self.norm, np.finfo(float).tiny)

    def null_threshold(self) -> float:
        return TAU_NULL * max(self.lambda_max, 0.0)


@dataclass(frozen=True)
class SpectralFn:
    """
    Real function of the spectral variable t >= 0

    `exponent` is set for pure powers t^a so operators can evaluate them
    through the power path.
    """
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    exponent: Optional[float] = None

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.asarray(self.evaluator(t), dtype=float)
        return np.broadcast_to(values, t.shape).copy() if values.shape != t.shape else values

    def __mul__(self, other: "SpectralFn") -> "SpectralFn":
        if self.exponent is not None and other.exponent is not None:
            return SpectralFn.power(self.exponent + other.exponent)
        return SpectralFn(lambda t: self(t) * other(t), f"({self.label})*({other.label})")

    def reciprocal(self) -> "SpectralFn":
        if self.exponent is not None:
            return SpectralFn.power(-self.exponent)
        return SpectralFn(lambda t: 1.0 / self(t), f"1/({self.label})")

    @classmethod
    def power(cls, exponent: float) -> "SpectralFn":
        a = float(exponent)
        if a == 0.0:
            return cls(lambda t: np.ones_like(t), "t^0", 0.0)
        return cls(lambda t: np.power(t, a), f"t^{a:g}", a)

    @classmethod
    def constant(cls, c: float) -> "SpectralFn":
        return cls(lambda t: np.full_like(t, float(c)), f"{c:g}")

    @classmethod
    def identity(cls) -> "SpectralFn":
        return cls(lambda t: t, "t")


def apply(op: SymOp, f: Vec) -> Vec:
    f = as_vec(f)
    if f.shape[0] != op.dim:
        raise DimensionMismatch(f"Operator of dim {op.dim} applied to vector of length {f.shape[0]}")
    return op.matrix @ f


def fn_calculus(op: SymOp, fn: SpectralFn) -> SymOp:
    """
    Return fn(op) = V fn(Lambda) V*

    Eigenvalues below TAU_NULL * lambda_max are treated as exact zeros and
    small negative ones (within TAU_PSD) are clipped.
    """
    if not op.is_positive_semidefinite():
        raise SingularCalculus(f"Operator is not positive semi-definite (lambda_min = {op.lambda_min:.3e})")

    t = np.clip(op.eigenvalues, 0.0, None)
    t[t <= op.null_threshold()] = 0.0
    values = fn(t)
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise SingularCalculus(
            f"{fn.label} is not finite on the spectrum (at eigenvalue {t[bad][0]:.3e})"
        )
    return SymOp.from_spectrum(values, op.eigenvectors)


Weight = Union[float, SpectralFn]


def weight_operator(base: SymOp, weight: Weight) -> SymOp:
    fn = weight if isinstance(weight, SpectralFn) else SpectralFn.power(weight)
    return fn_calculus(base, fn)


def inner_weighted(f: Vec, g: Vec, base: SymOp, weight: Weight) -> complex:
    """
    <W f, W g> with W = weight(base); a number weight m means W = base^m
    """
    if not isinstance(weight, SpectralFn) and float(weight) == 0.0:
        return inner(f, g)
    w = weight_operator(base, weight)
    return inner(apply(w, f), apply(w, g))


def random_unit_vectors(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def probe_vectors(dim: int, seed: int, count: int = RANDOM_PROBES) -> np.ndarray:
    """
    Standard basis followed by `count` seeded random unit vectors, one per row
    """
    rng = np.random.default_rng(seed)
    return np.vstack([np.eye(dim, dtype=complex), random_unit_vectors(dim, count, rng)])
