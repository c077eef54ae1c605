from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ...config import DEFAULT_SEED
from ...frames import VectorFamily


@dataclass
class InvariantCheck:
    """
    One invariant evaluated with its worst residual
    """
    name: str
    residual: float
    tolerance: float
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class SuiteResult:
    module: str
    checks: List[InvariantCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[InvariantCheck]:
        return [check for check in self.checks if not check.passed]


class InvariantSuite(ABC):
    """
    Abstract base class for per-module invariant suites
    """
    module: str = ""

    def __init__(self, dim: int = 6, seed: int = DEFAULT_SEED, perturbation: float = 0.0):
        self.dim = dim
        self.seed = seed
        self.perturbation = perturbation
        self.rng = np.random.default_rng(seed)

    def perturbed(self, matrix: np.ndarray) -> np.ndarray:
        """
        Copy of `matrix` with the perturbation added to its first entry
        """
        out = np.array(matrix, dtype=complex)
        out.flat[0] += self.perturbation
        return out

    @abstractmethod
    def prepare(self) -> None:
        """
        Build the random inputs the checks run on
        """
        pass

    @abstractmethod
    def run_checks(self) -> List[InvariantCheck]:
        """
        Evaluate every invariant of the module
        """
        pass

    def run_suite(self) -> SuiteResult:
        self.prepare()
        return SuiteResult(self.module, self.run_checks())


def random_family(rng: np.random.Generator, size: int, dim: int, weighted: bool = True) -> VectorFamily:
    """
    Random complex family of `size` vectors in C^dim, full rank when size >= dim
    """
    vectors = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
    weights = rng.uniform(0.5, 2.0, size) if weighted else np.ones(size)
    return VectorFamily.from_vectors(vectors, weights)


def random_positive(rng: np.random.Generator, dim: int, floor: float = 0.5) -> np.ndarray:
    """
    Random Hermitian matrix with spectrum >= floor
    """
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return z @ z.conj().T / dim + floor * np.eye(dim)
