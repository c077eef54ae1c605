import json

import numpy as np
import pytest

from src.frames import VectorFamily


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_family(rng):
    """
    Factory for random weighted complex families
    """
    def factory(size: int, dim: int, weighted: bool = True) -> VectorFamily:
        vectors = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
        weights = rng.uniform(0.5, 2.0, size) if weighted else np.ones(size)
        return VectorFamily.from_vectors(vectors, weights)
    return factory


@pytest.fixture
def two_vectors():
    """
    {e1 + e2, e1 - e2} in C^2, with S = 2I
    """
    return VectorFamily.from_vectors([[1.0, 1.0], [1.0, -1.0]])


@pytest.fixture
def two_vectors_file(tmp_path):
    path = tmp_path / "two_vectors.json"
    path.write_text(json.dumps({
        "dim": 2,
        "points": [0, 1],
        "weights": [1.0, 1.0],
        "vectors": [[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [-1.0, 0.0]]],
    }))
    return path
