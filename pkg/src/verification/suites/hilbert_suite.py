from typing import List

import numpy as np

from ...config import TAU_CALC, TAU_ORTH, TAU_RECON
from ...hilbert import SpectralFn, SymOp, fn_calculus, inner, inner_weighted
from .base import InvariantCheck, InvariantSuite, random_positive


class HilbertSuite(InvariantSuite):
    """
    Spectral decomposition and functional calculus
    """
    module = "hilbert"

    def prepare(self) -> None:
        self.matrix = random_positive(self.rng, self.dim)
        self.op = SymOp.from_matrix(self.matrix)
        # repeated eigenvalues exercise degenerate clusters
        self.degenerate = SymOp.from_matrix(np.kron(np.eye(2), random_positive(self.rng, max(self.dim // 2, 1))))
        self.f = self.rng.standard_normal(self.dim) + 1j * self.rng.standard_normal(self.dim)
        self.g = self.rng.standard_normal(self.dim) + 1j * self.rng.standard_normal(self.dim)

    def _relative(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.linalg.norm(a - b, "fro") / max(np.linalg.norm(b, "fro"), 1e-300))

    def run_checks(self) -> List[InvariantCheck]:
        v = self.op.eigenvectors
        checks = [
            InvariantCheck(
                "eigendecomposition reconstructs the matrix",
                self._relative(self.perturbed(self.matrix), (v * self.op.eigenvalues) @ v.conj().T),
                TAU_RECON,
            ),
            InvariantCheck(
                "eigenvectors are orthonormal",
                float(np.max(np.abs(v.conj().T @ v - np.eye(self.dim)))),
                TAU_ORTH * np.sqrt(self.dim),
            ),
        ]

        worst = 0.0
        for op in (self.op, self.degenerate):
            root = fn_calculus(op, SpectralFn.power(0.5)).matrix
            product = fn_calculus(op, SpectralFn(lambda t: np.sqrt(t) * np.exp(-t), "sqrt(t)e^-t")).matrix
            factor = fn_calculus(op, SpectralFn(lambda t: np.exp(-t), "e^-t")).matrix
            worst = max(worst, self._relative(root @ factor, product))
        checks.append(InvariantCheck("functional calculus is multiplicative", worst, TAU_CALC))

        exponents = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
        worst = 0.0
        for a in exponents:
            for b in exponents:
                left = fn_calculus(self.op, SpectralFn.power(a)).matrix @ fn_calculus(self.op, SpectralFn.power(b)).matrix
                right = fn_calculus(self.op, SpectralFn.power(a + b)).matrix
                worst = max(worst, self._relative(left, right))
        checks.append(InvariantCheck("powers compose additively", worst, TAU_CALC))

        positive = fn_calculus(self.op, SpectralFn(lambda t: 1.0 + t, "1+t"))
        checks.append(InvariantCheck(
            "positive functions give positive operators",
            max(0.0, -positive.lambda_min),
            0.0,
        ))

        f, g = self.f, self.g
        forward = inner_weighted(f, g, self.op, 1.0)
        backward = inner_weighted(g, f, self.op, 1.0)
        linear = inner_weighted(2.0 * f + g, g, self.op, 1.0)
        checks.append(InvariantCheck(
            "weighted inner product is conjugate symmetric and linear",
            max(abs(forward - np.conj(backward)), abs(linear - 2.0 * forward - inner_weighted(g, g, self.op, 1.0)))
            / max(abs(forward), 1.0),
            TAU_CALC,
        ))
        checks.append(InvariantCheck(
            "weighted norm is positive",
            max(0.0, -inner_weighted(f, f, self.op, 0.5).real),
            0.0,
        ))
        checks.append(InvariantCheck(
            "weight 0 is the ambient inner product",
            abs(inner_weighted(f, g, self.op, 0.0) - inner(f, g)),
            0.0,
        ))
        return checks
