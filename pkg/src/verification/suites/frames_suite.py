from typing import List

import numpy as np

from ...config import TAU_CALC, TAU_DUAL, TAU_RECON
from ...frames import (
    Verdict,
    analysis,
    check_duality,
    classify,
    frame_bounds,
    frame_operator,
    mixed_operator_norm,
    omega_bound,
    synthesis,
)
from .base import InvariantCheck, InvariantSuite, random_family


class FramesSuite(InvariantSuite):
    """
    Analysis, synthesis, frame operator and classification
    """
    module = "frames"

    def prepare(self) -> None:
        self.family = random_family(self.rng, 2 * self.dim, self.dim)
        self.thin = random_family(self.rng, max(self.dim - 1, 1), self.dim)
        self.other = self.family.with_vectors(random_family(self.rng, 2 * self.dim, self.dim).vectors)

    def run_checks(self) -> List[InvariantCheck]:
        family = self.family
        an = analysis(family)
        f = self.rng.standard_normal(self.dim) + 1j * self.rng.standard_normal(self.dim)
        xi = self.rng.standard_normal(family.size) + 1j * self.rng.standard_normal(family.size)
        lhs = np.vdot(xi, an.matrix @ f)
        rhs = np.vdot(synthesis(an, xi / np.sqrt(family.grid.weights)), f)
        checks = [InvariantCheck(
            "analysis and synthesis are adjoint",
            abs(lhs - rhs) / max(abs(lhs), 1.0),
            1e-10,
        )]

        s = frame_operator(family)
        rank_one = sum(w * np.outer(v, v.conj()) for w, v in zip(family.grid.weights, family.vectors))
        checks.append(InvariantCheck(
            "frame operator equals the rank-one sum",
            float(np.linalg.norm(self.perturbed(s.matrix) - rank_one, "fro") / np.linalg.norm(rank_one, "fro")),
            TAU_RECON,
        ))

        bounds = frame_bounds(family)
        attained = max(
            abs(family.energy(bounds.attained_low) - bounds.lower),
            abs(family.energy(bounds.attained_high) - bounds.upper),
        ) / bounds.upper
        checks.append(InvariantCheck("frame bounds are attained", attained, TAU_CALC))

        probes = self.rng.standard_normal((100, self.dim)) + 1j * self.rng.standard_normal((100, self.dim))
        violation = 0.0
        for p in probes:
            quotient = family.energy(p) / np.linalg.norm(p) ** 2
            violation = max(violation, bounds.lower - quotient, quotient - bounds.upper)
        checks.append(InvariantCheck("Rayleigh quotients stay within the bounds", max(violation, 0.0) / bounds.upper, TAU_CALC))

        scaled = classify(family.scaled(3.0))
        scaled_bounds = frame_bounds(family.scaled(3.0))
        mismatch = float(scaled.verdict != classify(family).verdict)
        mismatch += abs(scaled_bounds.upper - 9.0 * bounds.upper) / (9.0 * bounds.upper)
        checks.append(InvariantCheck("classification is invariant under scaling", mismatch, TAU_CALC))

        singular = np.linalg.svd(analysis(self.thin).matrix, compute_uv=False)
        injective = singular.shape[0] == self.dim and singular[-1] > 1e-12 * singular[0]
        thin_total = classify(self.thin).verdict != Verdict.NOT_TOTAL
        checks.append(InvariantCheck("totality matches injectivity of analysis", float(injective != thin_total), 0.0))

        excess = mixed_operator_norm(self.other, family) - omega_bound(family, self.other)
        checks.append(InvariantCheck("mixed operator norm is below the omega bound", max(excess, 0.0), TAU_CALC))

        dual = family.mapped(np.linalg.inv(s.matrix))
        checks.append(InvariantCheck("canonical dual reproduces", check_duality(family, dual, self.seed), TAU_DUAL))
        return checks
