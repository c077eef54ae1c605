from typing import List

import numpy as np

from ...config import TAU_PARS
from ...gallery import diagonal_sequence
from ...genframe import build_genframe, canonical_tight
from ...hilbert import SpectralFn, probe_vectors
from ...transforms import (
    WeightSpec,
    classify_fn_transform,
    classify_transform,
    metric_transformability,
    power_energy_prediction,
    power_transform,
    weighted_energy,
)
from .base import InvariantCheck, InvariantSuite, random_family

EXPONENT_GRID = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0)


def admissible_pairs(grid=EXPONENT_GRID):
    return [(k, m) for k in grid for m in grid if k >= m]


class TransformsSuite(InvariantSuite):
    """
    Power and functional-calculus transforms in weighted spaces
    """
    module = "transforms"

    def prepare(self) -> None:
        self.family = random_family(self.rng, 2 * self.dim, self.dim)
        self.gf = build_genframe(self.family)
        self.sweep = diagonal_sequence(3.0)

    def run_checks(self) -> List[InvariantCheck]:
        probes = probe_vectors(self.dim, self.seed, count=8)
        worst = 0.0
        for k, m in admissible_pairs():
            transformed = power_transform(self.family, self.gf, k)
            weight = WeightSpec.power(self.gf, m)
            for f in probes:
                predicted = power_energy_prediction(self.gf, k, m, f)
                worst = max(worst, abs(weighted_energy(transformed, weight, f) - predicted) / predicted)
        checks = [InvariantCheck("weighted energy of T^-k phi equals |T^(2m-k+1/2) f|^2", worst, 1e-9)]

        family, scan = self.sweep.family, self.sweep.scan
        gf = build_genframe(family)
        disagreements, mismatched_rule, fn_mismatch = 0, 0, 0
        for k, m in admissible_pairs():
            verdict = classify_transform(family, gf, k, m, scan)
            disagreements += not verdict.agrees
            rule = verdict.evidence["power_rule"]
            mismatched_rule += (
                verdict.is_bessel != rule["is_bessel"]
                or verdict.is_lower_semiframe != rule["is_lower_semiframe"]
                or verdict.is_parseval != rule["is_parseval"]
            )
            fn_verdict = classify_fn_transform(family, gf, SpectralFn.power(k), SpectralFn.power(m), scan)
            fn_mismatch += fn_verdict.verdict != verdict.verdict or fn_verdict.predicted != verdict.predicted
        checks.append(InvariantCheck("measured transform verdicts equal predicted ones", float(disagreements), 0.0))
        checks.append(InvariantCheck("transform verdicts follow the k versus m + 1/2 rule", float(mismatched_rule), 0.0))
        checks.append(InvariantCheck("function and power transforms agree", float(fn_mismatch), 0.0))

        tight = canonical_tight(self.gf, power_transform(self.family, self.gf, 0.0))
        root = power_transform(self.family, self.gf, 0.5)
        checks.append(InvariantCheck(
            "canonical tight family is T^-1/2 phi",
            float(np.max(np.abs(self.perturbed(tight.vectors) - root.vectors))) / self.family.sup_norm(),
            1e-10,
        ))

        dual_verdict = classify_transform(self.family, self.gf, 1.0, 0.5)
        checks.append(InvariantCheck(
            "canonical dual is Parseval in H(T^1/2)",
            max(abs(dual_verdict.bounds.lower - 1.0), abs(dual_verdict.bounds.upper - 1.0)),
            TAU_PARS,
        ))

        report = metric_transformability(self.family)
        residual = report.residuals.get("parseval", 1.0) if report.clause == "iv" else 1.0
        checks.append(InvariantCheck("metric construction yields a Parseval frame", residual, TAU_PARS))
        return checks
