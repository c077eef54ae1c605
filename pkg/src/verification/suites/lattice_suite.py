from typing import List

import numpy as np

from ...config import TAU_CALC, TAU_RECON, TAU_SPECTRA
from ...hilbert import probe_vectors
from ...lattice import (
    MetricOp,
    ScaleSpace,
    build_metric_from_closed,
    collapse_check,
    dual_pairing_residual,
    lattice_norms,
    rg_norm,
    scale_unitarity,
    similarity_check,
)
from .base import InvariantCheck, InvariantSuite, random_positive

SIMILARITY_TRIALS = 25
SCALE_ORDERS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


class LatticeSuite(InvariantSuite):
    """
    Metric operators, lattice norms, Hilbert scales and similarity
    """
    module = "lattice"

    def prepare(self) -> None:
        self.metric = MetricOp.from_matrix(random_positive(self.rng, self.dim, floor=0.2))
        self.above_one = MetricOp.from_matrix(np.eye(self.dim) + random_positive(self.rng, self.dim))
        self.probes = probe_vectors(self.dim, self.seed, count=100)

    def run_checks(self) -> List[InvariantCheck]:
        root = self.metric.power(0.5)
        worst = 0.0
        for f in self.probes:
            expected = np.sqrt(np.linalg.norm(f) ** 2 + np.linalg.norm(root @ f) ** 2)
            worst = max(worst, abs(rg_norm(self.metric, self.perturbed(f)) - expected) / expected)
        checks = [InvariantCheck("R_G norm is the graph norm of G^1/2", worst, TAU_RECON)]

        failing, infinite = 0, 0
        for f in self.probes:
            lattice = lattice_norms(self.metric, f)
            failing += sum(not edge.holds for edge in lattice.edges)
            infinite += sum(not np.isfinite(edge.constant) for edge in lattice.edges)
        checks.append(InvariantCheck("lattice embeddings hold with finite constants", float(failing + infinite), 0.0))

        pairing = max(dual_pairing_residual(self.metric, f) for f in self.probes[:20])
        checks.append(InvariantCheck("H + H(G^-1) is the dual of H(R_G)", pairing, 1e-9))

        ratio, bound = collapse_check(self.metric, self.seed)
        checks.append(InvariantCheck("lattice norms are equivalent for bounded G and G^-1", max(ratio - bound, 0.0), 0.0))

        nesting = 0.0
        for f in self.probes:
            values = [ScaleSpace(self.above_one, a).norm(f) for a in SCALE_ORDERS]
            nesting = max(nesting, max(lo - hi for lo, hi in zip(values, values[1:])) / values[-1])
        checks.append(InvariantCheck("scale norms increase with the order", max(nesting, 0.0), TAU_CALC))
        checks.append(InvariantCheck(
            "G^1/2 is unitary between neighbouring scale spaces",
            scale_unitarity(self.above_one, -2, 2, self.seed),
            1e-9,
        ))

        closed = build_metric_from_closed(self.rng.standard_normal((self.dim + 1, self.dim)), self.seed)
        checks.append(InvariantCheck("closed-operator metrics realize the triplet", closed.triplet_violation, 1e-10))
        checks.append(InvariantCheck("closed-operator metrics are mutually inverse", closed.inverse_residual, 1e-10))

        failures, spectra = 0, 0.0
        for _ in range(SIMILARITY_TRIALS):
            a = self.rng.standard_normal((self.dim, self.dim))
            t = MetricOp.from_matrix(random_positive(self.rng, self.dim))
            b = t.op.matrix @ a @ t.power(-1.0)
            report = similarity_check(a, b, t)
            failures += not report.similar
            if report.spectral_distance is not None:
                spectra = max(spectra, report.spectral_distance / max(1.0, np.linalg.norm(a, 2)))
        checks.append(InvariantCheck("constructed conjugations are similar", float(failures), 0.0))
        checks.append(InvariantCheck("similar operators share their spectra", spectra, TAU_SPECTRA))
        return checks
