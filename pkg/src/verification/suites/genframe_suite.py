from typing import List

import numpy as np

from ...config import TAU_DUAL, TAU_RECON
from ...frames import DomainSubspace, frame_operator
from ...genframe import (
    build_genframe,
    canonical_dual,
    canonical_tight,
    dual_is_upper_semiframe,
    inverse_representer,
    kato_residual,
    lower_bound_certificate,
    riesz_representer,
)
from ...hilbert import probe_vectors
from .base import InvariantCheck, InvariantSuite, random_family


class GenFrameSuite(InvariantSuite):
    """
    Generalized frame operator on full and proper domains
    """
    module = "genframe"

    def prepare(self) -> None:
        self.family = random_family(self.rng, 2 * self.dim, self.dim)
        spanning = self.rng.standard_normal((max(self.dim - 2, 1), self.dim)) + 0j
        self.domain = DomainSubspace(spanning)

    def _energy_gap(self, family, expected) -> float:
        worst = 0.0
        for f in probe_vectors(self.dim, self.seed):
            target = expected(f)
            worst = max(worst, abs(family.energy(f) - target) / max(target, 1.0))
        return worst

    def run_checks(self) -> List[InvariantCheck]:
        full = build_genframe(self.family)
        proper = build_genframe(self.family, self.domain)
        s = frame_operator(self.family).matrix

        checks = [
            InvariantCheck("T coincides with S on the full domain",
                           float(np.max(np.abs(self.perturbed(full.op.matrix) - s))) / np.linalg.norm(s, 2), TAU_RECON),
            InvariantCheck("projector is idempotent and self-adjoint",
                           float(max(np.max(np.abs(proper.projector.matrix @ proper.projector.matrix - proper.projector.matrix)),
                                     np.max(np.abs(proper.projector.matrix - proper.projector.matrix.conj().T)))), TAU_RECON),
            InvariantCheck("Kato identity on the full domain", kato_residual(full, self.family, self.seed), 1e-9),
            InvariantCheck("Kato identity on a proper domain", kato_residual(proper, self.family, self.seed), 1e-9),
        ]

        for gf, family, label in ((full, self.family, "full"), (proper, self.family, "proper")):
            inv_root = gf.power(-0.5)
            dual = canonical_dual(gf, family)
            checks.append(InvariantCheck(
                f"canonical dual energy equals |T^-1/2 P f|^2 ({label} domain)",
                self._energy_gap(dual, lambda f: float(np.linalg.norm(inv_root @ f) ** 2)),
                1e-9,
            ))
            tight = canonical_tight(gf, family)
            checks.append(InvariantCheck(
                f"canonical tight family is Parseval on H_phi ({label} domain)",
                self._energy_gap(tight, lambda f: float(np.linalg.norm(gf.project(f)) ** 2)),
                1e-9,
            ))

        lowest = full.restricted.lambda_min
        inconsistent = sum(
            not lower_bound_certificate(self.family, m, full, self.seed).consistent
            for m in (0.5 * lowest, lowest, 2.0 * lowest)
        )
        checks.append(InvariantCheck("lower-bound certificate statements agree", float(inconsistent), 0.0))

        chi = self.family.with_vectors(np.array([riesz_representer(self.family, i, full) for i in range(self.family.size)]))
        eta = inverse_representer(chi, full)
        checks.append(InvariantCheck(
            "inverse representer recovers the family",
            float(np.max(np.abs(eta.vectors - self.family.vectors))) / max(self.family.sup_norm(), 1.0),
            TAU_DUAL,
        ))
        checks.append(InvariantCheck(
            "canonical dual of a frame is an upper semi-frame",
            float(not dual_is_upper_semiframe(self.family)),
            0.0,
        ))
        return checks
