from typing import List

import numpy as np

from ...config import TAU_PARS
from ...frames import classify, frame_operator, mixed_frame_operator
from ...gallery import build_case, symbol_error
from ...genframe import build_genframe, canonical_tight
from .base import InvariantCheck, InvariantSuite

SHIPPED_CASES = (
    ("exp", {"g": "one"}),
    ("exp", {"g": "inv_x"}),
    ("exp", {"g": "x"}),
    ("exp", {"g": "smooth", "b": 0.5}),
    ("rkhs", {"mweight": "linear"}),
    ("rkhs", {"mweight": "two", "n": 2}),
    ("spherical", {"s": "const"}),
    ("spherical", {"s": "growing"}),
    ("spherical", {"s": "decaying"}),
    ("diagonal", {"exponent": -2.0}),
    ("diagonal", {"exponent": 0.0}),
    ("diagonal", {"exponent": 2.0}),
    ("e1_plus_en", {}),
    ("en_from_2", {}),
    ("rank_one_bessel", {}),
)

SYMBOL_GRIDS = (64, 128, 256, 512)


class GallerySuite(InvariantSuite):
    """
    Shipped example families against their predicted classification
    """
    module = "gallery"

    def prepare(self) -> None:
        self.cases = [build_case(name, params) for name, params in SHIPPED_CASES]

    def run_checks(self) -> List[InvariantCheck]:
        mismatched = [
            f"{case.name}{case.params}"
            for case in self.cases
            if classify(case.family, case.scan).verdict != case.predicted
        ]
        checks = [InvariantCheck(
            "measured verdicts equal predicted ones",
            float(len(mismatched)),
            0.0,
            detail=", ".join(mismatched) or None,
        )]

        for g in ("one", "smooth"):
            errors = [symbol_error(g, 1.0, n_x)["energy_error"] for n_x in SYMBOL_GRIDS]
            growth = max(later - earlier for earlier, later in zip(errors, errors[1:]))
            checks.append(InvariantCheck(f"symbol error decreases with refinement (g = {g})", max(growth, 0.0), 0.0))
        checks.append(InvariantCheck("identity symbol at the finest grid", symbol_error("one", 1.0, SYMBOL_GRIDS[-1])["energy_error"], 1e-3))

        worst = 0.0
        for case in self.cases:
            if case.name != "spherical":
                continue
            level = case.family
            tight = canonical_tight(build_genframe(level), level)
            worst = max(worst, float(np.max(np.abs(frame_operator(tight).eigenvalues - 1.0))))
        checks.append(InvariantCheck("spherical tight families have unit eigenvalues", worst, TAU_PARS))

        worst = 0.0
        for case in self.cases:
            if case.companion is None:
                continue
            identity = np.eye(case.family.dim)
            worst = max(worst, float(np.max(np.abs(self.perturbed(mixed_frame_operator(case.companion, case.family)) - identity))))
        checks.append(InvariantCheck("RKHS companion makes a reproducing pair with S = I", worst, TAU_PARS))
        return checks
