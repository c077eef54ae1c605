from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..suites.base import SuiteResult


@dataclass
class SuiteMetrics:
    """
    Container for the summary of one suite run
    """
    module: str
    checks: int
    failures: int
    worst_margin: float
    execution_time: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


class ResidualEvaluator:
    """
    Summarizes invariant residuals against their tolerances
    """

    def compute_margin(self, residual: float, tolerance: float) -> float:
        """
        residual / tolerance; exact checks (tolerance 0) give 0 or inf
        """
        if not np.isfinite(residual):
            return float("inf")
        if tolerance == 0.0:
            return 0.0 if residual <= 0.0 else float("inf")
        return residual / tolerance

    def evaluate(self, result: SuiteResult, execution_time: float = 0.0) -> SuiteMetrics:
        margins = [self.compute_margin(c.residual, c.tolerance) for c in result.checks]
        return SuiteMetrics(
            module=result.module,
            checks=len(result.checks),
            failures=len(result.failures),
            worst_margin=max(margins) if margins else 0.0,
            execution_time=execution_time,
        )

    def evaluate_all(self, results: List[SuiteResult], times: Dict[str, float] = None) -> Dict[str, SuiteMetrics]:
        times = times or {}
        return {result.module: self.evaluate(result, times.get(result.module, 0.0)) for result in results}
