import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..config import RESULTS_DIR
from ..reporting import Report, save_report
from .metrics.evaluator import ResidualEvaluator, SuiteMetrics
from .suites.base import InvariantCheck, InvariantSuite, SuiteResult

logger = logging.getLogger(__name__)


class VerificationRunner:
    """
    Runs invariant suites and collects their residuals
    """

    def __init__(self,
                 suites: List[InvariantSuite],
                 evaluator: ResidualEvaluator,
                 config: Optional[Dict[str, Any]] = None):
        self.suites = suites
        self.evaluator = evaluator
        self.config = config or {}
        self.last_written: List[Path] = []

    def _run_one(self, suite: InvariantSuite) -> SuiteResult:
        try:
            return suite.run_suite()
        except Exception as e:
            logger.error(f"Suite '{suite.module}' raised {type(e).__name__}: {str(e)}")
            return SuiteResult(suite.module, [InvariantCheck("suite completes", float("inf"), 0.0, detail=str(e))])

    def _build_report(self, results: List[SuiteResult], metrics: Dict[str, SuiteMetrics], seed: int) -> Report:
        return Report(
            command="verify",
            config=self.config,
            seed=seed,
            results={
                result.module: {
                    "passed": result.passed,
                    "failures": metrics[result.module].failures,
                    "worst_margin": metrics[result.module].worst_margin,
                    "checks": [check.as_dict() for check in result.checks],
                }
                for result in results
            },
            passed=all(result.passed for result in results),
        )

    def _save_results(self, report: Report, output_dir: str) -> None:
        """Save the verification report to file

        Args:
            report: Assembled report
            output_dir: Directory for the JSON report
        """
        self.last_written = save_report(report, output_dir)

    def run(self,
            save_results: bool = True,
            output_dir: str = RESULTS_DIR,
            progress_callback: Optional[Any] = None) -> Report:
        """Run every configured suite

        Args:
            save_results: Whether to save the report to file
            output_dir: Where reports are written
            progress_callback: Optional callback for progress

        Returns:
            Report with one entry per suite
        """
        if not self.suites:
            raise ValueError("No suites to run")

        results, times = [], {}
        total = len(self.suites)
        for i, suite in enumerate(self.suites):
            start = time.time()
            result = self._run_one(suite)
            times[suite.module] = time.time() - start
            results.append(result)
            for failure in result.failures:
                logger.warning(f"{suite.module}: '{failure.name}' residual {failure.residual:.3e} > {failure.tolerance:.1e}")

            if progress_callback:
                progress_callback(int((i + 1) / total * 100))

        metrics = self.evaluator.evaluate_all(results, times)
        for name, summary in metrics.items():
            logger.info(f"Suite {name}: {summary.checks - summary.failures}/{summary.checks} passed in {summary.execution_time:.2f}s")

        report = self._build_report(results, metrics, self.suites[0].seed)
        if save_results:
            self._save_results(report, output_dir)
        return report
