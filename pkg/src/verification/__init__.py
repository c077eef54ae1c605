"""Invariant suites runnable from the `verify` command."""

from .metrics.evaluator import ResidualEvaluator, SuiteMetrics
from .runner import VerificationRunner
from .suites import SUITES

__all__ = ["ResidualEvaluator", "SuiteMetrics", "SUITES", "VerificationRunner"]
