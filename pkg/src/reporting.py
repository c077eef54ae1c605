"""Report assembly and persistence for CLI runs."""

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .frames import FrameBounds

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays, enums and complex numbers into JSON types
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


@dataclass
class TrajectoryRow:
    refinement: float
    lower: float
    upper: float


def trajectory(refinements: Sequence[float], bounds: Sequence[FrameBounds]) -> List[TrajectoryRow]:
    return [TrajectoryRow(float(r), b.lower, b.upper) for r, b in zip(refinements, bounds)]


@dataclass
class Report:
    """
    Everything a run emits; `payload` is deterministic for a fixed config and seed
    """
    command: str
    config: Dict[str, Any]
    seed: int
    results: Dict[str, Any] = field(default_factory=dict)
    trajectory: List[TrajectoryRow] = field(default_factory=list)
    agreement: List[Dict[str, Any]] = field(default_factory=list)
    passed: bool = True

    def payload(self) -> Dict[str, Any]:
        return jsonable({
            "tool": "semiframe",
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "passed": self.passed,
            "results": self.results,
            "trajectory": [vars(row) for row in self.trajectory],
            "agreement": self.agreement,
        })


def save_report(report: Report, output_dir: str, timestamp: Optional[str] = None) -> List[Path]:
    """Write the JSON report and its CSV sidecars

    Args:
        report: Report to persist
        output_dir: Target directory, created if missing
        timestamp: Name suffix; defaults to the current time

    Returns:
        Paths of the written files
    """
    timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out / f"{report.command}_{timestamp}.json"
    with open(report_path, "w") as f:
        json.dump({"timestamp": timestamp, "report": report.payload()}, f, indent=2)
    written.append(report_path)

    if report.trajectory:
        csv_path = out / f"{report.command}_{timestamp}_bounds.csv"
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["refinement", "lower", "upper"])
            for row in report.trajectory:
                writer.writerow([repr(row.refinement), repr(row.lower), repr(row.upper)])
        written.append(csv_path)

    if report.agreement:
        csv_path = out / f"{report.command}_{timestamp}_agreement.csv"
        columns = list(report.agreement[0].keys())
        with open(csv_path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns)
            writer.writeheader()
            for row in report.agreement:
                writer.writerow(jsonable(row))
        written.append(csv_path)

    logger.info(f"Saved report to {report_path}")
    return written
