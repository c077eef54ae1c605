import csv
import json
from enum import Enum

import numpy as np

from src.frames import FrameBounds
from src.reporting import Report, jsonable, save_report, trajectory


class Colour(Enum):
    RED = "red"


def test_jsonable_types():
    converted = jsonable({
        1: np.float64(0.5),
        "ints": np.arange(3),
        "flag": np.bool_(True),
        "z": 1 + 2j,
        "enum": Colour.RED,
        "inf": float("inf"),
        "nested": (np.int64(4), [np.complex128(3j)]),
    })
    assert converted == {
        "1": 0.5,
        "ints": [0, 1, 2],
        "flag": True,
        "z": [1.0, 2.0],
        "enum": "red",
        "inf": "inf",
        "nested": [4, [[0.0, 3.0]]],
    }
    json.dumps(converted)


def _bounds(lower, upper):
    return FrameBounds(lower, upper, np.zeros(2), np.zeros(2))


def _report():
    bounds = [_bounds(1.0, 2.0), _bounds(0.5, 3.0)]
    return Report(
        command="analyze",
        config={"case": "exp", "params": {"g": "one"}},
        seed=7,
        results={"verdict": "FRAME", "bounds": bounds[-1].as_dict()},
        trajectory=trajectory([10, 100], bounds),
        agreement=[{"k": 0.5, "m": 0.0, "agrees": np.bool_(True)}],
    )


def test_save_report_files(tmp_path):
    written = save_report(_report(), str(tmp_path / "out"), timestamp="20240101_000000")
    assert [p.name for p in written] == [
        "analyze_20240101_000000.json",
        "analyze_20240101_000000_bounds.csv",
        "analyze_20240101_000000_agreement.csv",
    ]

    data = json.loads(written[0].read_text())
    assert data["timestamp"] == "20240101_000000"
    assert data["report"]["seed"] == 7
    assert data["report"]["trajectory"][1] == {"refinement": 100.0, "lower": 0.5, "upper": 3.0}

    with open(written[1], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["refinement", "lower", "upper"]
    assert [float(v) for v in rows[2]] == [100.0, 0.5, 3.0]

    with open(written[2], newline="") as f:
        rows = list(csv.DictReader(f))
    assert rows == [{"k": "0.5", "m": "0.0", "agrees": "True"}]


def test_sidecars_only_when_present(tmp_path):
    report = Report(command="verify", config={}, seed=1, results={"hilbert": {"passed": True}})
    written = save_report(report, str(tmp_path), timestamp="t")
    assert [p.name for p in written] == ["verify_t.json"]


def test_payload_is_deterministic():
    assert json.dumps(_report().payload()) == json.dumps(_report().payload())
