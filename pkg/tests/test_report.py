"""Tests for report documents and their JSON encoding."""

import json
import os
import sys

import numpy as np
from rich.console import Console

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from pindex._version import __version__
from pindex.report import ReportDocument, dumps


def make_report():
    report = ReportDocument(command="iterate", arguments={"m": [1, 2]}, config={"seed": 0})
    report.add_section("values", {"pi": np.pi, "matrix": np.eye(2), "omega": 1j})
    report.add_verdict("first", True, "oracle_a", "ok")
    report.add_verdict("second", False, "oracle_b", "mismatch")
    report.summary = "1 of 2 checks passed"
    return report.finish()


def test_floats_keep_seventeen_digits():
    """At 17 significant digits floats read back exactly and integers stay integers."""
    text = dumps({"pi": np.pi, "third": 1 / 3, "two": 2.0, "count": 3})
    data = json.loads(text)
    assert data["pi"] == np.pi
    assert data["third"] == 1 / 3
    assert '"two": 2.0' in text
    assert data["count"] == 3


def test_floats_are_rounded_to_digits():
    """Fewer digits round the written value."""
    data = json.loads(dumps({"pi": np.pi, "values": np.array([2 / 3, 1e-20 / 3])}, digits=6))
    assert data["pi"] == 3.14159
    assert data["values"] == [0.666667, 3.33333e-21]


def test_special_values():
    """nan and inf become strings, complex numbers become pairs."""
    data = json.loads(dumps({"a": float("nan"), "b": float("inf"), "c": 1 - 2j, "d": np.int64(4)}))
    assert data["a"] == "nan"
    assert data["b"] == "inf"
    assert data["c"] == [1.0, -2.0]
    assert data["d"] == 4


def test_report_layout():
    """The document echoes the command and counts the verdicts."""
    report = make_report()
    data = report.to_dict()
    assert data["tool"] == "pindex"
    assert data["version"] == __version__
    assert data["counts"] == {"checks": 2, "failures": 1}
    assert [v.name for v in report.failures] == ["second"]
    assert not report.passed
    assert "created" in data and data["elapsed_seconds"] is not None


def test_reproducible_reports_are_identical():
    """Reproducible output omits timing and timestamps."""
    first = make_report().to_json(reproducible=True)
    second = make_report().to_json(reproducible=True)
    assert first == second
    data = json.loads(first)
    assert "created" not in data and "elapsed_seconds" not in data
    assert data["sections"]["values"]["omega"] == [0.0, 1.0]


def test_write_creates_parent_directories(temp_directory):
    """write creates missing directories and ends with a newline."""
    path = make_report().write(os.path.join(temp_directory, "nested", "report.json"), reproducible=True)
    text = path.read_text()
    assert text.endswith("\n")
    assert json.loads(text)["command"] == "iterate"


def test_render_prints_verdicts():
    """The rich table lists every verdict and the summary."""
    console = Console(record=True, width=120)
    make_report().render(console)
    output = console.export_text()
    assert "FAIL" in output
    assert "oracle_a" in output
    assert "1 of 2 checks passed" in output
