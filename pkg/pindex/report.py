"""Structured run reports.

Every command produces a :class:`ReportDocument`: the command echo, the
effective configuration, named result sections and a list of verdicts, each
naming the oracle that produced it. Reports are written as JSON with floats
rounded to a fixed number of significant digits, so that reproducible runs give
byte-identical files.
"""

import json
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
from rich.console import Console
from rich.table import Table

from pindex._version import __version__

logger = logging.getLogger(__name__)


@dataclass
class Verdict:
    """One checked claim.

    Attributes:
        name: Short identifier of the check
        passed: Whether the claim holds
        oracle: The routine that produced the numbers
        detail: Human-readable supporting values
    """

    name: str
    passed: bool
    oracle: str
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "oracle": self.oracle, "detail": self.detail}


@dataclass
class ReportDocument:
    """Result document of one command run."""

    command: str
    arguments: dict[str, Any]
    config: dict[str, Any]
    sections: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    summary: str = ""
    started: float = field(default_factory=time.perf_counter)
    elapsed: float | None = None
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def add_section(self, name: str, content: Any) -> None:
        self.sections[name] = content

    def add_verdict(self, name: str, passed: bool, oracle: str, detail: str = "") -> Verdict:
        verdict = Verdict(name, bool(passed), oracle, detail)
        self.verdicts.append(verdict)
        if not verdict.passed:
            logger.warning(f"check failed: {name} ({oracle}) {detail}")
        return verdict

    @property
    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def finish(self) -> "ReportDocument":
        self.elapsed = time.perf_counter() - self.started
        return self

    def to_dict(self, reproducible: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "tool": "pindex",
            "version": __version__,
            "command": self.command,
            "arguments": self.arguments,
            "config": self.config,
            "sections": self.sections,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "counts": {"checks": len(self.verdicts), "failures": len(self.failures)},
            "summary": self.summary,
        }
        if not reproducible:
            data["created"] = self.created
            data["elapsed_seconds"] = self.elapsed
        return data

    def to_json(self, reproducible: bool = False, digits: int = 17) -> str:
        return dumps(self.to_dict(reproducible), digits=digits)

    def write(self, path: str | Path, reproducible: bool = False, digits: int = 17) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(reproducible, digits) + "\n")
        logger.info(f"report written to {path}")
        return path

    def render(self, console: Console) -> None:
        """Print the verdict table and summary line."""
        if self.verdicts:
            table = Table(title=f"pindex {self.command}")
            table.add_column("Check", style="cyan")
            table.add_column("Result")
            table.add_column("Oracle", style="blue")
            table.add_column("Detail", style="dim")
            for verdict in self.verdicts:
                result = "[green]pass[/]" if verdict.passed else "[bold red]FAIL[/]"
                table.add_row(verdict.name, result, verdict.oracle, verdict.detail)
            console.print(table)
        if self.summary:
            style = "green" if self.passed else "yellow"
            console.print(f"[{style}]{self.summary}[/]")


def _plain(value: Any, digits: int) -> Any:
    """JSON-native copy of ``value`` with floats rounded to ``digits`` significant digits."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    elif hasattr(value, "to_dict"):
        value = value.to_dict()
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        # nan and inf are not JSON
        if not math.isfinite(value):
            return str(value)
        return float(format(value, f".{digits}g"))
    if isinstance(value, complex):
        return [_plain(value.real, digits), _plain(value.imag, digits)]
    if isinstance(value, dict):
        return {str(k): _plain(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v, digits) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(data: Any, digits: int = 17, indent: int = 2) -> str:
    """JSON text with floats rounded to ``digits`` significant digits."""
    return json.dumps(_plain(data, digits), indent=indent, allow_nan=False)
