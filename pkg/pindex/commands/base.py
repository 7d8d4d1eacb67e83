"""Base class for pindex commands.

Each command is one pipeline of the command-line interface. It declares its
own arguments, runs against the effective configuration and returns a
:class:`~pindex.report.ReportDocument`.
"""

import argparse
import math
from abc import ABC, abstractmethod
from typing import Any, ClassVar

from pindex.errors import ParameterError
from pindex.report import ReportDocument


class BaseCommand(ABC):
    """Base class for all commands.

    Each command must define:
    - name: The subcommand name on the command line
    - description: One-line help text
    - run(): The pipeline itself
    """

    name: ClassVar[str]
    description: ClassVar[str]

    def __init__(self) -> None:
        """Initialize the command.

        Validates that required class variables are defined.
        """
        if not getattr(self.__class__, "name", None):
            raise ValueError(f"{self.__class__.__name__} must define a 'name' class variable")
        if not getattr(self.__class__, "description", None):
            raise ValueError(f"{self.__class__.__name__} must define a 'description' class variable")

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments; none by default."""

    @abstractmethod
    def run(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        """Run the pipeline.

        Args:
            args: Parsed command-line arguments
            config: Effective configuration with command-line overrides applied

        Returns:
            The report of the run
        """
        raise NotImplementedError("Subclasses must implement the run method")

    def new_report(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        arguments = {
            key: value for key, value in sorted(vars(args).items())
            if key not in ("command", "handler") and not callable(value)
        }
        return ReportDocument(command=self.name, arguments=arguments, config=dict(sorted(config.items())))


def parse_int_list(text: str) -> list[int]:
    """Parse "1,2,3" or a range "1-4" into integers."""
    values: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part[1:]:
                low, high = part.split("-", 1)
                values.extend(range(int(low), int(high) + 1))
            else:
                values.append(int(part))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid integer list: {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def parse_dim_list(text: str) -> list[tuple[int, int]]:
    """Parse "2:0,3:1" into (n, kappa) pairs with 0 <= kappa <= n."""
    values: list[tuple[int, int]] = []
    try:
        for part in text.split(","):
            if not part.strip():
                continue
            n, kappa = (int(v) for v in part.split(":"))
            if n < 1 or not 0 <= kappa <= n:
                raise ValueError(part)
            values.append((n, kappa))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid dimension list: {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("empty dimension list")
    return values


def parse_omega(text: str) -> complex:
    """Parse a unit-circle point: a complex literal, or "angle:<radians>"."""
    text = text.strip()
    try:
        if text.startswith("angle:"):
            theta = float(text[len("angle:"):])
            return complex(math.cos(theta), math.sin(theta))
        return complex(text.replace("i", "j"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid omega: {text!r}") from e


def parse_omega_list(text: str) -> list[complex]:
    values = [parse_omega(part) for part in text.split(",") if part.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty omega list")
    return values


def require(condition: bool, message: str) -> None:
    """Raise a usage error unless condition holds."""
    if not condition:
        raise ParameterError(message)
