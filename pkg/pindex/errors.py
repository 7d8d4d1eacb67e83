"""File: errors.py.

Exception hierarchy and error formatting for pindex.
"""

import logging
from typing import Any

logger = logging.getLogger(__name__)


class PIndexError(Exception):
    """Base class for all errors raised by pindex."""

    #: Exit status used by the command line when this error escapes a command.
    exit_code = 1


class DimensionError(PIndexError):
    """Raised for invalid (n, kappa) pairs or mismatched matrix sizes."""

    pass


class ParameterError(PIndexError):
    """Raised when a normal-form or formula parameter is out of range."""

    pass


class DomainError(PIndexError):
    """Raised when a derivative is requested where it is undefined."""

    pass


class NumericalConsistencyError(PIndexError):
    """Raised when a quantity that must be real or integral is not."""

    pass


class SpectrumError(PIndexError):
    """Raised when a point expected in a spectrum is not found there."""

    pass


class ClassificationError(PIndexError):
    """Raised when M·P matches none of the ten normal-form cases."""

    pass


class DecompositionUnsupportedError(PIndexError):
    """Raised for spectra the constructive decomposition does not handle.

    Callers fall back to the numeric splitting-number route.
    """

    pass


class UnsupportedPointError(PIndexError):
    """Raised when a splitting pair is requested at an untabled point."""

    pass


class IntegrationError(PIndexError):
    """Raised when the fundamental solution misses its symplectic defect bound."""

    pass


class ConcatenationError(PIndexError):
    """Raised when two paths do not meet at the junction."""

    pass


class ConfigError(PIndexError):
    """Raised for unreadable input files or invalid command-line values."""

    pass


class ConvergenceError(PIndexError):
    """Raised when a schedule of refinements does not stabilize.

    Attributes:
        trace: The sequence of values observed along the schedule
    """

    exit_code = 2

    def __init__(self, message: str, trace: list[Any] | None = None) -> None:
        super().__init__(message)
        self.trace = trace or []


class SymmetryError(PIndexError):
    """Raised when a coefficient or gauge breaks the P-symmetry.

    Attributes:
        witness: The sample (time or point) where the violation was seen
    """

    def __init__(self, message: str, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


class TheoremViolationError(PIndexError):
    """Raised when a proved bound fails on valid data (an implementation bug)."""

    exit_code = 2


class CrossOracleError(PIndexError):
    """Raised when two independent index oracles disagree.

    Attributes:
        bundle: Diagnostic data (path, omega, crossings, both results)
    """

    exit_code = 2

    def __init__(self, message: str, bundle: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.bundle = bundle or {}


def format_error_message(
    error: BaseException,
    command: str,
    arguments: dict[str, Any],
) -> dict[str, Any]:
    """Format an error with context details for display.

    Args:
        error: The exception raised by the command
        command: The name of the command that failed
        arguments: The arguments the command was invoked with

    Returns:
        Dictionary with an error note and a possible fix (or None)
    """
    args_str = ", ".join(
        f"{k}={v}" for k, v in arguments.items() if v is not None and len(str(v)) < 50
    )
    error_note = (
        f"The command '{command}' failed with arguments {args_str}. "
        f"The error was: {error}"
    )

    possible_fix = None
    if isinstance(error, DimensionError):
        possible_fix = "Check n and kappa: 0 <= kappa < n-1 with n >= 2 for theorem runs."
    elif isinstance(error, ConvergenceError):
        possible_fix = (
            "Increase --modes or the refinement schedule, or inspect the trace "
            "with --verbose."
        )
    elif isinstance(error, ConfigError):
        possible_fix = "Check that the input file exists and is valid JSON."
    elif isinstance(error, (CrossOracleError, TheoremViolationError)):
        possible_fix = "This indicates a numerical bug; rerun with --verbose and keep the report."
    elif isinstance(error, SymmetryError):
        possible_fix = "The surface or coefficient must satisfy j(Px) = j(x)."

    return {"error_note": error_note, "possible_fix": possible_fix}
