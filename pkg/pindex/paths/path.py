"""Coefficient functions and sampled symplectic paths."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg

from pindex.config import DEFAULT_TOLERANCES
from pindex.core.symplectic import half_dim, is_symplectic, standard_J, symplectic_inverse
from pindex.errors import ConfigError, SymmetryError

logger = logging.getLogger(__name__)

MatrixFunction = Callable[[float], np.ndarray]


def magnus_step(generator: MatrixFunction, t0: float, h: float) -> np.ndarray:
    """Fourth-order Magnus propagator of gamma' = J B(t) gamma over [t0, t0 + h]."""
    J = standard_J(half_dim(generator(t0)))
    offset = np.sqrt(3) / 6
    A1 = J @ generator(t0 + (0.5 - offset) * h)
    A2 = J @ generator(t0 + (0.5 + offset) * h)
    omega = 0.5 * h * (A1 + A2) - (np.sqrt(3) / 12) * h**2 * (A1 @ A2 - A2 @ A1)
    return linalg.expm(omega)


@dataclass
class CoefficientFunction:
    """Symmetric coefficient A(t) of the linear system gamma' = J A(t) gamma.

    Attributes:
        func: Map t -> symmetric 2n x 2n matrix
        half_period: T = tau_2 / 2
        P: Symmetry used to extend A beyond [0, T] by A(t + T) = P A(t) P
        periodic: True when ``func`` is already defined on the whole line
        symmetry_checked: Set once the symmetry has been verified
    """

    func: MatrixFunction
    half_period: float
    P: np.ndarray | None = None
    periodic: bool = False
    symmetry_checked: bool = False

    def __call__(self, t: float) -> np.ndarray:
        if self.periodic or self.P is None:
            return np.asarray(self.func(t), dtype=float)
        # left-continuous at the junctions kT
        k = max(int(np.ceil(t / self.half_period - 1e-12)) - 1, 0)
        value = np.asarray(self.func(t - k * self.half_period), dtype=float)
        if k % 2:
            return self.P @ value @ self.P
        return value

    def check_symmetry(
        self,
        P: np.ndarray | None = None,
        samples: int = 16,
        tol_sym: float | None = None,
    ) -> None:
        """Check A(t) symmetric and, for periodic data, A(t + T) = P A(t) P.

        Raises:
            SymmetryError: With the offending time as witness
        """
        tol_sym = DEFAULT_TOLERANCES.tol_sym if tol_sym is None else tol_sym
        P = self.P if P is None else P
        for t in np.linspace(0.0, self.half_period, samples, endpoint=False):
            value = self(t)
            scale = max(1.0, float(np.max(np.abs(value))))
            if np.max(np.abs(value - value.T)) > tol_sym * scale:
                raise SymmetryError(f"A(t) is not symmetric at t={t}", witness=float(t))
            if self.periodic and P is not None:
                shifted = self(t + self.half_period)
                if np.max(np.abs(shifted - P @ value @ P)) > tol_sym * scale:
                    raise SymmetryError(
                        f"A(t + T) differs from P A(t) P at t={t}",
                        witness=float(t),
                    )
        self.symmetry_checked = True

    @classmethod
    def constant(cls, A: np.ndarray, half_period: float) -> "CoefficientFunction":
        """Constant coefficient A on [0, half_period]."""
        A = np.asarray(A, dtype=float)
        return cls(func=lambda t: A, half_period=half_period, periodic=True)


@dataclass
class SymplecticPath:
    """Sampled path gamma: [0, T] -> Sp(2n).

    Attributes:
        times: Increasing sample times, starting at 0
        matrices: Samples gamma(t_k), shape (K, 2n, 2n)
        generator: B(t) with gamma' = J B gamma, when known
        evaluator: Exact gamma(t), when known
    """

    times: np.ndarray
    matrices: np.ndarray
    generator: CoefficientFunction | None = None
    evaluator: MatrixFunction | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.matrices = np.asarray(self.matrices, dtype=float)
        if self.matrices.ndim != 3 or len(self.times) != len(self.matrices) or len(self.times) < 2:
            raise ConfigError("path samples and times do not match")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("path times must be strictly increasing")

    @property
    def n(self) -> int:
        return half_dim(self.matrices[0])

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def start(self) -> np.ndarray:
        return self.matrices[0]

    @property
    def endpoint(self) -> np.ndarray:
        return self.matrices[-1]

    def _locate(self, t: float) -> int:
        return int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2))

    def at(self, t: float) -> np.ndarray:
        """Evaluate gamma(t) between samples."""
        t = float(np.clip(t, self.t_start, self.t_end))
        if self.evaluator is not None:
            return np.asarray(self.evaluator(t), dtype=float)
        k = self._locate(t)
        t0 = self.times[k]
        if t == t0:
            return self.matrices[k]
        if self.generator is not None:
            value = self.matrices[k]
            substeps = 4
            h = (t - t0) / substeps
            for j in range(substeps):
                value = magnus_step(self.generator, t0 + j * h, h) @ value
            return value
        # exponential interpolation between consecutive samples
        step = self.matrices[k + 1] @ symplectic_inverse(self.matrices[k])
        fraction = (t - t0) / (self.times[k + 1] - t0)
        log_step = np.real(linalg.logm(step))
        return linalg.expm(fraction * log_step) @ self.matrices[k]

    def generator_at(self, t: float) -> np.ndarray:
        """Symmetric B(t) with gamma'(t) = J B(t) gamma(t)."""
        if self.generator is not None:
            return self.generator(float(t))
        k = self._locate(float(t))
        step = self.matrices[k + 1] @ symplectic_inverse(self.matrices[k])
        log_step = np.real(linalg.logm(step)) / (self.times[k + 1] - self.times[k])
        B = -standard_J(self.n) @ log_step
        return (B + B.T) / 2

    def sampled_generator(self) -> CoefficientFunction:
        """Piecewise-constant generator recovered from the samples."""
        return CoefficientFunction(func=self.generator_at, half_period=self.t_end)

    def validate(self, based: bool = True, tol_sp: float | None = None) -> None:
        """Check gamma(0) = I (if ``based``) and that every sample is symplectic.

        Raises:
            ConfigError: On a violated path invariant
        """
        if based and not np.allclose(self.start, np.eye(2 * self.n), atol=1e-10):
            raise ConfigError("path does not start at the identity")
        for t, M in zip(self.times, self.matrices):
            if not is_symplectic(M, tol_sp):
                raise ConfigError(f"sample at t={t} is not symplectic")

    def max_step(self) -> float:
        """Largest matrix jump between consecutive samples."""
        return float(np.max(np.abs(np.diff(self.matrices, axis=0)))) if len(self.times) > 1 else 0.0

    def to_dict(self) -> dict[str, Any]:
        """Serialize as ``{"T", "samples": [{"t", "rows"}, ...]}``."""
        return {
            "T": self.t_end,
            "samples": [
                {"t": float(t), "rows": [[float(x) for x in row] for row in M]}
                for t, M in zip(self.times, self.matrices)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SymplecticPath":
        """Parse a stored path; the generator is recovered from the samples.

        Raises:
            ConfigError: If the record is malformed
        """
        try:
            T = float(data["T"])
            samples = data["samples"]
            times = np.array([sample["t"] for sample in samples], dtype=float)
            matrices = np.array([sample["rows"] for sample in samples], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed path record: {e}") from e
        if matrices.ndim != 3 or len(times) < 2:
            raise ConfigError(f"path record needs at least two square samples, got shape {matrices.shape}")
        if abs(times[-1] - T) > 1e-12 * max(1.0, abs(T)):
            raise ConfigError(f"last sample at t={times[-1]} differs from T={T}")
        path = cls(times=times, matrices=matrices)
        path.validate(based=False)
        return path
