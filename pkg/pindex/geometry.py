"""P-symmetric convex hypersurfaces.

Gauges j with j(lambda x) = lambda j(x), the Hamiltonians H_alpha = j^alpha
and H_2 = j^2, polar gauges and Fenchel transforms, pinching constants and
P-symmetry validation. Ellipsoids with one radius per symplectic plane are
built in; other surfaces implement :class:`GaugeOracle`.
"""

import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from scipy import linalg

from pindex.core.symplectic import Dim, standard_P
from pindex.errors import ConfigError, DimensionError, DomainError, ParameterError, SymmetryError

logger = logging.getLogger(__name__)

#: Pinching thresholds on R / r.
RATIO_53 = float(np.sqrt(5 / 3))
RATIO_32 = float(np.sqrt(3 / 2))
RATIO_SQRT2 = float(np.sqrt(2))


class GaugeOracle(ABC):
    """Gauge of a convex body containing 0 and its Hamiltonians.

    Subclasses provide j, its gradient, the Hessian of H_2 = j^2 and the
    polar gauge with its gradient; the Hamiltonian H_alpha = j^alpha and its
    Fenchel transform follow from these.
    """

    def __init__(self, dim: Dim, alpha: float = 1.5) -> None:
        if not 1.0 < alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (1, 2], got {alpha}")
        self.dim = dim
        self.alpha = float(alpha)
        self.P = standard_P(dim)

    @abstractmethod
    def j(self, x: np.ndarray) -> float:
        """Gauge value."""

    @abstractmethod
    def grad_j(self, x: np.ndarray) -> np.ndarray:
        """Gradient of j, defined for x != 0."""

    @abstractmethod
    def hess_H2(self, x: np.ndarray) -> np.ndarray:
        """Hessian of H_2 = j^2, defined for x != 0."""

    @abstractmethod
    def polar(self, y: np.ndarray) -> float:
        """Polar gauge j*(y) = max over j(x) <= 1 of x . y."""

    @abstractmethod
    def grad_polar(self, y: np.ndarray) -> np.ndarray:
        """Gradient of the polar gauge, defined for y != 0."""

    @abstractmethod
    def hess_polar_squared(self, y: np.ndarray) -> np.ndarray:
        """Hessian of j*^2 (constant for quadratic gauges)."""

    @property
    def beta(self) -> float:
        """Conjugate exponent of alpha."""
        return self.alpha / (self.alpha - 1.0)

    def _check_nonzero(self, x: np.ndarray, what: str) -> None:
        if not np.any(x):
            raise DomainError(f"{what} is undefined at the origin")

    def H2(self, x: np.ndarray) -> float:
        return self.j(x) ** 2

    def grad_H2(self, x: np.ndarray) -> np.ndarray:
        if not np.any(x):
            return np.zeros_like(x, dtype=float)
        return 2.0 * self.j(x) * self.grad_j(x)

    def H_alpha(self, x: np.ndarray) -> float:
        return self.j(x) ** self.alpha

    def grad_H_alpha(self, x: np.ndarray) -> np.ndarray:
        if not np.any(x):
            return np.zeros_like(x, dtype=float)
        return self.alpha * self.j(x) ** (self.alpha - 1) * self.grad_j(x)

    def fenchel(self, y: np.ndarray) -> float:
        """G(y) = beta^{-1} alpha^{-beta/alpha} j*(y)^beta, the transform of H_alpha."""
        scale = self.alpha ** (-self.beta / self.alpha) / self.beta
        return scale * self.polar(y) ** self.beta

    def fenchel_grad(self, y: np.ndarray) -> np.ndarray:
        if not np.any(y):
            return np.zeros_like(y, dtype=float)
        scale = self.alpha ** (-self.beta / self.alpha)
        return scale * self.polar(y) ** (self.beta - 1) * self.grad_polar(y)

    def fenchel_hess(self, y: np.ndarray) -> np.ndarray:
        """Hessian of G; zero at the origin when beta > 2."""
        size = len(y)
        scale = self.alpha ** (-self.beta / self.alpha)
        if not np.any(y):
            if self.beta > 2:
                return np.zeros((size, size))
            return scale * self.hess_polar_squared(y) / 2
        p = self.polar(y)
        g = self.grad_polar(y)
        # j*^beta = (j*^2)^{beta/2}
        half = self.beta / 2
        return scale / self.beta * (
            half * p ** (self.beta - 2) * self.hess_polar_squared(y)
            + half * (half - 1) * p ** (self.beta - 4) * np.outer(2 * p * g, 2 * p * g)
        )

    def invariant_sectors(self) -> list[list[int]]:
        """Coordinate sets invariant under the Hamiltonian flow; the full space by default."""
        return [list(range(self.dim.size))]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Radial projection of x != 0 onto the surface j = 1."""
        self._check_nonzero(x, "the radial projection")
        return x / self.j(x)


class EllipsoidSurface:
    """Ellipsoid with radius r_k in the symplectic plane (x_k, x_{n+k})."""

    def __init__(self, dim: Dim, radii: list[float], alpha: float = 1.5) -> None:
        radii = [float(r) for r in radii]
        if len(radii) != dim.n:
            raise DimensionError(f"expected {dim.n} radii, got {len(radii)}")
        if any(r <= 0 for r in radii):
            raise ParameterError(f"radii must be positive, got {radii}")
        if not 1.0 < alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (1, 2], got {alpha}")
        self.dim = dim
        self.radii = radii
        self.alpha = float(alpha)

    @property
    def weights(self) -> np.ndarray:
        """Diagonal of W with j(x)^2 = x^T W x."""
        inverse = 1.0 / np.array(self.radii) ** 2
        return np.concatenate([inverse, inverse])

    def gauge(self) -> "EllipsoidGauge":
        return EllipsoidGauge(self)

    def plane_action(self, k: int) -> float:
        """Action pi r_k^2 of the closed characteristic in plane k."""
        return float(np.pi * self.radii[k] ** 2)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.dim.n, "kappa": self.dim.kappa, "radii": list(self.radii), "alpha": self.alpha}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EllipsoidSurface":
        """Build a surface from ``{"n", "kappa", "radii", "alpha"}``.

        Raises:
            ConfigError: If a key is missing or has the wrong type
        """
        try:
            dim = Dim(int(data["n"]), int(data.get("kappa", 0)))
            return cls(dim, list(data["radii"]), float(data.get("alpha", 1.5)))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed surface record: {e}") from e

    def __repr__(self) -> str:
        return f"EllipsoidSurface(n={self.dim.n}, kappa={self.dim.kappa}, radii={self.radii})"


class EllipsoidGauge(GaugeOracle):
    """Quadratic gauge j(x) = sqrt(x^T W x) of an :class:`EllipsoidSurface`."""

    def __init__(self, surface: EllipsoidSurface) -> None:
        super().__init__(surface.dim, surface.alpha)
        self.surface = surface
        self.W = surface.weights
        self.W_inv = 1.0 / self.W

    def j(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sqrt(np.dot(self.W * x, x)))

    def grad_j(self, x: np.ndarray) -> np.ndarray:
        self._check_nonzero(x, "grad j")
        return self.W * x / self.j(x)

    def hess_j(self, x: np.ndarray) -> np.ndarray:
        self._check_nonzero(x, "the Hessian of j")
        value = self.j(x)
        Wx = self.W * x
        return np.diag(self.W) / value - np.outer(Wx, Wx) / value**3

    def hess_H2(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * np.diag(self.W)

    def invariant_sectors(self) -> list[list[int]]:
        """Single symplectic planes, then the full space."""
        n = self.dim.n
        return [[k, n + k] for k in range(n)] + [list(range(2 * n))]

    def polar(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        return float(np.sqrt(np.dot(self.W_inv * y, y)))

    def grad_polar(self, y: np.ndarray) -> np.ndarray:
        self._check_nonzero(y, "grad j*")
        return self.W_inv * y / self.polar(y)

    def hess_polar_squared(self, y: np.ndarray) -> np.ndarray:
        return 2.0 * np.diag(self.W_inv)

    def fenchel_hess(self, y: np.ndarray) -> np.ndarray:
        size = len(y)
        scale = self.alpha ** (-self.beta / self.alpha)
        if not np.any(y):
            return np.zeros((size, size)) if self.beta > 2 else scale * np.diag(self.W_inv)
        p = self.polar(y)
        v = self.W_inv * y
        return scale * (
            p ** (self.beta - 2) * np.diag(self.W_inv) + (self.beta - 2) * p ** (self.beta - 4) * np.outer(v, v)
        )


class GaugeValues(NamedTuple):
    j: float
    grad_j: np.ndarray | None
    H2: float
    grad_H2: np.ndarray | None
    hess_H2: np.ndarray | None
    H_alpha: float
    grad_H_alpha: np.ndarray | None


def gauge_eval(
    surface: EllipsoidSurface | GaugeOracle,
    x: np.ndarray,
    derivatives: bool = True,
) -> GaugeValues:
    """Evaluate j, H_2, H_alpha and (optionally) their derivatives at x.

    Raises:
        DomainError: If derivatives are requested at x = 0
    """
    gauge = surface.gauge() if isinstance(surface, EllipsoidSurface) else surface
    x = np.asarray(x, dtype=float)
    if x.shape != (gauge.dim.size,):
        raise DimensionError(f"expected a vector of length {gauge.dim.size}, got {x.shape}")
    value = gauge.j(x)
    if not derivatives:
        return GaugeValues(value, None, value**2, None, None, value**gauge.alpha, None)
    gauge._check_nonzero(x, "derivatives of the gauge")
    return GaugeValues(
        j=value,
        grad_j=gauge.grad_j(x),
        H2=gauge.H2(x),
        grad_H2=gauge.grad_H2(x),
        hess_H2=gauge.hess_H2(x),
        H_alpha=gauge.H_alpha(x),
        grad_H_alpha=gauge.grad_H_alpha(x),
    )


def polar_gauge(surface: EllipsoidSurface | GaugeOracle, y: np.ndarray) -> float:
    """j*(y); for ellipsoids sqrt(sum_k r_k^2 (y_k^2 + y_{n+k}^2))."""
    gauge = surface.gauge() if isinstance(surface, EllipsoidSurface) else surface
    return gauge.polar(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class PinchingCertificate:
    """Pinching radii of a surface and the threshold checks on R / r."""

    r: float
    R: float
    estimated: bool = False
    ratio: float = field(init=False)
    passes_53: bool = field(init=False)
    passes_32: bool = field(init=False)
    passes_sqrt2: bool = field(init=False)

    def __post_init__(self) -> None:
        if not 0 < self.r <= self.R:
            raise ParameterError(f"pinching radii must satisfy 0 < r <= R, got r={self.r}, R={self.R}")
        ratio = self.R / self.r
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "passes_53", ratio < RATIO_53)
        object.__setattr__(self, "passes_32", ratio < RATIO_32)
        object.__setattr__(self, "passes_sqrt2", ratio < RATIO_SQRT2)

    def to_dict(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "R": self.R,
            "ratio": self.ratio,
            "passes_53": self.passes_53,
            "passes_32": self.passes_32,
            "passes_sqrt2": self.passes_sqrt2,
            "estimated": self.estimated,
        }


def pinching_certificate(surface: EllipsoidSurface) -> PinchingCertificate:
    """Exact pinching radii r = min r_k, R = max r_k of an ellipsoid."""
    return PinchingCertificate(r=min(surface.radii), R=max(surface.radii))


def sample_surface(gauge: GaugeOracle, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of {j = 1}, one per row."""
    directions = rng.normal(size=(samples, gauge.dim.size))
    return np.array([d / gauge.j(d) for d in directions])


def pinching_bounds_sampled(gauge: GaugeOracle, samples: int = 1000, seed: int = 0) -> PinchingCertificate:
    """Estimate r and R from eigen-bounds of H_2''/2 at sampled surface points.

    This is an estimate, not a certificate.
    """
    rng = np.random.default_rng(seed)
    lowest, highest = np.inf, 0.0
    for x in sample_surface(gauge, samples, rng):
        values = linalg.eigvalsh(gauge.hess_H2(x) / 2)
        lowest = min(lowest, float(values[0]))
        highest = max(highest, float(values[-1]))
    if lowest <= 0:
        raise DomainError("sampled Hessian of H_2 is not positive definite")
    return PinchingCertificate(r=1 / np.sqrt(highest), R=1 / np.sqrt(lowest), estimated=True)


def validate_P_symmetry(
    surface: EllipsoidSurface | GaugeOracle,
    samples: int = 1000,
    seed: int = 0,
    tol: float = 1e-12,
    raise_on_failure: bool = True,
) -> bool:
    """Check j(P x) = 1 at random points x of the surface.

    Raises:
        SymmetryError: On a violation when ``raise_on_failure`` is set
    """
    gauge = surface.gauge() if isinstance(surface, EllipsoidSurface) else surface
    if samples <= 0:
        logger.warning("no samples requested; P-symmetry holds vacuously")
        return True
    rng = np.random.default_rng(seed)
    for x in sample_surface(gauge, samples, rng):
        deviation = abs(gauge.j(gauge.P @ x) - 1.0)
        if deviation > tol:
            message = f"j(Px) differs from 1 by {deviation:.3e}"
            if raise_on_failure:
                raise SymmetryError(message, witness=x.tolist())
            logger.warning(f"{message} at {x}")
            return False
    return True


def load_surface(path: str | Path) -> EllipsoidSurface:
    """Read a surface file.

    Raises:
        ConfigError: If the file is missing or not valid JSON
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read surface file {path}: {e}") from e
    return EllipsoidSurface.from_dict(data)


def save_surface(surface: EllipsoidSurface, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(surface.to_dict(), f, indent=2)
