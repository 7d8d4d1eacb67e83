"""Symplectic linear algebra for P-index computations.

Standard matrices J and P, the diamond product, the determinant function
D_{P,omega}, nullities, Krein types, Floquet spectra and elliptic heights.
All functions are pure; tolerances default to the run's frozen
:class:`~pindex.config.Tolerances`.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg

from pindex.config import DEFAULT_TOLERANCES
from pindex.errors import (
    DimensionError,
    NumericalConsistencyError,
    ParameterError,
    SpectrumError,
)

logger = logging.getLogger(__name__)

#: Largest half-dimension handled by the dense routines.
MAX_HALF_DIM = 8

#: Allowed deviation of a unit-circle value from modulus one.
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Dim:
    """Half-dimension n and symmetric block size kappa.

    Attributes:
        n: Half-dimension, matrices are 2n x 2n
        kappa: Number of planes on which P acts as the identity
    """

    n: int
    kappa: int = 0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DimensionError(f"n must be a positive integer, got {self.n}")
        if self.n > MAX_HALF_DIM:
            raise DimensionError(f"n={self.n} exceeds the dense envelope n <= {MAX_HALF_DIM}")
        if int(self.kappa) != self.kappa or not 0 <= self.kappa <= self.n:
            raise DimensionError(f"kappa must satisfy 0 <= kappa <= n, got {self.kappa}")

    @property
    def size(self) -> int:
        """Matrix size 2n."""
        return 2 * self.n

    def require_theorem_range(self) -> "Dim":
        """Check n >= 2 and 0 <= kappa < n-1, the range of the stability theorem.

        Returns:
            self, for chaining

        Raises:
            DimensionError: If the pair is outside the range
        """
        if self.n < 2 or self.kappa >= self.n - 1:
            raise DimensionError(
                f"(n={self.n}, kappa={self.kappa}) is outside 0 <= kappa < n-1, n >= 2",
            )
        return self

    def to_dict(self) -> dict[str, int]:
        return {"n": self.n, "kappa": self.kappa}


def standard_J(n: int) -> np.ndarray:
    """Return J = [[0, -I_n], [I_n, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def standard_P(dim: Dim) -> np.ndarray:
    """Return P = diag(-I_{n-kappa}, I_kappa, -I_{n-kappa}, I_kappa)."""
    half = np.concatenate([-np.ones(dim.n - dim.kappa), np.ones(dim.kappa)])
    return np.diag(np.concatenate([half, half]))


def make_standard_matrices(dim: Dim, strict: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Build the standard symplectic form J and the symmetry P for ``dim``.

    Args:
        dim: Dimension data
        strict: Enforce the theorem range 0 <= kappa < n-1

    Returns:
        Tuple (J, P)

    Raises:
        DimensionError: If ``strict`` and the pair is out of range
    """
    if strict:
        dim.require_theorem_range()
    return standard_J(dim.n), standard_P(dim)


def half_dim(M: np.ndarray) -> int:
    """Return n for a 2n x 2n matrix.

    Raises:
        DimensionError: If M is not square of even size
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise DimensionError(f"expected a square matrix of even size, got shape {M.shape}")
    return M.shape[0] // 2


def rotation(theta: float) -> np.ndarray:
    """Return R(theta) = [[cos, -sin], [sin, cos]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def diamond(M1: np.ndarray, M2: np.ndarray) -> np.ndarray:
    """Return the diamond product M1 <> M2.

    With Mi = [[Ai, Bi], [Ci, Di]] in n_i x n_i blocks the result is
    [[A1, 0, B1, 0], [0, A2, 0, B2], [C1, 0, D1, 0], [0, C2, 0, D2]].

    Raises:
        DimensionError: If an input is not square of even size
    """
    n1, n2 = half_dim(M1), half_dim(M2)
    M1 = np.asarray(M1)
    M2 = np.asarray(M2)
    dtype = np.result_type(M1, M2)
    n = n1 + n2
    out = np.zeros((2 * n, 2 * n), dtype=dtype)
    idx1 = np.r_[0:n1, n : n + n1]
    idx2 = np.r_[n1:n, n + n1 : 2 * n]
    out[np.ix_(idx1, idx1)] = M1
    out[np.ix_(idx2, idx2)] = M2
    return out


def diamond_all(*blocks: np.ndarray) -> np.ndarray:
    """Diamond product of several blocks, left to right."""
    if not blocks:
        raise DimensionError("diamond_all needs at least one block")
    result = np.asarray(blocks[0])
    for block in blocks[1:]:
        result = diamond(result, block)
    return result


def plane_indices(n: int, k: int) -> list[int]:
    """Coordinates (x_k, x_{n+k}) of the k-th symplectic plane."""
    return [k, n + k]


def symplectic_defect(M: np.ndarray) -> float:
    """Return the max-norm of M^T J M - J."""
    J = standard_J(half_dim(M))
    return float(np.max(np.abs(M.T @ J @ M - J)))


def is_symplectic(M: np.ndarray, tol: float | None = None) -> bool:
    """Check M^T J M = J within ``tol`` (tol_sp by default), scaled by |M|^2."""
    tol = DEFAULT_TOLERANCES.tol_sp if tol is None else tol
    scale = max(1.0, float(np.max(np.abs(M))) ** 2)
    return symplectic_defect(M) <= tol * scale


def as_omega(value: complex | float) -> complex:
    """Validate a point of the unit circle.

    Raises:
        ParameterError: If |omega| differs from 1
    """
    omega = complex(value)
    if abs(abs(omega) - 1.0) > UNIT_TOL:
        raise ParameterError(f"omega={omega} is not on the unit circle")
    return omega


def omega_from_angle(theta: float) -> complex:
    """Return exp(i theta)."""
    return complex(np.cos(theta), np.sin(theta))


def D_P_omega(M: np.ndarray, omega: complex, P: np.ndarray) -> float:
    """Evaluate D_{P,omega}(M) = (-1)^{n-1} conj(omega)^n det(M - omega P).

    Raises:
        NumericalConsistencyError: If the imaginary residue is not negligible
    """
    omega = as_omega(omega)
    n = half_dim(M)
    if np.shape(P) != np.shape(M):
        raise DimensionError(f"M {np.shape(M)} and P {np.shape(P)} differ in size")
    value = (-1) ** (n - 1) * np.conj(omega) ** n * linalg.det(M - omega * P)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise NumericalConsistencyError(
            f"D_(P,omega) has imaginary part {value.imag:.3e} (real part {value.real:.3e})",
        )
    return float(value.real)


def kernel_basis(A: np.ndarray, tol_rank: float | None = None) -> np.ndarray:
    """Orthonormal kernel basis by relative singular-value thresholding.

    Singular values below ``tol_rank * max(sigma_max, 1)`` count as zero.
    Below sigma_max = 1 the threshold is the absolute ``tol_rank``, so a matrix
    whose entries are all of order ``tol_rank`` has a full kernel instead of
    being measured against its own scale.
    This is the single rank rule used throughout the package.

    Returns:
        Matrix whose columns span the numerical kernel
    """
    tol_rank = DEFAULT_TOLERANCES.tol_rank if tol_rank is None else tol_rank
    _, s, vh = linalg.svd(A)
    threshold = tol_rank * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > threshold))
    near = s[(s > threshold) & (s < 100 * threshold)]
    if near.size:
        logger.debug(f"singular values {near} lie within two decades of the rank threshold")
    return vh[rank:].conj().T


def nu_P_omega(
    M: np.ndarray,
    omega: complex,
    P: np.ndarray,
    tol_rank: float | None = None,
) -> int:
    """Complex dimension of ker(M - omega P)."""
    omega = as_omega(omega)
    return int(kernel_basis(np.asarray(M) - omega * np.asarray(P), tol_rank).shape[1])


def merge_radius(tol_cluster: float | None = None) -> float:
    """Radius within which split eigenvalues are merged into one cluster."""
    tol_cluster = DEFAULT_TOLERANCES.tol_cluster if tol_cluster is None else tol_cluster
    # a Jordan block splits its eigenvalue by about the square root of the error
    return 0.1 * float(np.sqrt(tol_cluster))


def cluster_eigenvalues(
    eigenvalues: np.ndarray,
    tol_cluster: float | None = None,
) -> list[tuple[complex, int]]:
    """Group numerically split eigenvalues into (mean value, multiplicity)."""
    radius = merge_radius(tol_cluster)
    remaining = list(np.asarray(eigenvalues, dtype=complex))
    clusters: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        rest = []
        for value in remaining:
            if abs(value - seed) <= radius * max(1.0, abs(seed)):
                members.append(value)
            else:
                rest.append(value)
        remaining = rest
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def on_circle(value: complex, tol_circle: float | None = None) -> bool:
    """Circle membership by |log|lambda|| <= tol_circle (symmetric in 1/conj)."""
    tol_circle = DEFAULT_TOLERANCES.tol_circle if tol_circle is None else tol_circle
    modulus = abs(value)
    return modulus > 0 and abs(np.log(modulus)) <= tol_circle


@dataclass
class SpectrumReport:
    """Floquet multipliers of a symplectic matrix.

    Attributes:
        eigenvalues: (value, algebraic multiplicity) per cluster
        on_circle_flags: Unit-circle membership per cluster
        krein: Krein pair (p, q) per unit-circle cluster, None elsewhere
    """

    eigenvalues: list[tuple[complex, int]]
    on_circle_flags: list[bool]
    krein: list[tuple[int, int] | None] = field(default_factory=list)

    @property
    def multipliers(self) -> list[complex]:
        """All eigenvalues repeated by multiplicity."""
        return [value for value, mult in self.eigenvalues for _ in range(mult)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "eigenvalues": [
                {"re": value.real, "im": value.imag, "multiplicity": mult, "on_circle": flag,
                 "krein": list(krein) if krein is not None else None}
                for (value, mult), flag, krein in zip(
                    self.eigenvalues, self.on_circle_flags, self.krein,
                )
            ],
        }


def spectrum_report(
    M: np.ndarray,
    tol_circle: float | None = None,
    tol_cluster: float | None = None,
) -> SpectrumReport:
    """Compute the Floquet multipliers, circle flags and Krein pairs of M.

    Raises:
        NumericalConsistencyError: If the spectrum is not symmetric under
            lambda -> 1/conj(lambda)
    """
    tol_circle = DEFAULT_TOLERANCES.tol_circle if tol_circle is None else tol_circle
    eigenvalues = linalg.eigvals(M)
    clusters = cluster_eigenvalues(eigenvalues, tol_cluster)
    if sum(mult for _, mult in clusters) != M.shape[0]:
        raise NumericalConsistencyError("eigenvalue multiplicities do not sum to 2n")

    radius = merge_radius(tol_cluster)
    for value, mult in clusters:
        mirror = 1.0 / np.conj(value)
        partner = sum(m for v, m in clusters if abs(v - mirror) <= radius * max(1.0, abs(mirror)))
        if partner < mult:
            raise NumericalConsistencyError(
                f"eigenvalue {value} has no matching 1/conj partner; M is not symplectic",
            )

    flags = [on_circle(value, tol_circle) for value, _ in clusters]
    krein = []
    for (value, _), flag in zip(clusters, flags):
        krein.append(krein_type(M, value / abs(value), tol_cluster) if flag else None)
    return SpectrumReport(eigenvalues=clusters, on_circle_flags=flags, krein=krein)


def elliptic_height(M: np.ndarray, tol_circle: float | None = None) -> int:
    """Total algebraic multiplicity of unit-circle eigenvalues of M.

    Raises:
        NumericalConsistencyError: If the count comes out odd
    """
    return height_report(M, tol_circle).height


@dataclass
class HeightReport:
    """Elliptic height with its classification and borderline flag."""

    height: int
    tag: str | None
    borderline: bool

    def to_dict(self) -> dict[str, Any]:
        return {"height": self.height, "tag": self.tag, "borderline": self.borderline}


def height_report(M: np.ndarray, tol_circle: float | None = None) -> HeightReport:
    """Elliptic height of M tagged elliptic (e = 2n) or hyperbolic (e = 2)."""
    tol_circle = DEFAULT_TOLERANCES.tol_circle if tol_circle is None else tol_circle
    n = half_dim(M)
    log_moduli = np.abs(np.log(np.abs(linalg.eigvals(M))))
    height = int(np.sum(log_moduli <= tol_circle))
    borderline = bool(np.any((log_moduli > tol_circle) & (log_moduli <= 2 * tol_circle)))
    if borderline:
        logger.warning(
            f"eigenvalue modulus within 2*tol_circle={2 * tol_circle:.1e} of the circle band",
        )
    if height % 2:
        raise NumericalConsistencyError(f"odd elliptic height {height}; check tol_circle")
    tag = "elliptic" if height == 2 * n else "hyperbolic" if height == 2 else None
    return HeightReport(height=height, tag=tag, borderline=borderline)


def generalized_eigenspace(
    M: np.ndarray,
    omega: complex,
    tol_cluster: float | None = None,
) -> np.ndarray:
    """Basis of the generalized eigenspace of M at ``omega``.

    Raises:
        SpectrumError: If ``omega`` is not an eigenvalue of M
    """
    size = M.shape[0]
    radius = merge_radius(tol_cluster)
    clusters = cluster_eigenvalues(linalg.eigvals(M), tol_cluster)
    matches = [mult for value, mult in clusters if abs(value - omega) <= radius]
    if not matches:
        raise SpectrumError(f"{omega} is not an eigenvalue")
    multiplicity = sum(matches)
    shifted = np.linalg.matrix_power(M - omega * np.eye(size), multiplicity)
    _, s, vh = linalg.svd(shifted)
    # the generalized eigenspace has exactly the algebraic multiplicity
    return vh[size - multiplicity :].conj().T


def krein_type(
    M: np.ndarray,
    omega: complex,
    tol_cluster: float | None = None,
) -> tuple[int, int]:
    """Signature (p, q) of v -> v^H (-iJ) v on the generalized eigenspace of omega.

    Raises:
        SpectrumError: If ``omega`` is not in the spectrum of M
    """
    omega = as_omega(omega)
    M = np.asarray(M, dtype=float)
    basis = generalized_eigenspace(M, omega, tol_cluster)
    J = standard_J(half_dim(M))
    form = basis.conj().T @ (-1j * J) @ basis
    form = (form + form.conj().T) / 2
    values = linalg.eigvalsh(form)
    cutoff = 1e-8 * max(1.0, float(np.max(np.abs(values))))
    return int(np.sum(values > cutoff)), int(np.sum(values < -cutoff))


def random_symplectic(
    n: int,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> np.ndarray:
    """Draw exp(J S) for a random symmetric S."""
    S = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return linalg.expm(standard_J(n) @ ((S + S.T) / 2))


def symplectic_inverse(M: np.ndarray) -> np.ndarray:
    """Return M^{-1} = -J M^T J."""
    J = standard_J(half_dim(M))
    return -J @ M.T @ J


def matrix_to_dict(M: np.ndarray, dim: Dim | None = None) -> dict[str, Any]:
    """Serialize a matrix as ``{"n", "kappa", "rows"}``."""
    n = half_dim(M)
    kappa = dim.kappa if dim is not None else 0
    return {"n": n, "kappa": kappa, "rows": [[float(x) for x in row] for row in np.asarray(M)]}


def matrix_from_dict(data: dict[str, Any]) -> tuple[np.ndarray, Dim]:
    """Parse the structure written by :func:`matrix_to_dict`.

    Raises:
        DimensionError: If the rows do not form a 2n x 2n matrix
    """
    try:
        dim = Dim(int(data["n"]), int(data.get("kappa", 0)))
        M = np.array(data["rows"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise DimensionError(f"malformed matrix record: {e}") from e
    if M.shape != (dim.size, dim.size):
        raise DimensionError(f"rows have shape {M.shape}, expected {(dim.size, dim.size)}")
    return M, dim
