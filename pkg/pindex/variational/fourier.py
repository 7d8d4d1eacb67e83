"""Real Fourier discretization of the P-twisted loop space L^2_kappa(0, T).

A function u on [0, T] extended by u(t + T) = P u(t) has odd frequencies
(multiples of pi/T) on the coordinates where P = -1 and even nonzero
frequencies on the coordinates where P = +1; the zero mode is excluded,
which encodes the vanishing mean of the P = +1 part.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from pindex.core.symplectic import Dim, standard_J, standard_P
from pindex.errors import DimensionError, ParameterError

logger = logging.getLogger(__name__)

#: Quadrature points per unit of N_max.
OVERSAMPLING = 8


class FourierBasis:
    """Orthonormal cos/sin basis of L^2_kappa(0, T) truncated at frequency N_max.

    Coefficients are ordered by coordinate, then frequency, then (cos, sin).
    The quadrature grid has ``OVERSAMPLING * N_max`` uniform points on
    [0, T), on which synthesis and analysis are exact for the kept modes.
    """

    def __init__(self, dim: Dim, half_period: float, N_max: int) -> None:
        if half_period <= 0:
            raise ParameterError(f"half period must be positive, got {half_period}")
        if N_max < 2:
            raise ParameterError(f"N_max must be at least 2, got {N_max}")
        self.dim = dim
        self.T = float(half_period)
        self.N_max = int(N_max)
        signs = np.diag(standard_P(dim))
        coords, freqs, kinds = [], [], []
        for c in range(dim.size):
            start = 1 if signs[c] < 0 else 2
            for f in range(start, self.N_max + 1, 2):
                for kind in (0, 1):
                    coords.append(c)
                    freqs.append(f)
                    kinds.append(kind)
        self.coords = np.array(coords)
        self.freqs = np.array(freqs)
        self.kinds = np.array(kinds)
        self.size = len(coords)
        self.grid_size = max(OVERSAMPLING * self.N_max, 16)
        self.grid = np.arange(self.grid_size) * self.T / self.grid_size
        self.Phi = self.evaluate_basis(self.grid)
        self._masks = [self.coords == c for c in range(dim.size)]

    @property
    def omegas(self) -> np.ndarray:
        """Angular frequency pi f / T of every basis function."""
        return np.pi * self.freqs / self.T

    def evaluate_basis(self, times: np.ndarray) -> np.ndarray:
        """Basis values, shape (len(times), size)."""
        phase = np.outer(np.asarray(times, dtype=float), self.omegas)
        values = np.where(self.kinds == 0, np.cos(phase), np.sin(phase))
        return np.sqrt(2.0 / self.T) * values

    def coordinate_mask(self, coordinates: list[int]) -> np.ndarray:
        """Boolean mask of the coefficients living on the given coordinates."""
        return np.isin(self.coords, coordinates)

    def synthesize(self, coeffs: np.ndarray, times: np.ndarray | None = None) -> np.ndarray:
        """Values u(t), shape (len(times), 2n); the quadrature grid by default."""
        Phi = self.Phi if times is None else self.evaluate_basis(times)
        values = np.zeros((Phi.shape[0], self.dim.size))
        for c, mask in enumerate(self._masks):
            values[:, c] = Phi[:, mask] @ coeffs[mask]
        return values

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """L^2 projection of grid values onto the basis."""
        if values.shape != (self.grid_size, self.dim.size):
            raise DimensionError(f"expected grid values of shape {(self.grid_size, self.dim.size)}")
        weight = self.T / self.grid_size
        coeffs = np.empty(self.size)
        for c, mask in enumerate(self._masks):
            coeffs[mask] = weight * (self.Phi[:, mask].T @ values[:, c])
        return coeffs

    def pi_matrix(self) -> np.ndarray:
        """Pi_{T,kappa}: cos -> sin / omega and sin -> -cos / omega."""
        Pi = np.zeros((self.size, self.size))
        for b in range(0, self.size, 2):
            omega = self.omegas[b]
            Pi[b + 1, b] = 1.0 / omega
            Pi[b, b + 1] = -1.0 / omega
        return Pi

    def j_matrix(self) -> np.ndarray:
        """Pointwise J acting on coefficient vectors."""
        J = standard_J(self.dim.n)
        Jm = np.zeros((self.size, self.size))
        index = {(c, f, k): b for b, (c, f, k) in enumerate(zip(self.coords, self.freqs, self.kinds))}
        for b, (c, f, k) in enumerate(zip(self.coords, self.freqs, self.kinds)):
            for d in np.nonzero(J[:, c])[0]:
                Jm[index[(d, f, k)], b] = J[d, c]
        return Jm

    def bilinear_matrix(self) -> np.ndarray:
        """Matrix of (v, w) -> int J v . Pi w, symmetrized."""
        form = self.j_matrix().T @ self.pi_matrix()
        return (form + form.T) / 2

    def weighted_form(self, weights: np.ndarray) -> np.ndarray:
        """Matrix of int (K(t) J v, J v) dt for K sampled on the grid, shape (M, 2n, 2n)."""
        J = standard_J(self.dim.n)
        K = np.einsum("dc,jde,ef->jcf", J, weights, J)
        form = np.zeros((self.size, self.size))
        step = self.T / self.grid_size
        for c, mask_c in enumerate(self._masks):
            for d, mask_d in enumerate(self._masks):
                column = K[:, c, d]
                if not np.any(column):
                    continue
                form[np.ix_(mask_c, mask_d)] = step * (self.Phi[:, mask_c].T * column) @ self.Phi[:, mask_d]
        return (form + form.T) / 2


@dataclass
class DualElement:
    """An element of L^2_kappa(0, T) in a truncated Fourier basis."""

    basis: FourierBasis
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise DimensionError(f"expected {self.basis.size} coefficients, got {self.coeffs.shape}")

    @classmethod
    def zeros(cls, basis: FourierBasis) -> "DualElement":
        return cls(basis, np.zeros(basis.size))

    @property
    def N_max(self) -> int:
        return self.basis.N_max

    def values(self, times: np.ndarray | None = None) -> np.ndarray:
        return self.basis.synthesize(self.coeffs, times)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def complex_modes(self, coordinates: list[int]) -> dict[int, np.ndarray]:
        """Complex amplitudes c_f with u = sum c_f e^{i omega t} + conj, per frequency."""
        modes: dict[int, np.ndarray] = {}
        scale = np.sqrt(2.0 / self.basis.T) / 2
        for f in sorted(set(self.basis.freqs[self.basis.coordinate_mask(coordinates)])):
            amplitude = np.zeros(len(coordinates), dtype=complex)
            for i, c in enumerate(coordinates):
                cos_b = np.nonzero((self.basis.coords == c) & (self.basis.freqs == f) & (self.basis.kinds == 0))[0]
                if cos_b.size:
                    a, b = self.coeffs[cos_b[0]], self.coeffs[cos_b[0] + 1]
                    amplitude[i] = scale * (a - 1j * b)
            modes[int(f)] = amplitude
        return modes

    @property
    def u1_modes(self) -> dict[int, np.ndarray]:
        """Modes of the P = -1 component (odd frequencies)."""
        n, kappa = self.basis.dim.n, self.basis.dim.kappa
        coords = list(range(n - kappa)) + list(range(n, 2 * n - kappa))
        return self.complex_modes(coords)

    @property
    def u2_modes(self) -> dict[int, np.ndarray]:
        """Modes of the P = +1 component (even nonzero frequencies)."""
        n, kappa = self.basis.dim.n, self.basis.dim.kappa
        coords = list(range(n - kappa, n)) + list(range(2 * n - kappa, 2 * n))
        return self.complex_modes(coords)


def apply_Pi(u: DualElement) -> DualElement:
    """Pi_kappa u, the normalized primitive of u in the same space."""
    return DualElement(u.basis, u.basis.pi_matrix() @ u.coeffs)
