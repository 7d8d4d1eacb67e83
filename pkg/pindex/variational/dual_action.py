"""Dual action functional and its critical points.

On L^2_kappa(0, T) the dual action is

    Psi(u) = 1/2 int J u . Pi u dt + int G(-J u) dt

with G the Fenchel transform of H_alpha. A critical point u gives the
P-symmetric loop x = grad G(-J u) solving x' = J H_alpha'(x), whose radial
projection is a closed characteristic of the surface.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import optimize
from scipy.spatial.distance import directed_hausdorff

from pindex.config import DEFAULT_TOLERANCES, ConfigManager, Tolerances
from pindex.core.symplectic import SpectrumReport, standard_J
from pindex.errors import ConvergenceError, DimensionError, DomainError, ParameterError
from pindex.geometry import GaugeOracle
from pindex.index.formulas import OrbitIndices
from pindex.variational.fourier import DualElement, FourierBasis

logger = logging.getLogger(__name__)

#: Largest multiplicity tested when detecting the minimal period.
MAX_MULTIPLICITY = 12

#: Relative tolerance of the period-shift test.
PERIOD_TOL = 1e-6

#: Samples stored per prime period.
TRAJECTORY_SAMPLES = 256

#: Newton iterations after the quasi-Newton descent.
NEWTON_ITERATIONS = 30

#: Loop half period of the variational problem.
DEFAULT_HALF_PERIOD = 0.5


class DualProblem:
    """Discretized Psi for a gauge on a Fourier basis.

    Quadrature is exact on the basis grid, so :meth:`gradient` and
    :meth:`hessian` are the exact derivatives of :meth:`value`.
    """

    def __init__(self, gauge: GaugeOracle, basis: FourierBasis) -> None:
        if gauge.dim != basis.dim:
            raise DimensionError(f"gauge dimension {gauge.dim} differs from basis dimension {basis.dim}")
        self.gauge = gauge
        self.basis = basis
        self.J = standard_J(gauge.dim.n)
        self.A = basis.bilinear_matrix()
        self.step = basis.T / basis.grid_size

    def _arguments(self, coeffs: np.ndarray) -> np.ndarray:
        # rows -J u(t_j)
        return -self.basis.synthesize(coeffs) @ self.J.T

    def value(self, coeffs: np.ndarray) -> float:
        Y = self._arguments(coeffs)
        potential = sum(self.gauge.fenchel(y) for y in Y)
        return float(0.5 * coeffs @ self.A @ coeffs + self.step * potential)

    def gradient(self, coeffs: np.ndarray) -> np.ndarray:
        Y = self._arguments(coeffs)
        grads = np.array([self.gauge.fenchel_grad(y) for y in Y])
        return self.A @ coeffs + self.basis.analyze(grads @ self.J.T)

    def hessian(self, coeffs: np.ndarray) -> np.ndarray:
        Y = self._arguments(coeffs)
        weights = np.array([self.gauge.fenchel_hess(y) for y in Y])
        return self.A + self.basis.weighted_form(weights)


def psi_value(u: DualElement, gauge: GaugeOracle) -> float:
    """Psi(u) for the gauge's Hamiltonian H_alpha."""
    return DualProblem(gauge, u.basis).value(u.coeffs)


def psi_gradient(u: DualElement, gauge: GaugeOracle) -> DualElement:
    """L^2 gradient of Psi at u, as an element of the same space."""
    return DualElement(u.basis, DualProblem(gauge, u.basis).gradient(u.coeffs))


def psi_hessian_matrix(u: DualElement, gauge: GaugeOracle) -> np.ndarray:
    """Matrix of the second derivative of Psi at u in the basis."""
    return DualProblem(gauge, u.basis).hessian(u.coeffs)


def numeric_fenchel(gauge: GaugeOracle, y: np.ndarray) -> float:
    """sup over x of x . y - H_alpha(x), maximized along the best direction.

    The supremum is attained on the ray through grad j*(y), where it
    reduces to a scalar problem in the radius.
    """
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        return 0.0
    direction = gauge.grad_polar(y)
    direction = direction / gauge.j(direction)
    slope = float(direction @ y)
    if slope <= 0:
        raise DomainError("polar gradient does not pair positively with y")
    peak = (slope / gauge.alpha) ** (1.0 / (gauge.alpha - 1.0))
    result = optimize.minimize_scalar(
        lambda lam: -(lam * slope - lam**gauge.alpha),
        bounds=(0.0, 4.0 * peak + 1.0),
        method="bounded",
        options={"xatol": 1e-12 * max(1.0, peak)},
    )
    return float(-result.fun)


@dataclass
class OrbitRecord:
    """A closed characteristic found as a critical point of Psi.

    Times are in the H_2 normalization, in which the prime period equals the
    action.

    Attributes:
        u: The critical point
        gauge: The surface's gauge
        psi: Psi(u)
        level: Mean of j along the loop x
        loop_period: H_2 period of the full P-symmetric loop
        multiplicity: Number of times the loop covers the prime orbit
        symmetry_class: "P-fixed" when P y = y pointwise, else "P-symmetric"
        xi_shift: The constant xi with Pi u = x + xi
        gradient_norm: Final gradient norm
    """

    u: DualElement = field(repr=False)
    gauge: GaugeOracle = field(repr=False)
    psi: float
    level: float
    loop_period: float
    multiplicity: int
    symmetry_class: str
    xi_shift: np.ndarray = field(repr=False)
    gradient_norm: float = 0.0
    times: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    trajectory: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)), repr=False)
    index: int | None = None
    nullity: int | None = None
    index3: int | None = None
    nullity3: int | None = None
    floquet: SpectrumReport | None = field(default=None, repr=False)
    half_monodromy: np.ndarray | None = field(default=None, repr=False)
    height: int | None = None

    @property
    def minimal_period(self) -> float:
        return self.loop_period / self.multiplicity

    @property
    def action(self) -> float:
        return self.minimal_period

    @property
    def period(self) -> float:
        """Prime period in the y' = J y time, in which the unit sphere has period 2 pi."""
        return 2.0 * self.action

    @property
    def tau2(self) -> float:
        """Period of the P-symmetric loop, on which the index data is taken."""
        return self.loop_period

    @property
    def speed(self) -> float:
        """ds/dt between H_2 time s and loop time t."""
        alpha = self.gauge.alpha
        return alpha * self.level ** (alpha - 2.0) / 2.0

    def position(self, s: float | np.ndarray) -> np.ndarray:
        """Point y(s) on the surface at H_2 time s; shape (2n,) or (len(s), 2n)."""
        times = np.atleast_1d(np.asarray(s, dtype=float)) / self.speed
        J = standard_J(self.gauge.dim.n)
        args = -self.u.values(times) @ J.T
        points = np.array([self.gauge.project(self.gauge.fenchel_grad(a)) for a in args])
        return points[0] if np.ndim(s) == 0 else points

    def hamiltonian_hessian(self, s: float) -> np.ndarray:
        return self.gauge.hess_H2(self.position(s))

    def residual(self, samples: int = 64) -> float:
        """Max of |y'(s) - J H_2'(y(s))| along the loop, relative to |J H_2'|."""
        J = standard_J(self.gauge.dim.n)
        s = np.linspace(0.0, self.loop_period, samples, endpoint=False)
        # x' = u in loop time
        velocity = self.u.values(s / self.speed) / (self.level * self.speed)
        worst = 0.0
        for point, v in zip(self.position(s), velocity):
            flow = J @ self.gauge.grad_H2(point)
            worst = max(worst, float(np.linalg.norm(v - flow) / max(1.0, np.linalg.norm(flow))))
        return worst

    def indices(self) -> OrbitIndices:
        """Index data for the stability chain.

        Raises:
            ParameterError: If the index data has not been attached
        """
        if None in (self.index, self.nullity, self.index3, self.nullity3):
            raise ParameterError("orbit index data has not been computed")
        return OrbitIndices(self.action, self.index, self.nullity, self.index3, self.nullity3, self.height)

    def to_dict(self) -> dict[str, Any]:
        return {
            "action": self.action,
            "minimal_period": self.minimal_period,
            "period": self.period,
            "loop_period": self.loop_period,
            "multiplicity": self.multiplicity,
            "psi": self.psi,
            "level": self.level,
            "symmetry_class": self.symmetry_class,
            "xi_shift": self.xi_shift.tolist(),
            "gradient_norm": self.gradient_norm,
            "index": self.index,
            "nullity": self.nullity,
            "index3": self.index3,
            "nullity3": self.nullity3,
            "elliptic_height": self.height,
            "half_monodromy": self.half_monodromy.tolist() if self.half_monodromy is not None else None,
            "floquet": self.floquet.to_dict() if self.floquet is not None else None,
            "trajectory": {
                "times": self.times.tolist(),
                "points": self.trajectory.tolist(),
            },
        }


def _loop_points(u: DualElement, gauge: GaugeOracle, times: np.ndarray) -> np.ndarray:
    J = standard_J(gauge.dim.n)
    args = -u.values(times) @ J.T
    return np.array([gauge.fenchel_grad(a) for a in args])


def _multiplicity(u: DualElement, gauge: GaugeOracle, loop_length: float) -> int:
    test = np.linspace(0.0, loop_length, 64, endpoint=False)
    base = _loop_points(u, gauge, test)
    scale = max(1.0, float(np.max(np.abs(base))))
    for k in range(MAX_MULTIPLICITY, 1, -1):
        shifted = _loop_points(u, gauge, test + loop_length / k)
        if np.max(np.abs(shifted - base)) <= PERIOD_TOL * scale:
            return k
    return 1


def reconstruct_orbit(u: DualElement, gauge: GaugeOracle, gradient_norm: float = 0.0) -> OrbitRecord:
    """Recover the closed characteristic of a critical point u.

    Raises:
        DomainError: If u is zero
    """
    if u.norm() == 0:
        raise DomainError("the zero element has no orbit")
    basis = u.basis
    x = _loop_points(u, gauge, basis.grid)
    primitive = basis.synthesize(basis.pi_matrix() @ u.coeffs)
    xi_shift = np.mean(primitive - x, axis=0)
    level = float(np.mean([gauge.j(point) for point in x]))
    loop_length = 2.0 * basis.T
    multiplicity = _multiplicity(u, gauge, loop_length)

    alpha = gauge.alpha
    speed = alpha * level ** (alpha - 2.0) / 2.0
    record = OrbitRecord(
        u=u,
        gauge=gauge,
        psi=psi_value(u, gauge),
        level=level,
        loop_period=speed * loop_length,
        multiplicity=multiplicity,
        symmetry_class="P-symmetric",
        xi_shift=xi_shift,
        gradient_norm=gradient_norm,
    )
    record.times = np.linspace(0.0, record.minimal_period, TRAJECTORY_SAMPLES, endpoint=False)
    record.trajectory = record.position(record.times)
    if np.max(np.abs(record.trajectory @ gauge.P.T - record.trajectory)) <= PERIOD_TOL:
        record.symmetry_class = "P-fixed"
    return record


def _dense(orbit: OrbitRecord, samples: int) -> np.ndarray:
    return orbit.position(np.linspace(0.0, orbit.minimal_period, samples, endpoint=False))


def _polyline_distance(points: np.ndarray, curve: np.ndarray) -> float:
    """Largest distance from a point set to a closed polyline."""
    starts = curve
    steps = np.roll(curve, -1, axis=0) - curve
    lengths = np.maximum(np.sum(steps**2, axis=1), 1e-300)
    worst = 0.0
    for chunk in np.array_split(points, max(1, len(points) // 64)):
        offsets = chunk[:, None, :] - starts[None, :, :]
        t = np.clip(np.sum(offsets * steps[None], axis=2) / lengths, 0.0, 1.0)
        gaps = np.linalg.norm(offsets - t[..., None] * steps[None], axis=2)
        worst = max(worst, float(np.max(np.min(gaps, axis=1))))
    return worst


def geometric_distinctness(a: OrbitRecord, b: OrbitRecord, tol: float | None = None) -> bool:
    """True when the images of a and b (and of b under P) differ by more than tol.

    A Hausdorff estimate on the stored samples screens obvious pairs; the
    rest are compared point-to-polyline on dense resamplings.
    """
    tol = DEFAULT_TOLERANCES.tol_dedup if tol is None else tol
    P = a.gauge.P
    A = a.trajectory
    for curve in (b.trajectory, b.trajectory @ P.T):
        coarse = max(directed_hausdorff(A, curve)[0], directed_hausdorff(curve, A)[0])
        spacing = max(
            float(np.max(np.linalg.norm(np.diff(A, axis=0), axis=1))),
            float(np.max(np.linalg.norm(np.diff(curve, axis=0), axis=1))),
        )
        if coarse > tol + spacing:
            continue
        dense_a = _dense(a, 4 * TRAJECTORY_SAMPLES)
        dense_b = _dense(b, 4 * TRAJECTORY_SAMPLES)
        if curve is not b.trajectory:
            dense_b = dense_b @ P.T
        distance = max(_polyline_distance(A, dense_b), _polyline_distance(curve, dense_a))
        if distance <= tol:
            return False
    return True


def _initial_point(basis: FourierBasis, sector: list[int], rng: np.random.Generator) -> np.ndarray:
    coeffs = np.zeros(basis.size)
    mask = basis.coordinate_mask(sector)
    lowest = np.zeros(basis.size, dtype=bool)
    for c in sector:
        on_c = basis.coords == c
        lowest |= on_c & (basis.freqs == basis.freqs[on_c].min())
    coeffs[mask] = 1e-3 * rng.standard_normal(int(mask.sum()))
    coeffs[lowest] = 0.5 * rng.standard_normal(int(lowest.sum()))
    return coeffs


def _descend(problem: DualProblem, start: np.ndarray, mask: np.ndarray, max_iterations: int) -> np.ndarray:
    def fun(sub: np.ndarray) -> tuple[float, np.ndarray]:
        full = np.zeros(problem.basis.size)
        full[mask] = sub
        return problem.value(full), problem.gradient(full)[mask]

    result = optimize.minimize(
        fun, start[mask], jac=True, method="L-BFGS-B",
        options={"maxiter": max_iterations, "gtol": 1e-12, "ftol": 1e-15},
    )
    logger.debug(f"L-BFGS-B: {result.message} after {result.nit} iterations, Psi={result.fun:.6e}")
    coeffs = np.zeros(problem.basis.size)
    coeffs[mask] = result.x
    return coeffs


def _newton(problem: DualProblem, coeffs: np.ndarray, grad_tol: float) -> tuple[np.ndarray, float, bool]:
    norm = np.inf
    for _ in range(NEWTON_ITERATIONS):
        gradient = problem.gradient(coeffs)
        norm = float(np.linalg.norm(gradient))
        if norm <= grad_tol * (1.0 + abs(problem.value(coeffs))):
            return coeffs, norm, True
        step = np.linalg.lstsq(problem.hessian(coeffs), gradient, rcond=1e-10)[0]
        coeffs = coeffs - step
    return coeffs, norm, False


def find_critical_points(
    gauge: GaugeOracle,
    restarts: int | None = None,
    seed: int | None = None,
    N_max: int | None = None,
    max_iterations: int | None = None,
    grad_tol: float | None = None,
    tol: Tolerances | None = None,
) -> list[OrbitRecord]:
    """Search for critical points of Psi and return distinct orbits by action.

    Restarts cycle through the gauge's invariant sectors: each one runs a
    quasi-Newton descent restricted to the sector, then Newton refinement on
    the full space. A restart that does not reach the gradient tolerance is
    dropped.

    Raises:
        ParameterError: If restarts or N_max are out of range
        ConvergenceError: If no restart converges
    """
    manager = ConfigManager.get_instance()
    restarts = manager.get_value("restarts") if restarts is None else restarts
    seed = manager.get_value("seed") if seed is None else seed
    N_max = manager.get_value("modes") if N_max is None else N_max
    max_iterations = manager.get_value("max_iterations") if max_iterations is None else max_iterations
    grad_tol = manager.get_value("grad_tol") if grad_tol is None else grad_tol
    tol = tol or Tolerances.from_config()
    if restarts < 1:
        raise ParameterError(f"restarts must be positive, got {restarts}")

    basis = FourierBasis(gauge.dim, DEFAULT_HALF_PERIOD, N_max)
    problem = DualProblem(gauge, basis)
    rng = np.random.default_rng(seed)
    sectors = gauge.invariant_sectors()
    orbits: list[OrbitRecord] = []
    trace = []
    for attempt in range(restarts):
        sector = sectors[attempt % len(sectors)]
        mask = basis.coordinate_mask(sector)
        coeffs = _descend(problem, _initial_point(basis, sector, rng), mask, max_iterations)
        coeffs, norm, converged = _newton(problem, coeffs, grad_tol)
        value = problem.value(coeffs)
        trace.append({"restart": attempt, "sector": sector, "psi": value, "gradient_norm": norm})
        if not converged:
            logger.warning(f"restart {attempt} did not converge (|grad Psi| = {norm:.3e})")
            continue
        if np.linalg.norm(coeffs) < 1e-8 or value >= 0:
            logger.debug(f"restart {attempt} reached the trivial critical point")
            continue
        orbit = reconstruct_orbit(DualElement(basis, coeffs), gauge, gradient_norm=norm)
        if all(geometric_distinctness(orbit, other, tol.tol_dedup) for other in orbits):
            logger.info(f"restart {attempt}: orbit with action {orbit.action:.10g} in sector {sector}")
            orbits.append(orbit)
        else:
            logger.debug(f"restart {attempt}: duplicate of a known orbit")

    if not orbits:
        raise ConvergenceError("no restart reached a nontrivial critical point", trace=trace)
    return sorted(orbits, key=lambda orbit: orbit.action)
