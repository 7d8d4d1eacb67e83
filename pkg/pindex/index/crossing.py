"""P-index of symplectic paths by counting signed crossings.

The index i_{P,omega}(gamma) is the intersection number of xi_n * gamma with
the singular set {M : det(M P - omega) = 0}. Every crossing contributes
through the crossing form, the generator B(t) restricted to
ker(gamma(t) P - omega): a regular crossing adds its signature, a segment
start its positive inertia and a segment end its negative inertia.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import linalg, optimize

from pindex.config import DEFAULT_CONFIG, DEFAULT_TOLERANCES, Tolerances, parse_schedule
from pindex.core.symplectic import D_P_omega, as_omega, kernel_basis, nu_P_omega, standard_J
from pindex.errors import ConvergenceError, ParameterError
from pindex.paths.engine import xi_path
from pindex.paths.path import SymplecticPath

logger = logging.getLogger(__name__)

#: Relative eigenvalue size below which a crossing form counts as degenerate.
FORM_CUTOFF = 1e-7

#: Points per bracket in the fine scan before scalar minimization.
SUBSCAN_POINTS = 33

#: Step of the co-orientation finite difference along M exp(sJ).
CO_ORIENTATION_STEP = 1e-6

#: Relative distance to the singular set below which an endpoint gets a geometric grid.
ENDPOINT_WINDOW = 5e-2

#: Geometric grid density near a nearly singular endpoint.
POINTS_PER_DECADE = 8

#: Smallest relative offset of the endpoint grid.
OFFSET_FLOOR = 1e-13

#: A minimum pinned to a nondegenerate endpoint counts only below this share of its value.
BOUNDARY_RATIO = 1e-3

MatrixFunction = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class CrossingRecord:
    """One unit of signed crossing.

    A crossing whose form has signature 2 is stored as two records.
    """

    t: float
    sign: int
    on_xi_segment: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "sign": self.sign, "on_xi_segment": self.on_xi_segment}


@dataclass
class IndexPair:
    """The pair (i_{P,omega}, nu_{P,omega}) of a path."""

    i: int
    nu: int
    at_omega: complex
    perturbation_used: float | None = None
    crossings: list[CrossingRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.nu < 0:
            raise ParameterError(f"nullity must be non-negative, got {self.nu}")

    def as_tuple(self) -> tuple[int, int]:
        return self.i, self.nu

    def to_dict(self) -> dict[str, Any]:
        return {
            "i": self.i,
            "nu": self.nu,
            "omega": [self.at_omega.real, self.at_omega.imag],
            "perturbation_used": self.perturbation_used,
            "crossings": [record.to_dict() for record in self.crossings],
        }


def _inertia(Q: np.ndarray, scale: float) -> tuple[int, int, int]:
    """(n+, n-, n0) of a Hermitian form."""
    if Q.size == 0:
        return 0, 0, 0
    values = linalg.eigvalsh((Q + Q.conj().T) / 2)
    cutoff = FORM_CUTOFF * max(1.0, scale)
    plus = int(np.sum(values > cutoff))
    minus = int(np.sum(values < -cutoff))
    return plus, minus, len(values) - plus - minus


def _restricted(B: np.ndarray, K: np.ndarray) -> tuple[np.ndarray, float]:
    return K.conj().T @ B @ K, float(np.max(np.abs(B)))


def _records(t: float, count: int, sign: int, on_xi: bool = False) -> list[CrossingRecord]:
    return [CrossingRecord(t=float(t), sign=sign, on_xi_segment=on_xi) for _ in range(count)]


@dataclass
class _Walk:
    """A path under evaluation: gamma(t), its generator and sample grid."""

    evaluate: MatrixFunction
    generator: MatrixFunction
    grid: np.ndarray
    omega: complex
    P: np.ndarray
    tol: Tolerances

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    @property
    def delta(self) -> float:
        return max(1e-9 * self.T, 10 * self.tol.tol_root)

    def shifted(self, M: np.ndarray) -> np.ndarray:
        return M @ self.P - self.omega * np.eye(M.shape[0])

    def sigma(self, t: float) -> float:
        return float(linalg.svdvals(self.shifted(self.evaluate(t)))[-1])

    def D(self, M: np.ndarray) -> float:
        return D_P_omega(M, self.omega, self.P)

    def closeness(self, t: float) -> float:
        """Relative distance of gamma(t) to the singular set."""
        M = self.evaluate(t)
        return float(linalg.svdvals(self.shifted(M))[-1]) / max(1.0, float(np.max(np.abs(M))))


def _edge_offsets(T: float, closeness: float) -> np.ndarray:
    """Offsets from an endpoint, geometric from the window down to the scale of ``closeness``.

    Crossings next to a nearly singular endpoint sit at an offset comparable
    to its closeness, also for Jordan blocks, whose eigenvalues split like
    the square root of the offset.
    """
    if closeness >= ENDPOINT_WINDOW:
        return np.empty(0)
    floor = max(BOUNDARY_RATIO * closeness, OFFSET_FLOOR)
    count = int(np.ceil(np.log10(ENDPOINT_WINDOW / floor) * POINTS_PER_DECADE)) + 1
    return T * np.logspace(np.log10(ENDPOINT_WINDOW), np.log10(floor), count)


def _with_edge_grids(walk: _Walk, nu_start: int, nu_end: int) -> _Walk:
    """Walk whose grid resolves crossings next to nearly singular, nondegenerate endpoints."""
    start, T = float(walk.grid[0]), walk.T
    grid = walk.grid
    if not nu_start:
        grid = np.union1d(grid, start + _edge_offsets(T - start, walk.closeness(start)))
    if not nu_end:
        grid = np.union1d(grid, T - _edge_offsets(T - start, walk.closeness(T)))
    return replace(walk, grid=grid)


def _brackets(walk: _Walk, values: list[np.ndarray]) -> list[tuple[float, float, bool]]:
    """(lo, hi, sign_change) brackets; sign changes of D come first."""
    grid = walk.grid
    sigma = np.array([linalg.svdvals(walk.shifted(M))[-1] for M in values])
    D = np.array([walk.D(M) for M in values])
    last = len(grid) - 1
    brackets = [(grid[k], grid[k + 1], True) for k in range(last) if D[k] * D[k + 1] < 0]
    for k in range(len(grid)):
        left = sigma[k - 1] if k > 0 else np.inf
        right = sigma[k + 1] if k < last else np.inf
        if sigma[k] < left and sigma[k] <= right:
            brackets.append((grid[max(k - 1, 0)], grid[min(k + 1, last)], False))
    return brackets


def _refine(walk: _Walk, lo: float, hi: float) -> tuple[float, float]:
    """Minimize the smallest singular value on [lo, hi]."""
    sub = np.linspace(lo, hi, SUBSCAN_POINTS)
    values = [walk.sigma(t) for t in sub]
    j = int(np.argmin(values))
    a, b = sub[max(j - 1, 0)], sub[min(j + 1, SUBSCAN_POINTS - 1)]
    # offsets from a keep the bounded search relative to the bracket width
    result = optimize.minimize_scalar(
        lambda x: walk.sigma(a + x),
        bounds=(0.0, b - a),
        method="bounded",
        options={"xatol": min(walk.tol.tol_root, 1e-3 * (b - a))},
    )
    if result.fun <= values[j]:
        return float(a + result.x), float(result.fun)
    return float(sub[j]), float(values[j])


def _root(walk: _Walk, lo: float, hi: float) -> tuple[float, float]:
    """Root of D on a sign-change bracket."""

    def D(t: float) -> float:
        return walk.D(walk.evaluate(t))

    try:
        t_c = optimize.brentq(D, lo, hi, xtol=min(walk.tol.tol_root, 1e-6 * (hi - lo)))
    except ValueError:
        return _refine(walk, lo, hi)
    return float(t_c), walk.sigma(t_c)


def _find_crossings(walk: _Walk, skip_start: bool, skip_end: bool) -> list[float]:
    values = [walk.evaluate(t) for t in walk.grid]
    edge = 1e-7 * walk.T
    start = float(walk.grid[0])
    sigma_start, sigma_end = walk.sigma(start), walk.sigma(walk.T)
    found: list[float] = []
    for lo, hi, sign_change in _brackets(walk, values):
        t_c, sigma = _root(walk, lo, hi) if sign_change else _refine(walk, lo, hi)
        if not sign_change:
            # a minimum pinned to a nondegenerate endpoint is the endpoint itself
            if not skip_start and lo <= start and sigma > BOUNDARY_RATIO * sigma_start:
                continue
            if not skip_end and hi >= walk.T and sigma > BOUNDARY_RATIO * sigma_end:
                continue
        scale = max(1.0, float(np.max(np.abs(walk.evaluate(t_c)))))
        if sigma > walk.tol.tol_null * scale:
            continue
        if (skip_start and t_c <= edge) or (skip_end and t_c >= walk.T - edge):
            continue
        if any(abs(t_c - t) <= max(edge, 10 * walk.tol.tol_root) for t in found):
            continue
        found.append(t_c)
    return sorted(found)


def _co_orientation_count(walk: _Walk, t_c: float, before: np.ndarray, after: np.ndarray) -> int:
    """Signed count from the sign change of D and the positive direction M exp(sJ)."""
    d_before, d_after = walk.D(before), walk.D(after)
    if d_before * d_after > 0:
        logger.warning(f"tangential crossing at t={t_c:.12g} (omega={walk.omega}) counted as 0")
        return 0
    M = walk.evaluate(t_c)
    J = standard_J(M.shape[0] // 2)
    s = CO_ORIENTATION_STEP
    slope = (walk.D(M @ linalg.expm(s * J)) - walk.D(M @ linalg.expm(-s * J))) / (2 * s)
    if abs(slope) < 1e-12:
        logger.warning(f"co-orientation undefined at t={t_c:.12g}; crossing counted as 0")
        return 0
    return 1 if np.sign(d_after) == np.sign(slope) else -1


def _interior_records(walk: _Walk, t_c: float) -> list[CrossingRecord]:
    K = kernel_basis(walk.shifted(walk.evaluate(t_c)), walk.tol.tol_null)
    if K.shape[1] == 0:
        return []
    left, scale_l = _restricted(walk.generator(max(t_c - walk.delta, 0.0)), K)
    right, scale_r = _restricted(walk.generator(min(t_c + walk.delta, walk.T)), K)
    plus, _, zero_r = _inertia(right, scale_r)
    _, minus, zero_l = _inertia(left, scale_l)
    if zero_l or zero_r:
        h = max(1e-6 * walk.T, 1e3 * walk.delta)
        count = _co_orientation_count(
            walk,
            t_c,
            walk.evaluate(max(t_c - h, 0.0)),
            walk.evaluate(min(t_c + h, walk.T)),
        )
        logger.warning(f"degenerate crossing form at t={t_c:.12g}; co-orientation count {count}")
        return _records(t_c, abs(count), int(np.sign(count)) or 1)
    return _records(t_c, plus, 1) + _records(t_c, minus, -1)


def _junction_records(walk: _Walk, n: int) -> list[CrossingRecord]:
    """Contribution where xi_n hands over to gamma at gamma(0) = I."""
    K0 = kernel_basis(walk.P - walk.omega * np.eye(2 * n), walk.tol.tol_rank)
    if K0.shape[1] == 0:
        return []
    xi = xi_path(n, 1.0)
    xi_form, xi_scale = _restricted(xi.generator_at(1.0), K0)
    _, xi_minus, _ = _inertia(xi_form, xi_scale)
    start_form, start_scale = _restricted(walk.generator(walk.delta), K0)
    plus, _, zero = _inertia(start_form, start_scale)
    if zero:
        h = 1e-6
        count = _co_orientation_count(walk, 0.0, xi.at(1.0 - h), walk.evaluate(h * walk.T))
        logger.warning(f"degenerate start form; junction counted as {count}")
        return _records(0.0, abs(count), int(np.sign(count)) or 1)
    return _records(0.0, xi_minus, -1, on_xi=True) + _records(0.0, plus, 1)


def _count(walk: _Walk, n: int) -> tuple[list[CrossingRecord], bool]:
    """Signed crossing records; the flag reports a degenerate endpoint form."""
    records = _junction_records(walk, n)
    nu_start = nu_P_omega(np.eye(2 * n), walk.omega, walk.P, walk.tol.tol_rank)
    end = walk.evaluate(walk.T)
    nu_end = nu_P_omega(end, walk.omega, walk.P, walk.tol.tol_rank)
    walk = _with_edge_grids(walk, nu_start, nu_end)
    for t_c in _find_crossings(walk, skip_start=nu_start > 0, skip_end=nu_end > 0):
        records.extend(_interior_records(walk, t_c))
    if nu_end:
        K = kernel_basis(walk.shifted(end), walk.tol.tol_rank)
        form, scale = _restricted(walk.generator(walk.T), K)
        _, minus, zero = _inertia(form, scale)
        if zero:
            return records, True
        records.extend(_records(walk.T, minus, -1))
    return records, False


def _perturbed_walk(path: SymplecticPath, base: _Walk, s: float) -> _Walk:
    """Walk along gamma(t) exp(-s t J / T)."""
    T = base.T
    J = standard_J(path.n)

    def evaluate(t: float) -> np.ndarray:
        return path.at(t) @ linalg.expm(-s * t / T * J)

    def generator(t: float) -> np.ndarray:
        M = path.at(t)
        return path.generator_at(t) - (s / T) * linalg.inv(M @ M.T)

    window = min(0.25, 10 * np.sqrt(s)) * T
    grid = np.union1d(base.grid, np.linspace(T - window, T, 257))
    return _Walk(evaluate, generator, grid, base.omega, base.P, base.tol)


def default_perturbation_schedule() -> list[float]:
    return parse_schedule(DEFAULT_CONFIG["perturbation_schedule"])


def index_crossing(
    gamma: SymplecticPath,
    omega: complex,
    P: np.ndarray,
    tol: Tolerances | None = None,
    perturbation_schedule: list[float] | None = None,
) -> IndexPair:
    """Compute (i_{P,omega}(gamma), nu_{P,omega}(gamma)) by crossing count.

    When the endpoint form is itself degenerate, the index is taken along
    gamma(t) exp(-s t J / T) for the decreasing schedule of s and must be
    the same for the last two entries.

    Args:
        gamma: Path starting at the identity
        omega: Point of the unit circle
        P: The symmetry matrix
        tol: Tolerances of the run
        perturbation_schedule: Decreasing values of s

    Returns:
        The index pair with its crossing records

    Raises:
        ParameterError: If gamma does not start at I
        ConvergenceError: If the perturbed indices do not stabilize
    """
    tol = tol or DEFAULT_TOLERANCES
    omega = as_omega(omega)
    P = np.asarray(P, dtype=float)
    n = gamma.n
    if not np.allclose(gamma.start, np.eye(2 * n), atol=1e-10):
        raise ParameterError("index_crossing needs a path starting at the identity")

    nu = nu_P_omega(gamma.endpoint, omega, P, tol.tol_rank)
    walk = _Walk(gamma.at, gamma.generator_at, gamma.times, omega, P, tol)
    records, degenerate = _count(walk, n)
    if not degenerate:
        return IndexPair(sum(r.sign for r in records), nu, omega, crossings=records)

    schedule = list(perturbation_schedule or default_perturbation_schedule())
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or min(schedule) <= 0:
        raise ParameterError(f"perturbation schedule must be positive and decreasing: {schedule}")
    logger.debug(f"degenerate endpoint form at omega={omega}; perturbing along {schedule}")
    trace = []
    for s in schedule:
        records, still_degenerate = _count(_perturbed_walk(gamma, walk, s), n)
        value = None if still_degenerate else sum(r.sign for r in records)
        trace.append((s, value))
        logger.debug(f"perturbation s={s:.1e}: i={value}")
    if len(trace) < 2 or trace[-1][1] is None or trace[-1][1] != trace[-2][1]:
        raise ConvergenceError(
            f"perturbed index at omega={omega} did not stabilize along {schedule}",
            trace=trace,
        )
    return IndexPair(trace[-1][1], nu, omega, perturbation_used=schedule[-1], crossings=records)


def roots_of(z: complex, m: int) -> list[complex]:
    """The m-th roots of z, counter-clockwise from the principal one."""
    z = as_omega(z)
    base = np.angle(z)
    return [complex(np.exp(1j * (base + 2 * np.pi * k) / m)) for k in range(m)]


def bott_sum(
    gamma: SymplecticPath,
    P: np.ndarray,
    m: int,
    z: complex = 1.0,
    tol: Tolerances | None = None,
    perturbation_schedule: list[float] | None = None,
) -> IndexPair:
    """Sum of index_crossing(gamma, omega, P) over the m-th roots omega of z."""
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    total_i = 0
    total_nu = 0
    used = []
    for omega in roots_of(z, int(m)):
        pair = index_crossing(gamma, omega, P, tol=tol, perturbation_schedule=perturbation_schedule)
        logger.debug(f"bott term at {omega:.6f}: {pair.as_tuple()}")
        total_i += pair.i
        total_nu += pair.nu
        if pair.perturbation_used is not None:
            used.append(pair.perturbation_used)
    return IndexPair(total_i, total_nu, as_omega(z), perturbation_used=max(used) if used else None)
