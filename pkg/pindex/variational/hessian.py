"""Morse index and nullity of dual-action critical points.

The index data of an orbit comes from the quadratic form

    q(v) = 1/2 int J v . Pi v dt + 1/2 int H_2''(y(t))^{-1} J v . J v dt

on L^2_kappa(0, T') with T' = (2m - 1) tau_2 / 2: the negative count gives
i(u) for the (2m - 1)-th iterate and the zero count minus one gives nu(u).
The same numbers follow from the crossing count along the linearized flow,
which :func:`theorem32_crosscheck` compares against.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg

from pindex.config import ConfigManager, Tolerances, parse_schedule
from pindex.core.symplectic import Dim, elliptic_height, spectrum_report, standard_P
from pindex.errors import ConvergenceError, CrossOracleError, ParameterError
from pindex.geometry import GaugeOracle
from pindex.index.crossing import index_crossing
from pindex.paths.engine import constant_path, extend_by_symmetry, integrate_fundamental
from pindex.paths.path import CoefficientFunction, SymplecticPath
from pindex.variational.dual_action import DualProblem, OrbitRecord, reconstruct_orbit
from pindex.variational.fourier import DualElement, FourierBasis

logger = logging.getLogger(__name__)

MatrixFunction = Callable[[float], np.ndarray]


def form_inertia(Q: np.ndarray, tol_rank: float) -> tuple[int, int]:
    """(negative count, zero count) of a symmetric matrix."""
    values = linalg.eigvalsh((Q + Q.T) / 2)
    cutoff = tol_rank * max(1.0, float(np.max(np.abs(values))))
    negative = int(np.sum(values < -cutoff))
    zero = int(np.sum(np.abs(values) <= cutoff))
    return negative, zero


def q_form_matrix(inverse_hessian: MatrixFunction | np.ndarray, basis: FourierBasis) -> np.ndarray:
    """Matrix of q on the basis for K(t) = H_2''(y(t))^{-1}.

    Args:
        inverse_hessian: Map t -> K(t), or a constant matrix
        basis: Fourier basis on [0, T']
    """
    if callable(inverse_hessian):
        weights = np.array([inverse_hessian(t) for t in basis.grid])
    else:
        weights = np.broadcast_to(np.asarray(inverse_hessian, dtype=float), (basis.grid_size, basis.dim.size, basis.dim.size))
    return basis.bilinear_matrix() + basis.weighted_form(weights)


def default_mode_schedule() -> list[int]:
    return parse_schedule(ConfigManager.get_instance().get_value("mode_schedule"), kind=int)


def _stable_counts(
    counts_at: Callable[[int], tuple[int, int]],
    N_schedule: list[int],
    what: str,
) -> tuple[int, int]:
    if len(N_schedule) < 3:
        raise ParameterError(f"mode schedule needs at least three entries, got {N_schedule}")
    trace = []
    for N_max in N_schedule:
        counts = counts_at(N_max)
        trace.append((N_max, counts))
        logger.debug(f"{what}: N_max={N_max} gives (negative, zero) = {counts}")
    last = [counts for _, counts in trace[-3:]]
    if last.count(last[0]) != 3:
        raise ConvergenceError(f"{what} did not stabilize along {N_schedule}", trace=trace)
    return last[0]


def orbit_inertia(
    orbit: OrbitRecord,
    m: int,
    N_max: int,
    tol_rank: float,
) -> tuple[int, int]:
    """Inertia of q for the (2m - 1)-th iterate of the orbit's loop."""
    half_period = (2 * m - 1) * orbit.tau2 / 2
    basis = FourierBasis(orbit.gauge.dim, half_period, N_max)
    Q = q_form_matrix(lambda s: np.linalg.inv(orbit.hamiltonian_hessian(s)), basis)
    return form_inertia(Q, tol_rank)


def hessian_index(
    u: DualElement | OrbitRecord,
    gauge: GaugeOracle | None = None,
    N_schedule: list[int] | None = None,
    m: int = 1,
    tol: Tolerances | None = None,
) -> tuple[int, int]:
    """(i(u), nu(u)) of a critical point, for the (2m - 1)-th iterate.

    Raises:
        ParameterError: If m is not positive or the gauge is missing
        ConvergenceError: If the counts differ over the last three entries of
            the mode schedule
    """
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    tol = tol or Tolerances.from_config()
    if isinstance(u, DualElement):
        if gauge is None:
            raise ParameterError("a gauge is needed to reconstruct the orbit of u")
        orbit = reconstruct_orbit(u, gauge)
    else:
        orbit = u
    schedule = list(N_schedule or default_mode_schedule())
    negative, zero = _stable_counts(
        lambda N: orbit_inertia(orbit, m, N, tol.tol_rank),
        schedule,
        f"q-form inertia of iterate {2 * m - 1}",
    )
    return negative, zero - 1


def psi_hessian_inertia(u: DualElement, gauge: GaugeOracle, tol: Tolerances | None = None) -> tuple[int, int]:
    """Inertia of the discretized Hessian of Psi itself, as a diagnostic."""
    tol = tol or Tolerances.from_config()
    return form_inertia(DualProblem(gauge, u.basis).hessian(u.coeffs), tol.tol_rank)


def comparison_forms(
    dim: Dim,
    R: float,
    r: float,
    half_period: float,
    N_schedule: list[int] | None = None,
    tol: Tolerances | None = None,
) -> dict[str, tuple[int, int]]:
    """Inertia of the comparison forms with K = (R^2/2) I and K = (r^2/2) I.

    These are the forms of the spheres of radius R and r, which bound the
    index of any orbit on a surface between them.
    """
    tol = tol or Tolerances.from_config()
    schedule = list(N_schedule or default_mode_schedule())
    result = {}
    for label, radius in (("R", R), ("r", r)):
        K = radius**2 / 2 * np.eye(dim.size)
        result[label] = _stable_counts(
            lambda N, K=K: form_inertia(q_form_matrix(K, FourierBasis(dim, half_period, N)), tol.tol_rank),
            schedule,
            f"comparison form q^{label}",
        )
    return result


def linearized_path(orbit: OrbitRecord, tol: Tolerances | None = None) -> SymplecticPath:
    """Fundamental solution of y' = J H_2''(y(s)) y on [0, tau_2 / 2]."""
    coeff = CoefficientFunction(
        func=orbit.hamiltonian_hessian,
        half_period=orbit.tau2 / 2,
        P=orbit.gauge.P,
        periodic=True,
    )
    coeff.check_symmetry(tol_sym=max((tol or Tolerances.from_config()).tol_sym, 1e-7))
    return integrate_fundamental(coeff, tol=tol)


@dataclass
class CrossCheckRecord:
    """Index data of one iterate computed by the form and by the crossing count."""

    m: int
    kappa: int
    form: tuple[int, int]
    path: tuple[int, int]

    @property
    def agrees(self) -> bool:
        return self.form == self.path

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "kappa": self.kappa,
            "form": list(self.form),
            "path": list(self.path),
            "agrees": self.agrees,
        }


def _path_route(gamma: SymplecticPath, P: np.ndarray, m: int, kappa: int, tol: Tolerances) -> tuple[int, int]:
    extended = extend_by_symmetry(gamma, P, 2 * m - 1, tol)
    pair = index_crossing(extended, 1.0, P, tol=tol)
    return pair.i - kappa, pair.nu - 1


def _compare(record: CrossCheckRecord, gamma: SymplecticPath) -> CrossCheckRecord:
    if not record.agrees:
        raise CrossOracleError(
            f"form gives {record.form} but the crossing count gives {record.path} for m={record.m}",
            bundle={**record.to_dict(), "endpoint": gamma.endpoint.tolist()},
        )
    logger.info(f"cross-check m={record.m}: (i, nu) = {record.form}")
    return record


def theorem32_crosscheck(
    orbit: OrbitRecord,
    m: int = 1,
    N_schedule: list[int] | None = None,
    tol: Tolerances | None = None,
) -> CrossCheckRecord:
    """Compare the q-form index of an orbit with the crossing count of its flow.

    Raises:
        CrossOracleError: If the two routes disagree; the bundle carries both
            results and the endpoint of the half-period flow
    """
    tol = tol or Tolerances.from_config()
    dim = orbit.gauge.dim
    form = hessian_index(orbit, N_schedule=N_schedule, m=m, tol=tol)
    gamma = linearized_path(orbit, tol)
    path = _path_route(gamma, orbit.gauge.P, m, dim.kappa, tol)
    return _compare(CrossCheckRecord(m, dim.kappa, form, path), gamma)


def constant_crosscheck(
    dim: Dim,
    c: float,
    half_period: float,
    N_schedule: list[int] | None = None,
    tol: Tolerances | None = None,
) -> CrossCheckRecord:
    """The same comparison for the synthetic coefficient A(t) = c I."""
    tol = tol or Tolerances.from_config()
    schedule = list(N_schedule or default_mode_schedule())
    K = np.eye(dim.size) / c
    negative, zero = _stable_counts(
        lambda N: form_inertia(q_form_matrix(K, FourierBasis(dim, half_period, N)), tol.tol_rank),
        schedule,
        f"q-form of A = {c} I",
    )
    gamma = constant_path(c * np.eye(dim.size), half_period)
    pair = index_crossing(gamma, 1.0, standard_P(dim), tol=tol)
    record = CrossCheckRecord(1, dim.kappa, (negative, zero - 1), (pair.i - dim.kappa, pair.nu - 1))
    return _compare(record, gamma)


def analyze_orbit(
    orbit: OrbitRecord,
    N_schedule: list[int] | None = None,
    tol: Tolerances | None = None,
) -> OrbitRecord:
    """Attach (i, nu), the third-iterate pair, Floquet data and height to an orbit."""
    tol = tol or Tolerances.from_config()
    orbit.index, orbit.nullity = hessian_index(orbit, N_schedule=N_schedule, m=1, tol=tol)
    orbit.index3, orbit.nullity3 = hessian_index(orbit, N_schedule=N_schedule, m=2, tol=tol)
    gamma = linearized_path(orbit, tol)
    # gamma(tau_2) = (P gamma(T))^2 is conjugate to (gamma(T) P)^2
    orbit.half_monodromy = gamma.endpoint
    half = gamma.endpoint @ orbit.gauge.P
    monodromy = half @ half
    orbit.floquet = spectrum_report(monodromy, tol.tol_circle, tol.tol_cluster)
    orbit.height = elliptic_height(monodromy, tol.tol_circle)
    logger.info(
        f"orbit with action {orbit.action:.10g}: i={orbit.index}, nu={orbit.nullity}, "
        f"i3={orbit.index3}, nu3={orbit.nullity3}, e={orbit.height}",
    )
    return orbit


def index_interval_check(orbits: list[OrbitRecord], dim: Dim) -> dict[int, bool]:
    """Check i(u_j) <= 2(j - 1) <= i(u_j) + nu(u_j) - 1 for j = 1 and j = n - kappa.

    Orbits are ranked by action; ranks beyond the list are skipped.

    Raises:
        ParameterError: If an orbit has no index data
    """
    ordered = sorted(orbits, key=lambda orbit: orbit.action)
    result = {}
    for rank in sorted({1, dim.n - dim.kappa}):
        if rank > len(ordered):
            continue
        orbit = ordered[rank - 1]
        if orbit.index is None or orbit.nullity is None:
            raise ParameterError(f"orbit {rank} has no index data")
        result[rank] = orbit.index <= 2 * (rank - 1) <= orbit.index + orbit.nullity - 1
    return result
