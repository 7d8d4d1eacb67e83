"""Tests for the Morse index and nullity of dual-action critical points."""

import os
import sys

import numpy as np
import pytest

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.config import DEFAULT_TOLERANCES
from pindex.core.symplectic import Dim
from pindex.errors import ConvergenceError, ParameterError
from pindex.geometry import EllipsoidSurface
from pindex.index.formulas import ellipsoid_index, stability_chain
from pindex.variational.dual_action import find_critical_points
from pindex.variational.hessian import (
    _stable_counts,
    analyze_orbit,
    comparison_forms,
    constant_crosscheck,
    form_inertia,
    hessian_index,
    index_interval_check,
    q_form_matrix,
    theorem32_crosscheck,
)
from pindex.variational.fourier import FourierBasis

SCHEDULE = [8, 12, 16]
SEARCH = {"seed": 0, "N_max": 8, "max_iterations": 300, "grad_tol": 1e-10, "tol": DEFAULT_TOLERANCES}


@pytest.fixture(scope="module")
def analyzed_orbits(tmp_path_factory):
    """The two planar orbits of the (1, 1.2) ellipsoid with their index data."""
    gauge = EllipsoidSurface(Dim(2, 0), [1.0, 1.2]).gauge()
    with pytest.MonkeyPatch.context() as mp:
        mp.setenv("PINDEX_CONFIG_DIR", str(tmp_path_factory.mktemp("config")))
        orbits = find_critical_points(gauge, restarts=3, **SEARCH)
        return [analyze_orbit(orbit, SCHEDULE, DEFAULT_TOLERANCES) for orbit in orbits]


def test_form_inertia_counts():
    """Negative and zero eigenvalues are counted relative to the largest one."""
    assert form_inertia(np.diag([-1.0, 0.0, 2.0, 1e-12]), 1e-8) == (1, 2)
    assert form_inertia(np.eye(3), 1e-8) == (0, 0)


def test_stable_counts_needs_three_entries():
    """Short schedules are rejected."""
    with pytest.raises(ParameterError):
        _stable_counts(lambda N: (0, 0), [8, 16], "test")


def test_stable_counts_reports_trace():
    """Counts that keep changing raise with the whole trace."""
    with pytest.raises(ConvergenceError) as excinfo:
        _stable_counts(lambda N: (N, 0), [8, 12, 16], "growing")
    assert [N for N, _ in excinfo.value.trace] == [8, 12, 16]
    assert _stable_counts(lambda N: (2, 1) if N > 4 else (0, 0), [4, 8, 12, 16], "settling") == (2, 1)


def test_q_form_accepts_constant_or_callable():
    """A constant K and the equivalent function give the same matrix."""
    basis = FourierBasis(Dim(2, 1), 0.5, 6)
    K = 0.3 * np.eye(4)
    np.testing.assert_allclose(q_form_matrix(K, basis), q_form_matrix(lambda t: K, basis), atol=1e-14)


@pytest.mark.parametrize("half_period", [np.pi / 2, 3 * np.pi / 2, 2.16 * np.pi])
def test_comparison_forms_match_ellipsoid_index(half_period):
    """The negative counts of the sphere comparison forms are ellipsoid indices."""
    dim = Dim(2, 0)
    R, r = 1.2, 1.0
    counts = comparison_forms(dim, R, r, half_period, SCHEDULE, DEFAULT_TOLERANCES)
    assert counts["R"][0] == ellipsoid_index(dim, 2 / R**2, half_period)
    assert counts["r"][0] == ellipsoid_index(dim, 2 / r**2, half_period)


def test_comparison_forms_of_the_first_iterate_window():
    """Over three half loops of the first orbit the forms give (4, 0) and (4, 4)."""
    counts = comparison_forms(Dim(2, 0), 1.2, 1.0, 3 * np.pi / 2, SCHEDULE, DEFAULT_TOLERANCES)
    assert counts == {"R": (4, 0), "r": (4, 4)}


@pytest.mark.parametrize("n, kappa", [(2, 0), (2, 1)])
def test_constant_crosscheck_agrees(n, kappa):
    """The q-form and the crossing count agree for A = I on [0, 5]."""
    record = constant_crosscheck(Dim(n, kappa), 1.0, 5.0, SCHEDULE, DEFAULT_TOLERANCES)
    assert record.agrees
    assert record.form == (4 - 2 * kappa, -1)


def test_round_sphere_index(sphere):
    """The sphere orbit has (i, nu) = (0, 3) and third iterate (4, 3); both routes agree."""
    orbit = find_critical_points(sphere.gauge(), restarts=1, **SEARCH)[0]
    assert hessian_index(orbit, N_schedule=SCHEDULE, tol=DEFAULT_TOLERANCES) == (0, 3)
    assert hessian_index(orbit, N_schedule=SCHEDULE, m=2, tol=DEFAULT_TOLERANCES) == (4, 3)
    record = theorem32_crosscheck(orbit, m=1, N_schedule=SCHEDULE, tol=DEFAULT_TOLERANCES)
    assert record.path == (0, 3)


def test_hessian_index_errors(sphere):
    """m must be positive and a bare element needs a gauge."""
    orbit = find_critical_points(sphere.gauge(), restarts=1, **SEARCH)[0]
    with pytest.raises(ParameterError):
        hessian_index(orbit, N_schedule=SCHEDULE, m=0)
    with pytest.raises(ParameterError):
        hessian_index(orbit.u, N_schedule=SCHEDULE, tol=DEFAULT_TOLERANCES)


def test_ellipsoid_orbit_indices(analyzed_orbits):
    """Index pairs of the two orbits and their third iterates."""
    first, second = analyzed_orbits
    assert (first.index, first.nullity, first.index3, first.nullity3) == (0, 1, 4, 1)
    assert (second.index, second.nullity, second.index3, second.nullity3) == (2, 1, 6, 1)
    assert first.height == 4
    assert first.floquet is not None
    assert first.to_dict()["elliptic_height"] == 4


def test_ellipsoid_index_bounds_and_chain(analyzed_orbits):
    """Orbit ranks satisfy the index window and the stability chain holds."""
    dim = Dim(2, 0)
    assert index_interval_check(analyzed_orbits, dim) == {1: True, 2: True}
    chain = stability_chain(dim, [orbit.indices() for orbit in analyzed_orbits], 1.0, 1.2)
    assert chain.holds, chain.failures()


def test_index_interval_needs_index_data(sphere):
    """Unanalyzed orbits are rejected."""
    orbit = find_critical_points(sphere.gauge(), restarts=1, **SEARCH)[0]
    with pytest.raises(ParameterError):
        index_interval_check([orbit], Dim(2, 0))
