"""Tests for coefficient functions and sampled symplectic paths."""

import os
import sys

import numpy as np
import pytest
from scipy import linalg

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.core.symplectic import Dim, standard_J, standard_P
from pindex.errors import ConfigError, SymmetryError
from pindex.paths.engine import constant_path, integrate_fundamental
from pindex.paths.path import CoefficientFunction, SymplecticPath, magnus_step


def test_magnus_step_exact_for_constant_generator():
    """A constant generator is propagated exactly."""
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    coeff = CoefficientFunction.constant(A, 1.0)
    np.testing.assert_allclose(magnus_step(coeff, 0.0, 0.3), linalg.expm(0.3 * standard_J(2) @ A), atol=1e-12)


def test_coefficient_extension_by_P():
    """A(t + T) = P A(t) P and A(t + 2T) = A(t) for a coefficient given on [0, T]."""
    P = standard_P(Dim(2, 1))
    B = np.arange(16, dtype=float).reshape(4, 4)
    B = B + B.T
    coeff = CoefficientFunction(func=lambda t: (1 + t) * B, half_period=1.0, P=P)
    np.testing.assert_allclose(coeff(1.25), P @ coeff(0.25) @ P)
    np.testing.assert_allclose(coeff(2.25), coeff(0.25))
    # left-continuous at the junction
    np.testing.assert_allclose(coeff(1.0), 2 * B)


def test_check_symmetry_passes_for_compatible_constant():
    """A constant coefficient commuting with P passes and is marked checked."""
    coeff = CoefficientFunction.constant(np.eye(4), 1.0)
    coeff.check_symmetry(standard_P(Dim(2, 1)))
    assert coeff.symmetry_checked


def test_check_symmetry_reports_witness():
    """A non-symmetric A(t) raises with the offending time."""
    coeff = CoefficientFunction(func=lambda t: np.array([[1.0, t + 1.0], [0.0, 1.0]]), half_period=1.0)
    with pytest.raises(SymmetryError) as excinfo:
        coeff.check_symmetry()
    assert excinfo.value.witness == 0.0


def test_path_rejects_bad_samples():
    """Times must increase and match the samples."""
    with pytest.raises(ConfigError):
        SymplecticPath(times=[0.0, 0.0], matrices=[np.eye(2), np.eye(2)])
    with pytest.raises(ConfigError):
        SymplecticPath(times=[0.0, 1.0, 2.0], matrices=[np.eye(2), np.eye(2)])


def test_validate_detects_non_symplectic_sample():
    """A sample that is not symplectic fails validation."""
    path = SymplecticPath(times=[0.0, 1.0], matrices=[np.eye(2), 2 * np.eye(2)])
    with pytest.raises(ConfigError):
        path.validate()
    unbased = SymplecticPath(times=[0.0, 1.0], matrices=[np.diag([2.0, 0.5]), np.eye(2)])
    with pytest.raises(ConfigError):
        unbased.validate(based=True)
    unbased.validate(based=False)


def test_at_uses_generator_between_samples():
    """Between samples an integrated path is refined with its generator."""
    coeff = CoefficientFunction.constant(np.eye(2), 2.0)
    gamma = integrate_fundamental(coeff)
    t = 0.5 * (gamma.times[3] + gamma.times[4])
    np.testing.assert_allclose(gamma.at(t), linalg.expm(t * standard_J(1)), atol=1e-10)


def test_serialization_and_interpolation():
    """A stored path reloads with its samples and interpolates exponentially."""
    gamma = constant_path(np.eye(4), 1.0, samples=41)
    data = gamma.to_dict()
    assert data["T"] == 1.0 and len(data["samples"]) == 41
    assert set(data["samples"][0]) == {"t", "rows"}
    loaded = SymplecticPath.from_dict(data)
    assert loaded.generator is None
    np.testing.assert_allclose(loaded.endpoint, gamma.endpoint)
    t = 0.5 * (loaded.times[10] + loaded.times[11])
    np.testing.assert_allclose(loaded.at(t), gamma.at(t), atol=1e-10)
    np.testing.assert_allclose(loaded.generator_at(t), np.eye(4), atol=1e-8)


def test_from_dict_rejects_malformed_record():
    """Missing keys raise a configuration error."""
    with pytest.raises(ConfigError):
        SymplecticPath.from_dict({"T": 1.0})
    with pytest.raises(ConfigError):
        SymplecticPath.from_dict({"T": 1.0, "samples": [{"t": 0.0}, {"t": 1.0}]})
    with pytest.raises(ConfigError):
        identity = [[1.0, 0.0], [0.0, 1.0]]
        SymplecticPath.from_dict({"T": 2.0, "samples": [{"t": 0.0, "rows": identity}, {"t": 1.0, "rows": identity}]})


def test_reads_literal_path_record():
    """A hand-written record of e^{tJ} loads, interpolates and writes back the same shape."""
    c, s = np.cos(0.5), np.sin(0.5)
    c2, s2 = np.cos(1.0), np.sin(1.0)
    record = {
        "T": 1.0,
        "samples": [
            {"t": 0.0, "rows": [[1.0, 0.0], [0.0, 1.0]]},
            {"t": 0.5, "rows": [[c, -s], [s, c]]},
            {"t": 1.0, "rows": [[c2, -s2], [s2, c2]]},
        ],
    }
    gamma = SymplecticPath.from_dict(record)
    assert gamma.n == 1 and gamma.t_end == 1.0
    np.testing.assert_allclose(gamma.at(0.75), linalg.expm(0.75 * standard_J(1)), atol=1e-12)
    written = gamma.to_dict()
    assert written["T"] == 1.0
    assert [sample["t"] for sample in written["samples"]] == [0.0, 0.5, 1.0]
    np.testing.assert_allclose(written["samples"][1]["rows"], record["samples"][1]["rows"])
