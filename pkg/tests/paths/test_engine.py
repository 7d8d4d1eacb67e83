"""Tests for path generation: integration, symmetric extension, xi_n and concatenation."""

import os
import sys

import numpy as np
import pytest
from scipy import linalg

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.core.symplectic import Dim, is_symplectic, random_symplectic, standard_J, standard_P, symplectic_defect
from pindex.errors import ConcatenationError, ParameterError, SymmetryError
from pindex.paths.engine import (
    concatenate,
    constant_path,
    extend_by_symmetry,
    integrate_fundamental,
    path_to,
    symplectic_projection,
    xi_path,
)
from pindex.paths.path import CoefficientFunction


def smooth_coefficient(dim, rng, half_period=1.0, amplitude=0.5):
    """Small random symmetric coefficient on [0, half_period], extended by P."""
    size = dim.size
    A0, A1 = (rng.standard_normal((size, size)) for _ in range(2))
    A0, A1 = (amplitude * (X + X.T) / 2 for X in (A0, A1))

    def func(t):
        return A0 + np.cos(np.pi * t / half_period) * A1

    return CoefficientFunction(func=func, half_period=half_period, P=standard_P(dim))


def test_constant_coefficient_half_turn():
    """A = 2 I4 on [0, pi/2] ends at e^{pi J} = -I4."""
    coeff = CoefficientFunction.constant(2 * np.eye(4), np.pi / 2)
    gamma = integrate_fundamental(coeff)
    np.testing.assert_allclose(gamma.endpoint, -np.eye(4), atol=1e-8)
    np.testing.assert_allclose(gamma.start, np.eye(4))


def test_constant_coefficient_matches_exponential():
    """A = c I integrates to exp(c s J)."""
    c, s = 0.7, 2.3
    gamma = integrate_fundamental(CoefficientFunction.constant(c * np.eye(4), s))
    np.testing.assert_allclose(gamma.endpoint, linalg.expm(c * s * standard_J(2)), atol=1e-8)


def test_zero_coefficient_is_constant_identity():
    """A = 0 gives gamma = I everywhere."""
    gamma = integrate_fundamental(CoefficientFunction.constant(np.zeros((4, 4)), 1.0))
    for M in gamma.matrices:
        np.testing.assert_allclose(M, np.eye(4), atol=1e-14)


def test_samples_respect_step_bound(rng):
    """Consecutive samples differ by at most step_bound and are symplectic."""
    gamma = integrate_fundamental(smooth_coefficient(Dim(2, 1), rng, amplitude=2.0))
    assert gamma.max_step() <= 0.05
    assert all(is_symplectic(M) for M in gamma.matrices)


def test_integration_rejects_empty_interval():
    """The integration interval must be positive."""
    with pytest.raises(ParameterError):
        integrate_fundamental(CoefficientFunction.constant(np.eye(2), 1.0), t_end=0.0)


def test_extend_full_period_of_rotation():
    """e^{2tJ} on [0, pi/2] with P = -I extends to I4 over a full period."""
    gamma = constant_path(2 * np.eye(4), np.pi / 2)
    P = standard_P(Dim(2, 0))
    extended = extend_by_symmetry(gamma, P, 2)
    np.testing.assert_allclose(extended.endpoint, np.eye(4), atol=1e-10)
    half = P @ gamma.endpoint
    np.testing.assert_allclose(extended.endpoint, half @ half, atol=1e-10)


def test_extend_three_halves_matches_direct_path():
    """The third symmetric iterate equals the constant path on [0, 3 pi/2]."""
    gamma = constant_path(2 * np.eye(4), np.pi / 2)
    extended = extend_by_symmetry(gamma, -np.eye(4), 3)
    direct = constant_path(2 * np.eye(4), 3 * np.pi / 2)
    assert extended.t_end == pytest.approx(3 * np.pi / 2)
    np.testing.assert_allclose(extended.endpoint, direct.endpoint, atol=1e-10)
    for t in (0.3, 2.0, 4.1):
        np.testing.assert_allclose(extended.at(t), direct.at(t), atol=1e-10)


def test_extend_zero_coefficient():
    """Extending the constant identity path gives the identity."""
    gamma = constant_path(np.zeros((4, 4)), 1.0)
    extended = extend_by_symmetry(gamma, standard_P(Dim(2, 1)), 3)
    np.testing.assert_allclose(extended.endpoint, np.eye(4), atol=1e-14)


def test_monodromy_identity(rng):
    """gamma(tau_2) integrated directly equals (P gamma(tau_2 / 2))^2."""
    dim = Dim(2, 1)
    P = standard_P(dim)
    coeff = smooth_coefficient(dim, rng)
    half = integrate_fundamental(coeff, steps=256)
    full = integrate_fundamental(coeff, steps=512, t_end=2.0)
    composed = P @ half.endpoint @ P @ half.endpoint
    np.testing.assert_allclose(full.endpoint, composed, atol=1e-7)


def test_extension_matches_integration_on_grid(rng):
    """The symmetric extension agrees with integrating the extended coefficient."""
    dim = Dim(2, 1)
    P = standard_P(dim)
    coeff = smooth_coefficient(dim, rng)
    extended = extend_by_symmetry(integrate_fundamental(coeff, steps=256), P, 3)
    direct = integrate_fundamental(coeff, steps=768, t_end=3.0)
    for t in (0.5, 1.0, 1.75, 2.5, 3.0):
        np.testing.assert_allclose(extended.at(t), direct.at(t), atol=1e-6)


def test_extend_rejects_bad_iterate():
    """m must be a positive integer."""
    gamma = constant_path(np.eye(2), 1.0)
    with pytest.raises(ParameterError):
        extend_by_symmetry(gamma, -np.eye(2), 0)
    with pytest.raises(ParameterError):
        extend_by_symmetry(gamma, -np.eye(2), 1.5)


def test_extend_detects_broken_symmetry():
    """A periodic coefficient with P A P != A raises a symmetry error."""
    A = np.array([[1.0, 0.3, 0.0, 0.0], [0.3, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
    gamma = constant_path(A, 1.0)
    with pytest.raises(SymmetryError):
        extend_by_symmetry(gamma, standard_P(Dim(2, 1)), 3)


def test_xi_path_values():
    """xi_n starts at diag(2, 1/2)^{<>n}, passes diag(3/2, 2/3) and ends at I."""
    xi = xi_path(2, 1.0)
    np.testing.assert_allclose(xi.at(0.0), np.diag([2.0, 2.0, 0.5, 0.5]))
    np.testing.assert_allclose(xi.at(0.5), np.diag([1.5, 1.5, 2 / 3, 2 / 3]))
    np.testing.assert_allclose(xi.at(1.0), np.eye(4))


def test_xi_path_generator_is_consistent():
    """The stored generator reproduces the xi_n path by integration."""
    xi = xi_path(1, 2.0)
    gamma = integrate_fundamental(xi.generator, steps=128, t_end=2.0)
    np.testing.assert_allclose(gamma.endpoint @ xi.at(0.0), xi.endpoint, atol=1e-8)


def test_concatenate_runs_second_then_first():
    """gamma * xi starts at xi(0) and ends at gamma(T)."""
    gamma = constant_path(np.eye(4), 1.0)
    xi = xi_path(2, 1.0)
    joined = concatenate(gamma, xi)
    np.testing.assert_allclose(joined.start, np.diag([2.0, 2.0, 0.5, 0.5]))
    np.testing.assert_allclose(joined.endpoint, gamma.endpoint)
    assert joined.t_end == pytest.approx(1.0)
    np.testing.assert_allclose(joined.at(0.5), np.eye(4), atol=1e-12)


def test_concatenate_constant_identity():
    """Two constant identity paths concatenate to the constant identity."""
    identity = constant_path(np.zeros((2, 2)), 1.0)
    joined = concatenate(identity, identity)
    for M in joined.matrices:
        np.testing.assert_allclose(M, np.eye(2))


def test_concatenate_mismatch():
    """Paths that do not meet raise a concatenation error."""
    gamma = constant_path(np.eye(2), 1.0)
    with pytest.raises(ConcatenationError):
        concatenate(gamma, gamma)


def test_path_to_reaches_target(rng):
    """path_to ends at the requested symplectic matrix, with or without windings."""
    target = random_symplectic(2, rng)
    for winding in (0, 1):
        gamma = path_to(target, winding=winding)
        np.testing.assert_allclose(gamma.start, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(gamma.endpoint, target, atol=1e-8)


def test_symplectic_projection_reduces_defect(rng):
    """Projection pulls a perturbed symplectic matrix back toward Sp(2n)."""
    M = random_symplectic(2, rng, scale=0.3) + 1e-5 * rng.standard_normal((4, 4))
    assert symplectic_defect(symplectic_projection(M)) < symplectic_defect(M) / 10
