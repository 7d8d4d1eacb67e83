"""Tests for the Fourier discretization of the twisted loop space."""

import os
import sys

import numpy as np
import pytest

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.core.symplectic import Dim, standard_P
from pindex.errors import DimensionError, ParameterError
from pindex.variational.fourier import DualElement, FourierBasis, apply_Pi


def test_frequency_parity_follows_P():
    """Odd frequencies on P = -1 coordinates, even nonzero ones on P = +1 coordinates."""
    basis = FourierBasis(Dim(2, 1), 0.5, 4)
    assert basis.size == 16
    for c in (0, 2):
        assert set(basis.freqs[basis.coords == c]) == {1, 3}
    for c in (1, 3):
        assert set(basis.freqs[basis.coords == c]) == {2, 4}
    assert 0 not in basis.freqs
    assert basis.grid_size == 32


def test_basis_rejects_bad_parameters():
    """N_max below 2 and non-positive half periods are parameter errors."""
    with pytest.raises(ParameterError):
        FourierBasis(Dim(2, 0), 0.5, 1)
    with pytest.raises(ParameterError):
        FourierBasis(Dim(2, 0), 0.0, 4)


def test_synthesized_loops_are_P_symmetric(rng):
    """u(t + T) = P u(t) for every element."""
    dim = Dim(2, 1)
    basis = FourierBasis(dim, 0.5, 6)
    u = DualElement(basis, rng.standard_normal(basis.size))
    t = np.linspace(0.0, 0.5, 11)
    np.testing.assert_allclose(u.values(t + 0.5), u.values(t) @ standard_P(dim).T, atol=1e-12)


def test_analyze_inverts_synthesize(rng):
    """Analysis of grid values recovers the coefficients exactly."""
    basis = FourierBasis(Dim(2, 0), 0.5, 8)
    coeffs = rng.standard_normal(basis.size)
    np.testing.assert_allclose(basis.analyze(basis.synthesize(coeffs)), coeffs, atol=1e-12)
    with pytest.raises(DimensionError):
        basis.analyze(np.zeros((3, 4)))


def test_pi_is_a_primitive(rng):
    """The derivative of Pi u is u."""
    basis = FourierBasis(Dim(2, 1), 0.5, 6)
    u = DualElement(basis, rng.standard_normal(basis.size))
    primitive = apply_Pi(u)
    t = np.linspace(0.05, 0.45, 9)
    h = 1e-6
    derivative = (primitive.values(t + h) - primitive.values(t - h)) / (2 * h)
    np.testing.assert_allclose(derivative, u.values(t), atol=1e-6)


def test_pi_of_lowest_cosine():
    """Pi maps cos(omega t) to sin(omega t) / omega."""
    basis = FourierBasis(Dim(1, 0), 0.5, 2)
    u = DualElement.zeros(basis)
    u.coeffs[0] = 1.0
    image = apply_Pi(u)
    expected = np.zeros(basis.size)
    expected[1] = 1.0 / (2 * np.pi)
    np.testing.assert_allclose(image.coeffs, expected)


def test_structure_matrices():
    """Pi is skew, J squares to -I and the bilinear form is symmetric."""
    basis = FourierBasis(Dim(3, 1), 0.5, 5)
    Pi = basis.pi_matrix()
    Jm = basis.j_matrix()
    np.testing.assert_allclose(Pi.T, -Pi)
    np.testing.assert_allclose(Jm @ Jm, -np.eye(basis.size))
    A = basis.bilinear_matrix()
    np.testing.assert_allclose(A, A.T)


def test_weighted_form_of_identity_weight():
    """With K = I the weighted form is the identity on an orthonormal basis."""
    basis = FourierBasis(Dim(2, 0), 0.5, 6)
    weights = np.broadcast_to(np.eye(4), (basis.grid_size, 4, 4))
    np.testing.assert_allclose(basis.weighted_form(weights), np.eye(basis.size), atol=1e-12)


def test_complex_modes_of_single_cosine():
    """A cosine coefficient a gives the amplitude a sqrt(2/T) / 2."""
    basis = FourierBasis(Dim(2, 1), 0.5, 4)
    u = DualElement.zeros(basis)
    u.coeffs[0] = 3.0
    modes = u.u1_modes
    assert set(modes) == {1, 3}
    assert modes[1][0] == pytest.approx(3.0 * np.sqrt(2.0 / 0.5) / 2)
    assert set(u.u2_modes) == {2, 4}
    assert not np.any(u.u2_modes[2])


def test_element_shape_is_checked():
    """Coefficient vectors must match the basis."""
    basis = FourierBasis(Dim(2, 0), 0.5, 4)
    with pytest.raises(DimensionError):
        DualElement(basis, np.zeros(basis.size + 1))
