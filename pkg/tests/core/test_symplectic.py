"""Tests for the symplectic linear algebra core.

Standard matrices, the diamond product, D_{P,omega}, nullities, Krein types,
spectra and elliptic heights.
"""

import os
import sys

import numpy as np
import pytest

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.core.symplectic import (
    D_P_omega,
    Dim,
    as_omega,
    diamond,
    diamond_all,
    elliptic_height,
    height_report,
    is_symplectic,
    kernel_basis,
    krein_type,
    make_standard_matrices,
    matrix_from_dict,
    matrix_to_dict,
    nu_P_omega,
    random_symplectic,
    rotation,
    spectrum_report,
    standard_J,
    standard_P,
    symplectic_inverse,
)
from pindex.errors import DimensionError, ParameterError, SpectrumError

D2 = np.diag([2.0, 0.5])


def test_standard_P_kappa_zero():
    """P is -I when kappa is zero."""
    _, P = make_standard_matrices(Dim(2, 0))
    np.testing.assert_array_equal(P, -np.eye(4))


def test_standard_P_with_symmetric_planes():
    """P carries +1 on the last kappa coordinates of each half."""
    np.testing.assert_array_equal(standard_P(Dim(2, 1)), np.diag([-1.0, 1.0, -1.0, 1.0]))
    np.testing.assert_array_equal(standard_P(Dim(3, 1)), np.diag([-1.0, -1.0, 1.0, -1.0, -1.0, 1.0]))


def test_strict_dimension_range():
    """Strict construction rejects kappa >= n - 1."""
    with pytest.raises(DimensionError):
        make_standard_matrices(Dim(2, 1), strict=True)
    J, P = make_standard_matrices(Dim(3, 1), strict=True)
    assert J.shape == P.shape == (6, 6)


def test_dim_validation():
    """Dim rejects kappa outside [0, n] and oversized n."""
    with pytest.raises(DimensionError):
        Dim(2, 3)
    with pytest.raises(DimensionError):
        Dim(0)
    with pytest.raises(DimensionError):
        Dim(9)


def test_P_commutes_with_J():
    """PJ = JP and P is symplectic."""
    for n, kappa in [(2, 0), (2, 1), (3, 1), (3, 2)]:
        J, P = make_standard_matrices(Dim(n, kappa))
        np.testing.assert_array_equal(P @ J, J @ P)
        assert is_symplectic(P)


def test_diamond_identity_blocks():
    """diamond(I2, I2) is I4."""
    np.testing.assert_array_equal(diamond(np.eye(2), np.eye(2)), np.eye(4))


def test_diamond_of_hyperbolic_blocks():
    """diamond(D(2), D(2)) interleaves the diagonal entries."""
    np.testing.assert_allclose(diamond(D2, D2), np.diag([2.0, 2.0, 0.5, 0.5]))


def test_diamond_rejects_odd_input():
    """Odd-sized inputs raise a dimension error."""
    with pytest.raises(DimensionError):
        diamond(np.eye(3), np.eye(2))


def test_diamond_preserves_symplecticity_and_spectrum(rng):
    """The diamond product is symplectic and its spectrum is the union."""
    M1 = random_symplectic(1, rng)
    M2 = random_symplectic(2, rng)
    M = diamond(M1, M2)
    assert is_symplectic(M)
    expected = np.sort_complex(np.concatenate([np.linalg.eigvals(M1), np.linalg.eigvals(M2)]))
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(M)), expected, atol=1e-8)


def test_diamond_associative(rng):
    """(A <> B) <> C equals A <> (B <> C)."""
    A, B, C = (random_symplectic(1, rng) for _ in range(3))
    np.testing.assert_allclose(diamond(diamond(A, B), C), diamond(A, diamond(B, C)))


def test_D_P_omega_examples():
    """Direct substitutions into D_{P,omega}."""
    P = -np.eye(2)
    assert D_P_omega(np.eye(2), 1.0, P) == pytest.approx(4.0)
    omega = np.exp(0.7j)
    assert D_P_omega(omega * P, omega, P) == pytest.approx(0.0, abs=1e-12)
    assert D_P_omega(-np.eye(4), 1.0, -np.eye(4)) == pytest.approx(0.0, abs=1e-12)


def test_D_P_omega_rejects_points_off_circle():
    """omega must lie on the unit circle."""
    with pytest.raises(ParameterError):
        D_P_omega(np.eye(2), 1.5, -np.eye(2))
    with pytest.raises(ParameterError):
        as_omega(0.5j)


def test_nu_P_omega_examples():
    """Nullity of M - omega P for the tabled examples."""
    P = -np.eye(4)
    assert nu_P_omega(P, 1.0, P) == 4
    assert nu_P_omega(-np.eye(4), 1.0, P) == 4
    theta = 1.1
    P2 = -np.eye(2)
    assert nu_P_omega(rotation(theta) @ P2, np.exp(1j * theta), P2) == 1


def test_D_vanishes_with_nullity(rng):
    """D_{P,omega}(M) = 0 exactly when nu_{P,omega}(M) > 0."""
    _, P = make_standard_matrices(Dim(2, 1))
    for _ in range(10):
        M = random_symplectic(2, rng, scale=0.5)
        omega = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
        assert nu_P_omega(M, omega, P) == 0
        assert abs(D_P_omega(M, omega, P)) > 1e-10
    theta = 0.9
    M = diamond(rotation(theta), np.diag([2.0, 0.5])) @ -np.eye(4)
    assert nu_P_omega(M, np.exp(1j * theta), -np.eye(4)) == 1
    assert D_P_omega(M, np.exp(1j * theta), -np.eye(4)) == pytest.approx(0.0, abs=1e-10)


def test_elliptic_height_examples():
    """Heights of I4, D(2)<>D(2) and R(pi/3)<>D(2)."""
    assert elliptic_height(np.eye(4)) == 4
    assert elliptic_height(diamond(D2, D2)) == 0
    assert elliptic_height(diamond(rotation(np.pi / 3), D2)) == 2


def test_elliptic_height_additive(rng):
    """e(M1 <> M2) = e(M1) + e(M2)."""
    M1 = rotation(0.4)
    M2 = random_symplectic(1, rng, scale=2.0)
    assert elliptic_height(diamond(M1, M2)) == elliptic_height(M1) + elliptic_height(M2)


def test_height_report_tags():
    """Fully elliptic matrices are tagged elliptic, one pair on the circle hyperbolic."""
    assert height_report(diamond(rotation(0.3), rotation(1.2))).tag == "elliptic"
    assert height_report(diamond(rotation(0.3), D2)).tag == "hyperbolic"
    assert height_report(diamond(D2, D2)).tag is None


def test_krein_type_of_rotation():
    """R(theta) has Krein type (1, 0) at e^{i theta} and (0, 1) at e^{-i theta}."""
    theta = 0.8
    assert krein_type(rotation(theta), np.exp(1j * theta)) == (1, 0)
    assert krein_type(rotation(theta), np.exp(-1j * theta)) == (0, 1)
    assert krein_type(diamond(rotation(theta), rotation(theta)), np.exp(1j * theta)) == (2, 0)


def test_krein_type_conjugate_symmetry():
    """Conjugate points swap the Krein pair."""
    M = diamond(rotation(0.5), rotation(2 * np.pi - 1.3))
    for theta in (0.5, 1.3):
        p, q = krein_type(M, np.exp(1j * theta))
        assert krein_type(M, np.exp(-1j * theta)) == (q, p)


def test_krein_type_outside_spectrum():
    """A point off the spectrum raises a spectrum error."""
    with pytest.raises(SpectrumError):
        krein_type(rotation(0.5), np.exp(1.5j))


def test_spectrum_report(rng):
    """Eigenvalues come in 1/conj pairs and circle flags carry Krein pairs."""
    M = diamond(rotation(0.7), D2)
    report = spectrum_report(M)
    assert sum(mult for _, mult in report.eigenvalues) == 4
    assert sum(report.on_circle_flags) == 2
    circle_krein = [k for k, flag in zip(report.krein, report.on_circle_flags) if flag]
    assert sorted(circle_krein) == [(0, 1), (1, 0)]
    assert len(report.multipliers) == 4
    assert "eigenvalues" in report.to_dict()


def test_random_symplectic_properties(rng):
    """Random symplectic matrices have unit determinant and a J-inverse."""
    M = random_symplectic(3, rng)
    assert is_symplectic(M)
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(symplectic_inverse(M) @ M, np.eye(6), atol=1e-8)


def test_standard_J_squares_to_minus_identity():
    """J^2 = -I."""
    J = standard_J(3)
    np.testing.assert_array_equal(J @ J, -np.eye(6))


def test_matrix_serialization(rng):
    """Matrices survive the {n, kappa, rows} format; bad shapes are rejected."""
    M = random_symplectic(2, rng)
    data = matrix_to_dict(M, Dim(2, 1))
    assert data["n"] == 2 and data["kappa"] == 1
    parsed, dim = matrix_from_dict(data)
    np.testing.assert_array_equal(parsed, M)
    assert dim == Dim(2, 1)
    with pytest.raises(DimensionError):
        matrix_from_dict({"n": 2, "rows": [[1.0, 0.0], [0.0, 1.0]]})


def test_diamond_all_requires_blocks():
    """diamond_all of nothing is an error; of one block, the block."""
    with pytest.raises(DimensionError):
        diamond_all()
    np.testing.assert_array_equal(diamond_all(D2), D2)


def test_kernel_threshold_is_relative_above_unit_norm():
    """Large matrices are thresholded against sigma_max, small ones against tol_rank itself."""
    assert kernel_basis(np.diag([1e3, 1e-6]), 1e-8).shape == (2, 1)
    assert kernel_basis(np.diag([1.0, 1e-6]), 1e-8).shape == (2, 0)
    assert kernel_basis(1e-9 * np.eye(2), 1e-8).shape == (2, 2)
    K = kernel_basis(np.array([[1.0, 1.0], [1.0, 1.0]]), 1e-8)
    np.testing.assert_allclose(np.abs(K[:, 0]), [np.sqrt(0.5)] * 2, atol=1e-12)
