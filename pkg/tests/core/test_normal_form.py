"""Tests for normal forms, case classification and splitting numbers."""

import os
import sys

import numpy as np
import pytest

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.core.normal_form import (
    BasicForm,
    CaseTag,
    FormKind,
    build_basic_form,
    case_representative,
    classify_case,
    decompose,
    index_profile,
    n2_block,
    splitting_numbers_numeric,
    splitting_numbers_table,
)
from pindex.core.symplectic import (
    diamond,
    is_symplectic,
    krein_type,
    random_symplectic,
    rotation,
    symplectic_inverse,
)
from pindex.errors import ClassificationError, ParameterError
from pindex.index.cases import case_path

P2 = -np.eye(2)
P4 = -np.eye(4)


def test_build_basic_form_examples():
    """D(2), N1(1, 1) and R(pi/2) give their literal matrices."""
    np.testing.assert_allclose(build_basic_form(BasicForm(FormKind.D, lam=2.0)), np.diag([2.0, 0.5]))
    np.testing.assert_allclose(build_basic_form(BasicForm(FormKind.N1, lam=1.0, b=1.0)), [[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(
        build_basic_form(BasicForm(FormKind.R, theta=np.pi / 2)), [[0.0, -1.0], [1.0, 0.0]], atol=1e-15,
    )


def test_basic_form_parameter_ranges():
    """Out-of-range parameters raise parameter errors."""
    with pytest.raises(ParameterError):
        build_basic_form(BasicForm(FormKind.D, lam=3.0))
    with pytest.raises(ParameterError):
        build_basic_form(BasicForm(FormKind.N1, lam=1.0, b=2.0))
    with pytest.raises(ParameterError):
        build_basic_form(BasicForm(FormKind.R, theta=np.pi))
    with pytest.raises(ParameterError):
        build_basic_form(BasicForm(FormKind.N2, theta=1.0, B=(0.0, 1.0, 1.0, 0.0)))


def test_n2_block_is_symplectic():
    """The completed N2 block is symplectic for any angle off 0 and pi."""
    for theta in (0.4, np.pi / 2, 2.5, 4.0):
        assert is_symplectic(n2_block(theta, 1.0, 0.0))
        assert is_symplectic(n2_block(theta, 0.3, -0.7, b1=0.2))
    with pytest.raises(ParameterError):
        n2_block(np.pi, 1.0, 0.0)


@pytest.mark.parametrize(
    "X, expected",
    [
        (np.eye(2), 2),
        (np.array([[1.0, 1.0], [0.0, 1.0]]), 1),
        (np.array([[1.0, -1.0], [0.0, 1.0]]), 3),
        (np.array([[-1.0, -1.0], [0.0, -1.0]]), 4),
        (-np.eye(2), 5),
        (np.array([[-1.0, 1.0], [0.0, -1.0]]), 6),
        (np.diag([2.0, 0.5]), 10),
    ],
)
def test_classify_two_by_two(X, expected):
    """M P = X is classified into the expected case."""
    assert classify_case(X @ P2, P2).case_id == expected


def test_classify_rotation_recovers_angle():
    """Rotations are Case 7 with their angle, on both half circles."""
    for theta in (0.3, 2.0, 4.0, 5.5):
        tag = classify_case(rotation(theta) @ P2, P2)
        assert tag.case_id == 7
        assert tag.theta == pytest.approx(theta, abs=1e-9)


@pytest.mark.parametrize("case_id", [8, 9])
@pytest.mark.parametrize("theta", [1.1, np.pi / 2, 2 * np.pi / 3])
def test_classify_n2_representatives(case_id, theta):
    """N2 representatives are classified back into their own case."""
    form, tag = case_representative(case_id, theta)
    X = build_basic_form(form)
    result = classify_case(X @ P4, P4)
    assert result.case_id == case_id
    assert result.theta == pytest.approx(theta, abs=1e-6)


def test_classify_rejects_unmatched_patterns():
    """Two distinct rotations in one 4x4 block match none of the cases."""
    M = diamond(rotation(0.5), rotation(1.5))
    S = random_symplectic(2, np.random.default_rng(3), scale=0.3)
    with pytest.raises(ClassificationError):
        classify_case(symplectic_inverse(S) @ M @ S @ P4, P4)


def test_case_representative_requires_angle():
    """Cases 7-9 need theta off 0 and pi."""
    with pytest.raises(ParameterError):
        case_representative(7)
    with pytest.raises(ParameterError):
        case_representative(8, np.pi)
    form, tag = case_representative(10)
    assert tag.case_id == 10 and form.kind is FormKind.D


def test_decompose_block_diagonal_input():
    """R(pi/3) <> D(2) splits into a Case 7 and a Case 10 block."""
    X = diamond(rotation(np.pi / 3), np.diag([2.0, 0.5]))
    dec = decompose(X @ P4, P4)
    assert [t.case_id for t in dec.tags] == [7, 10]
    assert dec.counts.as_tuple() == (0, 0, 0, 1, 0)
    assert dec.rest_dim == 2
    assert dec.elliptic_height() == 2


def test_decompose_identity():
    """M P = I4 gives two Case 2 blocks."""
    dec = decompose(P4, P4)
    assert dec.counts.as_tuple() == (0, 2, 0, 0, 0)


def test_decompose_unipotent_and_rotation():
    """N1(1, -1) <> R(pi/2) gives p_+ = 1 and r = 1."""
    X = diamond(np.array([[1.0, -1.0], [0.0, 1.0]]), rotation(np.pi / 2))
    dec = decompose(X @ P4, P4)
    assert dec.counts.as_tuple() == (0, 0, 1, 1, 0)
    dec.check_counts()


def test_decompose_conjugated_rotations(rng):
    """A symplectic conjugate of two rotations is recognized through Krein types."""
    X = diamond(rotation(0.7), rotation(2.0))
    S = random_symplectic(2, rng, scale=0.3)
    Y = symplectic_inverse(S) @ X @ S
    dec = decompose(Y @ P4, P4)
    assert dec.counts.r == 2
    assert sorted(t.theta for t in dec.tags) == pytest.approx([0.7, 2.0], abs=1e-6)
    np.testing.assert_allclose(
        np.sort_complex(np.linalg.eigvals(dec.reconstruct())),
        np.sort_complex(np.linalg.eigvals(Y)),
        atol=1e-6,
    )


def test_splitting_table_examples():
    """Tabled pairs at distinguished points and (0, 0) off the spectrum."""
    assert splitting_numbers_table(CaseTag(2), 1.0).as_tuple() == (1, 1)
    theta = 1.1
    assert splitting_numbers_table(CaseTag(9, theta=theta), np.exp(1j * theta)).as_tuple() == (0, 0)
    assert splitting_numbers_table(CaseTag(7, theta=theta), np.exp(1j * theta)).as_tuple() == (0, 1)
    assert splitting_numbers_table(CaseTag(7, theta=theta), np.exp(-1j * theta)).as_tuple() == (1, 0)
    for case_id in (1, 3, 4, 6, 10):
        assert splitting_numbers_table(CaseTag(case_id), np.exp(0.37j)).as_tuple() == (0, 0)


def test_splitting_sign_matches_krein_type():
    """For rotations S+ - S- = q - p with the -iJ Krein form."""
    for theta in (0.6, 2.4, 3.9):
        tag = CaseTag(7, theta=theta)
        for omega in tag.points():
            pair = splitting_numbers_table(tag, omega)
            p, q = krein_type(rotation(theta), omega)
            assert pair.s_plus - pair.s_minus == q - p


CASES = [(case_id, None) for case_id in range(1, 7)] + [
    (case_id, theta) for case_id in (7, 8, 9) for theta in (2 * np.pi / 3, 1.1)
]


@pytest.mark.parametrize("case_id,theta", CASES)
def test_splitting_numeric_matches_table(case_id, theta):
    """The perturbation limit reproduces the tabled pair at every spectrum point of Cases 1-9."""
    gamma, P, tag = case_path(case_id, theta)
    for omega in tag.points():
        numeric = splitting_numbers_numeric(gamma, omega, P).as_tuple()
        assert numeric == splitting_numbers_table(tag, omega).as_tuple(), (case_id, omega)
    assert splitting_numbers_numeric(gamma, np.exp(0.37j), P).as_tuple() == (0, 0)


def test_splitting_numeric_rejects_bad_schedule():
    """The epsilon schedule must be positive and decreasing."""
    gamma, P, _ = case_path(2)
    with pytest.raises(ParameterError):
        splitting_numbers_numeric(gamma, 1.0, P, epsilon_schedule=[1e-3, 1e-2])


def test_index_profile_of_rotation_block():
    """The index drops by S- at e^{i theta} and recovers at the conjugate point."""
    theta = 1.1
    profile = index_profile(0, [CaseTag(7, theta=theta)])
    assert profile.at(np.exp(0.5j)) == (0, 0)
    assert profile.at(np.exp(1j * theta)) == (-1, 1)
    assert profile.at(np.exp(3j)) == (-1, 0)
    assert profile.at(np.exp(-1j * theta)) == (-1, 1)
    assert profile.at(np.exp(6.1j)) == (0, 0)


def test_index_profile_at_one_carries_nullity():
    """A Case 2 block contributes nullity 2 at 1 and S+ = 1 just after."""
    profile = index_profile(3, [CaseTag(2)])
    assert profile.at(1.0) == (3, 2)
    assert profile.at(np.exp(0.2j)) == (4, 0)
