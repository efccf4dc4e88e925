from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from qpr.operator_core import (
    BlochVector,
    HermitianOp,
    InvalidStateError,
    QuditBasis,
    basis_from_bloch,
    bloch_to_density,
    density_to_bloch,
    overlap,
    rotate_bloch,
    rotation_unitary,
    same_up_to_phase,
    trace_distance,
)
from strategies import unit_vectors


@given(unit_vectors())
def test_bloch_density_roundtrip(r):
    rho = bloch_to_density(r)
    assert abs(rho.trace() - 1) < 1e-12
    assert np.all(rho.eigenvalues() > -1e-12)
    assert np.allclose(density_to_bloch(rho).as_array(), r, atol=1e-12)


@given(unit_vectors(), unit_vectors())
def test_overlap_formula(r, s):
    assert abs(float(overlap(bloch_to_density(r), bloch_to_density(s))) - (1 + r @ s) / 2) < 1e-12


def test_exact_basis_elements_are_rational_projectors():
    b = basis_from_bloch(BlochVector([0, 0, 1]))
    assert b.plus.exact
    assert overlap(b.plus, b.minus) == 0
    assert overlap(b.plus, b.plus) == 1


def test_exact_overlap_for_rational_directions():
    r = BlochVector([Fraction(3, 5), 0, Fraction(4, 5)])
    s = BlochVector([0, 0, 1])
    assert overlap(bloch_to_density(r), bloch_to_density(s)) == Fraction(9, 10)


def test_non_unit_direction_rejected():
    with pytest.raises(InvalidStateError):
        basis_from_bloch([1, 1, 0])


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        HermitianOp(np.array([[0, 1], [0, 0]], dtype=complex))


@given(unit_vectors())
def test_rotation_unitary_matches_bloch_rotation(axis):
    u = rotation_unitary(axis, 2 * np.pi / 3)
    r = np.array([0.0, 0.0, 1.0])
    rotated = rotate_bloch(r, u).as_array()
    assert abs(np.linalg.norm(rotated) - 1) < 1e-12
    assert abs(rotated @ axis - r @ axis) < 1e-12


def test_rotation_about_z_by_third_turn():
    u = rotation_unitary([0, 0, 1], 2 * np.pi / 3)
    assert np.allclose(rotate_bloch([1, 0, 0], u).as_array(), [-0.5, np.sqrt(3) / 2, 0], atol=1e-12)


def test_same_up_to_phase():
    u = rotation_unitary([1, 0, 0], 0.3)
    assert same_up_to_phase(u, np.exp(0.7j) * u)
    assert not same_up_to_phase(u, rotation_unitary([1, 0, 0], 0.4))


def test_trace_distance_of_orthogonal_states():
    b = basis_from_bloch([1.0, 0.0, 0.0])
    assert abs(trace_distance(b.plus, b.minus) - 1) < 1e-12


def test_qudit_basis_from_vectors_checks_orthonormality():
    QuditBasis.from_vectors(np.eye(3))
    with pytest.raises((InvalidStateError, ValueError)):
        QuditBasis.from_vectors(np.array([[1, 0, 0], [1, 0, 0], [0, 0, 1]], dtype=complex))
