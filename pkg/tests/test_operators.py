"""Operator utilities: tensor algebra, exponentials, Pauli tools."""

import numpy as np
import pytest
from scipy.linalg import expm

from dqdgates.operators import (OperatorError, annihilation,
                                expm_hermitian, global_phase_distance,
                                identity, kron_all, operator, partial_trace,
                                pauli_decompose, pauli_string, rotation)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def test_operator_validates_dims(rng):
    with pytest.raises(OperatorError):
        operator(np.eye(6), dims=(2, 2))   # 4 != 6


def test_kron_all_matches_numpy(rng):
    a = operator(random_hermitian(rng, 2), dims=(2,))
    b = operator(random_hermitian(rng, 3), dims=(3,))
    c = operator(random_hermitian(rng, 2), dims=(2,))
    full = kron_all(a, b, c)
    ref = np.kron(np.kron(a.mat, b.mat), c.mat)
    assert full.dims == (2, 3, 2)
    np.testing.assert_allclose(full.mat, ref, atol=1e-14)


def test_annihilation_ladder():
    a = annihilation(6).mat
    comm = a @ a.conj().T - a.conj().T @ a
    # canonical commutator holds except in the truncated corner
    np.testing.assert_allclose(np.diag(comm)[:-1], 1.0, atol=1e-14)
    n = a.conj().T @ a
    np.testing.assert_allclose(np.diag(n), np.arange(6), atol=1e-14)


def test_expm_hermitian_matches_scipy(rng):
    h = random_hermitian(rng, 5)
    t = 0.731
    u = expm_hermitian(h, t)
    ref = expm(-1j * 2 * np.pi * h * t)
    np.testing.assert_allclose(u, ref, atol=1e-12)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_expm_hermitian_rejects_non_hermitian(rng):
    with pytest.raises(OperatorError):
        expm_hermitian(rng.normal(size=(3, 3)) + 1j * np.eye(3), 1.0)


def test_pauli_decompose_roundtrip(rng):
    h = random_hermitian(rng, 4)
    coeffs = pauli_decompose(h, 2)
    rebuilt = sum(c * pauli_string(lbl) for lbl, c in coeffs.items())
    np.testing.assert_allclose(rebuilt, h, atol=1e-12)


def test_rotation_targets_requested_qubit():
    # a z-pi pulse on qubit 2 must commute with any operator on qubit 1
    r2 = rotation("z", np.pi, 2)
    x1 = pauli_string("XI")
    np.testing.assert_allclose(r2 @ x1, x1 @ r2, atol=1e-14)
    # and anticommute with sigma_x on qubit 2
    x2 = pauli_string("IX")
    np.testing.assert_allclose(r2 @ x2, -x2 @ r2, atol=1e-14)
    ref = expm(-1j * (np.pi / 2) * pauli_string("IZ"))
    np.testing.assert_allclose(r2, ref, atol=1e-14)


def test_rotation_rejects_bad_qubit():
    with pytest.raises(OperatorError):
        rotation("z", np.pi, 3)
    with pytest.raises(OperatorError):
        rotation("q", np.pi, 1)


def test_partial_trace_product_state(rng):
    psi1 = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi1 /= np.linalg.norm(psi1)
    psi2 = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi2 /= np.linalg.norm(psi2)
    rho = np.outer(np.kron(psi1, psi2), np.kron(psi1, psi2).conj())
    red = partial_trace(rho, keep=[0], dims=(2, 3))
    np.testing.assert_allclose(red, np.outer(psi1, psi1.conj()), atol=1e-13)
    assert abs(np.trace(red) - 1) < 1e-13


def test_global_phase_distance_gauge_invariant(rng):
    h = random_hermitian(rng, 4)
    u = expm(-1j * h)
    assert global_phase_distance(u, np.exp(1j * 0.37) * u) < 1e-12
    assert global_phase_distance(u, expm(-1j * 1.5 * h)) > 1e-3
