"""Kernel: Kronecker products, Hermitian spectra and antilinear operators."""
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conftest import random_complex, random_hermitian
from modconc.config import Tolerances
from modconc.errors import NotHermitian, NotPSD, Singular
from modconc.linalg import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    AntilinearOperator,
    antilinear_adjoint,
    antilinear_polar,
    complex_conjugation,
    hermitian_eig,
    hermitian_power,
    kron,
    psd_sqrt,
    unitary_from_hermitian,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_pauli_block():
    out = kron(SIGMA_X, I2)
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    assert np.array_equal(out, expected)


def test_kron_identity_dimension():
    assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))


@given(seeds)
def test_kron_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (random_complex(rng, 2, 2) for _ in range(4))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)


def test_kron_associative(rng):
    a, b, c = random_complex(rng, 2, 2), random_complex(rng, 3, 3), random_complex(rng, 2, 2)
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_pauli_z_spectrum():
    spec = hermitian_eig(SIGMA_Z)
    assert np.allclose(spec.eigenvalues, [1, -1])


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(min_value=2, max_value=8))
def test_eig_reconstruction_and_orthonormality(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    spec = hermitian_eig(h)
    v = spec.eigenvectors
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert np.linalg.norm(v.conj().T @ v - np.eye(n), 2) < 1e-12
    assert np.linalg.norm(spec.reconstruct() - h, 2) <= 1e-12 * np.linalg.norm(h, 2)


def test_psd_sqrt_known_values():
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    p = np.full((2, 2), 0.5)
    assert np.allclose(psd_sqrt(p), p)


def test_psd_sqrt_clamps_and_rejects():
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-13])), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1e-3]))


@given(seeds)
def test_psd_sqrt_squares_back(seed):
    rng = np.random.default_rng(seed)
    x = random_complex(rng, 5, 5)
    p = x @ x.conj().T
    r = psd_sqrt(p)
    assert np.allclose(r @ r, p, atol=1e-10)
    assert np.min(np.linalg.eigvalsh(r)) > -1e-10


def test_unitary_zero_generator():
    assert np.allclose(unitary_from_hermitian(np.zeros((3, 3)), 1.7), np.eye(3))


def test_unitary_pauli_rotation():
    s = 0.83
    u = unitary_from_hermitian(SIGMA_Z, s)
    assert np.allclose(u, np.diag([np.exp(1j * s), np.exp(-1j * s)]))


@given(seeds, st.floats(min_value=-3, max_value=3))
def test_unitary_matches_scipy_expm(seed, s):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 6)
    u = unitary_from_hermitian(h, s)
    assert np.allclose(u, scipy.linalg.expm(1j * s * h), atol=1e-10)
    assert np.linalg.norm(u.conj().T @ u - np.eye(6), 2) < 1e-10


def test_hermitian_power_rejects_singular():
    with pytest.raises(Singular):
        hermitian_power(np.diag([1.0, 0.0]), -0.5)


def test_conjugation_is_involution(rng):
    k = complex_conjugation(3)
    v = random_complex(rng, 3)
    assert np.allclose(k(v), v.conj())
    assert np.allclose(k.squared(), np.eye(3))


def test_antilinear_action(rng):
    a = AntilinearOperator(random_complex(rng, 4, 4))
    v, w = random_complex(rng, 4), random_complex(rng, 4)
    assert np.allclose(a(1j * v + w), -1j * a(v) + a(w))


def test_antilinear_adjoint_definition(rng):
    """``<x, S y> = conj(<S^dagger x, y>)`` for antilinear ``S``."""
    s = AntilinearOperator(random_complex(rng, 4, 4))
    sd = antilinear_adjoint(s)
    x, y = random_complex(rng, 4), random_complex(rng, 4)
    assert np.isclose(np.vdot(x, s(y)), np.conj(np.vdot(sd(x), y)))
    assert np.allclose(antilinear_adjoint(sd).matrix, s.matrix)


@given(seeds, st.integers(min_value=2, max_value=6))
def test_polar_decomposition(seed, n):
    rng = np.random.default_rng(seed)
    s = AntilinearOperator(random_complex(rng, n, n))
    J, delta = antilinear_polar(s)
    assert np.allclose(J.matrix.conj().T @ J.matrix, np.eye(n), atol=1e-10)
    assert np.allclose(delta, delta.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(delta)) > 0
    assert np.allclose(J.after_linear(scipy.linalg.sqrtm(delta)).matrix, s.matrix, atol=1e-9)
    # Delta = S^dagger S as a linear map
    assert np.allclose(delta, s.then(antilinear_adjoint(s)), atol=1e-10)


def test_polar_of_conjugation_is_trivial():
    J, delta = antilinear_polar(complex_conjugation(3))
    assert np.allclose(J.matrix, np.eye(3))
    assert np.allclose(delta, np.eye(3))


def test_polar_of_scaled_conjugation():
    J, delta = antilinear_polar(AntilinearOperator(2 * np.eye(2)))
    assert np.allclose(J.matrix, np.eye(2))
    assert np.allclose(delta, 4 * np.eye(2))


def test_polar_rejects_singular():
    with pytest.raises(Singular):
        antilinear_polar(AntilinearOperator(np.diag([1.0, 0.0])))


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(herm=0.0)
    assert Tolerances().updated(eig=1e-6).eig == 1e-6


def test_sigma_y_is_hermitian():
    assert np.array_equal(SIGMA_Y, SIGMA_Y.conj().T)
