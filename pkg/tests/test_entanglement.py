"""Concurrence in three forms and Bell-CHSH tools."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_unit
from modconc.entanglement import (
    OPTIMAL_BELL_SETTINGS,
    TSIRELSON,
    BellSettings,
    chsh_expectation,
    chsh_operator,
    concurrence_pure,
    density,
    j_ab_operator,
    max_violation_from_concurrence,
    maximize_chsh,
    modular_concurrence,
    spin_flip_pure,
    wootters_concurrence,
    x_state_concurrence,
)
from modconc.errors import DimensionMismatch, InvalidDensity, NotNormalized
from modconc.linalg import SIGMA_Z, kron
from modconc.modular import haar_unitary

BELL = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
seeds = st.integers(0, 2**31)
angles = st.floats(0, 2 * math.pi)


def schmidt(a, b):
    return np.array([a, 0, 0, b], dtype=complex)


def test_spin_flip_examples():
    assert np.allclose(spin_flip_pure([1, 0, 0, 0]), [0, 0, 0, -1])
    assert np.allclose(spin_flip_pure(BELL), -BELL)


@given(seeds)
def test_double_spin_flip_is_identity(seed):
    psi = random_unit(np.random.default_rng(seed), 4)
    assert np.allclose(spin_flip_pure(spin_flip_pure(psi)), psi)


@pytest.mark.parametrize("psi, expected", [
    (BELL, 1.0),
    (np.array([0, 1, 0, 0]), 0.0),
    (schmidt(0.6, 0.8), 0.96),
])
def test_concurrence_pure_examples(psi, expected):
    assert concurrence_pure(psi) == pytest.approx(expected, abs=1e-12)


def test_concurrence_pure_requires_normalization():
    with pytest.raises(NotNormalized):
        concurrence_pure([1, 1, 0, 0])
    with pytest.raises(DimensionMismatch):
        concurrence_pure([1, 0, 0])


@given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi))
def test_schmidt_concurrence_closed_form(theta, phase):
    a, b = math.cos(theta), math.sin(theta) * np.exp(1j * phase)
    assert abs(concurrence_pure(schmidt(a, b)) - 2 * abs(a * b)) <= 1e-12


def test_wootters_examples():
    assert wootters_concurrence(density(BELL)) == pytest.approx(1.0, abs=1e-12)
    assert wootters_concurrence(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)


def test_wootters_rejects_bad_density():
    with pytest.raises(InvalidDensity):
        wootters_concurrence(np.diag([1.0, 0.5, -0.5, 0.0]))
    with pytest.raises(InvalidDensity):
        wootters_concurrence(np.eye(4) / 2)


def test_pure_embedding_oracle(rng):
    for _ in range(50):
        psi = random_unit(rng, 4)
        assert abs(concurrence_pure(psi) - wootters_concurrence(density(psi))) <= 1e-9


@given(seeds)
def test_wootters_matches_x_state_formula(seed):
    rng = np.random.default_rng(seed)
    d = rng.random(4) + 1e-3
    d /= d.sum()
    rho = np.diag(d).astype(complex)
    rho[0, 3] = math.sqrt(d[0] * d[3]) * rng.random() * np.exp(2j * math.pi * rng.random())
    rho[1, 2] = math.sqrt(d[1] * d[2]) * rng.random() * np.exp(2j * math.pi * rng.random())
    rho[3, 0], rho[2, 1] = np.conj(rho[0, 3]), np.conj(rho[1, 2])
    assert abs(wootters_concurrence(rho) - x_state_concurrence(rho)) <= 1e-9


@given(seeds)
def test_wootters_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    u = kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    assert abs(wootters_concurrence(u @ rho @ u.conj().T) - wootters_concurrence(rho)) <= 1e-9


def test_werner_state_threshold():
    """Werner states p|Bell><Bell| + (1-p) I/4 have C = max(0, (3p - 1)/2)."""
    for p in (0.2, 1 / 3, 0.5, 0.9):
        rho = p * density(BELL) + (1 - p) * np.eye(4) / 4
        assert wootters_concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-9)


@pytest.mark.parametrize("psi, expected", [
    (BELL, 1.0),
    (schmidt(0.6, 0.8), 0.96),
    (np.array([1, 0, 0, 0]), 0.0),
])
def test_modular_concurrence_examples(psi, expected):
    assert modular_concurrence(psi, j_ab_operator()) == pytest.approx(expected, abs=1e-12)


@given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi))
def test_modular_concurrence_on_schmidt_class(theta, phase):
    psi = schmidt(math.cos(theta), math.sin(theta) * np.exp(1j * phase))
    assert abs(modular_concurrence(psi, j_ab_operator()) - concurrence_pure(psi)) <= 1e-10


def test_modular_concurrence_differs_off_schmidt_class():
    """On a|00> + b|01> (a product state) the J overlap is |b|^2, not 0."""
    psi = np.array([0.6, 0.8, 0, 0], dtype=complex)
    assert concurrence_pure(psi) == pytest.approx(0.0, abs=1e-12)
    assert modular_concurrence(psi, j_ab_operator()) == pytest.approx(0.64, abs=1e-12)


def test_modular_concurrence_dimension_check():
    with pytest.raises(DimensionMismatch):
        modular_concurrence(np.ones(3) / math.sqrt(3), j_ab_operator())


def test_chsh_operator_zero_angles():
    assert np.allclose(chsh_operator(BellSettings(0, 0, 0, 0)), 2 * kron(SIGMA_Z, SIGMA_Z))


@given(angles, angles, angles, angles)
def test_chsh_operator_spectrum_tsirelson(a, b, ap, bp):
    lam = np.linalg.eigvalsh(chsh_operator(BellSettings(a, b, ap, bp)))
    assert lam.max() <= TSIRELSON + 1e-12 and lam.min() >= -TSIRELSON - 1e-12


def test_chsh_expectation_bell_optimal():
    assert chsh_expectation(BELL, OPTIMAL_BELL_SETTINGS) == pytest.approx(TSIRELSON, abs=1e-6)


def test_chsh_expectation_mixed_is_zero():
    assert chsh_expectation(np.eye(4) / 4, OPTIMAL_BELL_SETTINGS) == pytest.approx(0.0, abs=1e-15)


@given(seeds, angles, angles, angles, angles)
def test_product_state_respects_classical_bound(seed, a, b, ap, bp):
    rng = np.random.default_rng(seed)
    psi = np.kron(random_unit(rng, 2), random_unit(rng, 2))
    assert abs(chsh_expectation(psi, BellSettings(a, b, ap, bp))) <= 2 + 1e-12


@pytest.mark.parametrize("c, expected", [(0.0, 2.0), (1.0, TSIRELSON), (0.6, 2 * math.sqrt(1.36))])
def test_max_violation_from_concurrence(c, expected):
    assert max_violation_from_concurrence(c) == pytest.approx(expected, abs=1e-12)


def test_max_violation_rejects_out_of_range():
    with pytest.raises(ValueError):
        max_violation_from_concurrence(1.5)


def test_maximize_chsh_bell():
    settings, value = maximize_chsh(BELL)
    assert value == pytest.approx(TSIRELSON, abs=1e-6)
    assert chsh_expectation(BELL, settings) == pytest.approx(value, abs=1e-12)
    assert all(0 <= x < 2 * math.pi for x in settings.as_tuple())


def test_maximize_chsh_product():
    _, value = maximize_chsh(np.array([1, 0, 0, 0], dtype=complex))
    assert value == pytest.approx(2.0, abs=1e-6)


def test_maximize_chsh_schmidt_reaches_bound():
    psi = schmidt(0.6, 0.8)
    _, value = maximize_chsh(psi)
    assert value == pytest.approx(max_violation_from_concurrence(0.96), abs=1e-4)


def test_maximize_chsh_is_deterministic():
    psi = schmidt(0.8, 0.6)
    assert maximize_chsh(psi) == maximize_chsh(psi)


@pytest.mark.parametrize("seed", range(5))
def test_maximize_chsh_below_concurrence_bound(seed):
    psi = random_unit(np.random.default_rng(seed), 4)
    _, value = maximize_chsh(psi)
    assert value <= max_violation_from_concurrence(concurrence_pure(psi)) + 1e-6
