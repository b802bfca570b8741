"""Operator algebras, commutants and the Tomita-Takesaki construction."""
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conftest import random_unit
from modconc.entanglement import j_ab_operator
from modconc.errors import IllConditioned, NotCyclic, NotNormalized, NotSeparating
from modconc.fock import ModeSystem, annihilation
from modconc.linalg import I2, SIGMA_PLUS, SIGMA_X, SIGMA_Y, SIGMA_Z, AntilinearOperator, kron
from modconc.modular import (
    AlgebraBasis,
    ModularData,
    bicommutant_check,
    commutant,
    generate_algebra,
    haar_unitary,
    is_cyclic,
    is_separating,
    random_standard_instance,
    reduced_density_delta,
    same_span,
    schmidt_vector,
    tomita,
    verify_modular_properties,
)
from modconc.susy import SusyModel, j_susy_operator

BLOCK_SHAPES = [[2], [1, 1, 1, 1], [2, 1], [1, 2], [1, 1, 1], [2, 1, 1], [1, 1, 1, 1, 1, 1, 1, 1, 1]]
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
PHI_PLUS = schmidt_vector(0.5)


def qubit_algebra():
    return generate_algebra([kron(p, I2) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)], 4)


def brute_commutant_dim(mats, dim):
    """Null space of ``X -> ([X, A_k])_k`` on row-major ``vec(X)``."""
    eye = np.eye(dim)
    rows = [np.kron(eye, a.T) - np.kron(a, eye) for a in mats]
    return scipy.linalg.null_space(np.vstack(rows), rcond=1e-10).shape[1]


@pytest.mark.parametrize("gens, expected", [
    ([SIGMA_Z], 2),
    ([SIGMA_X, SIGMA_Z], 4),
    ([SIGMA_PLUS], 4),
    ([kron(SIGMA_X, I2), kron(SIGMA_Z, I2)], 4),
    ([kron(SIGMA_Z, I2), kron(I2, SIGMA_Z)], 4),
])
def test_generate_algebra_dimension(gens, expected):
    basis = generate_algebra(gens)
    assert basis.size == expected
    assert basis.contains_identity
    assert basis.closure_residual() < 1e-10


def test_generated_basis_is_hs_orthonormal():
    basis = qubit_algebra()
    v = basis.vectors
    assert np.allclose(v.conj().T @ v, np.eye(basis.size), atol=1e-12)


def test_commutant_of_alice_is_bob():
    com = commutant(qubit_algebra())
    bob = generate_algebra([kron(I2, p) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)], 4)
    assert same_span(com, bob)


def test_commutant_of_diagonal_is_itself():
    diag = generate_algebra([SIGMA_Z])
    assert same_span(commutant(diag), diag)
    assert commutant(diag).size == brute_commutant_dim(diag.elements, 2)


def test_commutant_of_full_algebra_is_scalars():
    com = commutant(generate_algebra([SIGMA_X, SIGMA_Z]))
    assert com.size == 1
    assert com.residual(np.eye(2)) < 1e-12


@given(st.integers(0, 10_000), st.sampled_from(BLOCK_SHAPES[:6]))
def test_commutant_elements_commute_and_match_null_space(seed, blocks):
    basis, _ = random_standard_instance(np.random.default_rng(seed), blocks)
    com = commutant(basis)
    for x in com.elements:
        for a in basis.elements:
            assert np.linalg.norm(x @ a - a @ x, 2) <= 1e-10
    assert com.size == brute_commutant_dim(basis.elements, basis.dim)
    assert com.closure_residual() < 1e-9


@given(st.integers(0, 10_000), st.sampled_from(BLOCK_SHAPES[:6]))
def test_bicommutant_of_generated_algebra(seed, blocks):
    basis, _ = random_standard_instance(np.random.default_rng(seed), blocks)
    assert bicommutant_check(basis)


def test_bicommutant_examples():
    assert bicommutant_check(qubit_algebra())
    assert bicommutant_check(generate_algebra([SIGMA_X, SIGMA_Z]))
    raw = AlgebraBasis.from_span([I2, SIGMA_PLUS])
    assert not bicommutant_check(raw)


def test_cyclic_separating_examples():
    alice = qubit_algebra()
    assert is_cyclic(alice, PSI_PLUS) and is_separating(alice, PSI_PLUS)
    prod = np.array([1, 0, 0, 0], dtype=complex)
    assert not is_separating(alice, prod)
    assert not is_cyclic(alice, prod)
    full = generate_algebra([kron(SIGMA_X, I2), kron(SIGMA_Z, I2), kron(I2, SIGMA_X), kron(I2, SIGMA_Z)])
    assert full.size == 16
    assert is_cyclic(full, PSI_PLUS) and not is_separating(full, PSI_PLUS)


@given(st.integers(0, 10_000), st.sampled_from(BLOCK_SHAPES[:6]))
def test_cyclic_separating_duality(seed, blocks):
    rng = np.random.default_rng(seed)
    basis, omega = random_standard_instance(rng, blocks)
    com = commutant(basis)
    assert is_cyclic(basis, omega) == is_separating(com, omega)
    prod = np.zeros(basis.dim, dtype=complex)
    prod[0] = 1.0
    assert is_cyclic(basis, prod) == is_separating(com, prod)


def test_tomita_bell_psi_plus_gives_j_ab():
    md = tomita(qubit_algebra(), PSI_PLUS)
    assert np.abs(md.J.matrix - j_ab_operator().matrix).max() <= 1e-10
    # explicit action on the product basis: |a,b> -> |1-b, 1-a>
    for a in range(2):
        for b in range(2):
            e = np.zeros(4, dtype=complex)
            e[2 * a + b] = 1.0
            out = np.zeros(4, dtype=complex)
            out[2 * (1 - b) + (1 - a)] = 1.0
            assert np.allclose(md.J(e), out, atol=1e-10)


def test_tomita_bell_phi_plus_delta_identity_and_swap():
    md = tomita(qubit_algebra(), PHI_PLUS)
    assert np.linalg.norm(md.delta - np.eye(4), 2) <= 1e-10
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(md.J.matrix, swap, atol=1e-10)


@pytest.mark.parametrize("p", [0.3, 0.1, 0.75])
def test_tomita_schmidt_spectrum(p):
    omega = schmidt_vector(p)
    md = tomita(qubit_algebra(), omega)
    expected = sorted([1, 1, p / (1 - p), (1 - p) / p])
    assert np.allclose(sorted(np.linalg.eigvalsh(md.delta)), expected, atol=1e-10)
    assert np.allclose(md.delta, reduced_density_delta(omega, (2, 2)), atol=1e-10)


def test_tomita_preconditions():
    alice = qubit_algebra()
    with pytest.raises(NotNormalized):
        tomita(alice, 2 * PSI_PLUS)
    with pytest.raises(NotCyclic):
        tomita(alice, np.array([1, 0, 0, 0], dtype=complex))
    with pytest.raises(NotSeparating):
        tomita(generate_algebra([kron(SIGMA_X, I2), kron(SIGMA_Z, I2), kron(I2, SIGMA_X)]), PSI_PLUS)


def test_tomita_ill_conditioned():
    eps = 1e-5
    omega = np.array([math.sqrt(1 - eps**2), 0, 0, eps], dtype=complex)
    with pytest.raises(IllConditioned):
        tomita(qubit_algebra(), omega)


@pytest.mark.parametrize("seed", range(8))
def test_random_instances_pass_all_properties(seed):
    rng = np.random.default_rng(seed)
    blocks = BLOCK_SHAPES[seed % len(BLOCK_SHAPES)]
    basis, omega = random_standard_instance(rng, blocks)
    report = verify_modular_properties(tomita(basis, omega), basis, 1e-9)
    assert report.passed, report.failures()


def test_random_delta_matches_reduced_density_oracle(rng):
    """For ``B(C^2) (x) 1`` in a random product basis, Delta is ``rho_A (x) rho_B^-1``."""
    omega = random_unit(rng, 4)
    md = tomita(qubit_algebra(), omega)
    assert np.allclose(md.delta, reduced_density_delta(omega, (2, 2)), atol=1e-9)


def test_perturbed_j_is_flagged(rng):
    basis, omega = random_standard_instance(rng, [2, 1])
    md = tomita(basis, omega)
    noise = 1e-3 * (rng.standard_normal(md.J.matrix.shape) + 1j * rng.standard_normal(md.J.matrix.shape))
    bad = ModularData(md.S, AntilinearOperator(md.J.matrix + noise), md.delta, md.omega)
    report = verify_modular_properties(bad, basis, 1e-9)
    assert not report.passed
    assert "J_squared_identity" in report.failures()


def test_conjugated_algebra_keeps_modular_structure(rng):
    """Rotating algebra and vector by the same unitary rotates J and Delta."""
    u = haar_unitary(rng, 4)
    alice = qubit_algebra()
    rotated = AlgebraBasis.from_span([u @ a @ u.conj().T for a in alice.elements])
    omega = random_unit(rng, 4)
    md0 = tomita(alice, omega)
    md1 = tomita(rotated, u @ omega)
    assert np.allclose(md1.delta, u @ md0.delta @ u.conj().T, atol=1e-9)


def test_susy_conjugation_maps_bosonic_algebra_into_commutant():
    """Hand-built SUSY J sends B(F_a) (x) 1 (x) 1 into its commutant."""
    model = SusyModel.create(2)
    a = annihilation(model.modes, 0)
    basis = generate_algebra([kron(a, I2)], model.dim)
    assert basis.size == model.levels**2
    J = j_susy_operator(model)
    omega = np.zeros(model.dim, dtype=complex)
    omega[[0, 1]] = 1 / math.sqrt(2)
    assert np.allclose(J(omega), omega)
    md = ModularData(J, J, np.eye(model.dim), omega)
    report = verify_modular_properties(md, basis)
    assert report.residuals["J_maps_into_commutant"] <= 1e-10
    assert report.residuals["J_squared_identity"] <= 1e-10
