"""Supersymmetric Landau-level toy model on ``F_a (x) F_b (x) C^2``.

The two bosonic modes ``a`` and ``b`` stand for the two orientations of the
transverse magnetic field; the spinor carries the magnetic-moment degree of
freedom.  Only the ladder algebra matters here, so no magnetic-field dynamics
are simulated.  Supercharges::

    Q_a = a (x) 1 (x) sigma_-        Q_a^dagger = a^dagger (x) 1 (x) sigma_+
    Q_b = 1 (x) b (x) sigma_+        Q_b^dagger = 1 (x) b^dagger (x) sigma_-

with ``H_a = hw {Q_a, Q_a^dagger}`` and ``H_b = hw {Q_b, Q_b^dagger}``.  The
conjugation ``J[|n,m> (x) (x, y)] = |m,n> (x) (y*, x*)`` maps the ``a``
operators onto the ``b`` operators, and ``|<Phi|J|Phi>|`` of an entangled
supermultiplet state equals its concurrence ``2|alpha beta|``.

Basis index of ``|n, m> (x) e_s`` is ``(n * L + m) * 2 + s`` with
``L = n_max + 1`` and ``s = 0`` for spin up.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entanglement import modular_concurrence
from .errors import DimensionMismatch, InvalidQuantumNumbers
from .fock import FockCutoff, ModeSystem, annihilation
from .linalg import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    AntilinearOperator,
    anticommutator,
    dagger,
    kron,
    op_norm,
    unitary_from_hermitian,
)
from .modular import generate_algebra


@dataclass(frozen=True)
class SusyModel:
    cutoff: FockCutoff
    hbar_omega: float = 1.0

    def __post_init__(self):
        if isinstance(self.cutoff, int):
            object.__setattr__(self, "cutoff", FockCutoff(self.cutoff))
        if not self.hbar_omega > 0:
            raise ValueError("hbar_omega must be positive")

    @classmethod
    def create(cls, n_max: int, hbar_omega: float = 1.0) -> "SusyModel":
        return cls(FockCutoff(n_max), hbar_omega)

    @property
    def n_max(self) -> int:
        return self.cutoff.n_max

    @property
    def levels(self) -> int:
        return self.cutoff.levels

    @property
    def modes(self) -> ModeSystem:
        return ModeSystem(2, self.cutoff)

    @property
    def dim(self) -> int:
        return 2 * self.levels**2

    def index(self, n: int, m: int, spin: int) -> int:
        return (n * self.levels + m) * 2 + spin

    def basis_state(self, n: int, m: int, spin: int) -> np.ndarray:
        if not (0 <= n <= self.n_max and 0 <= m <= self.n_max and spin in (0, 1)):
            raise InvalidQuantumNumbers(f"|{n},{m}> spin {spin} outside the truncated space")
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n, m, spin)] = 1.0
        return v

    def safe_indices(self, margin: int = 1) -> np.ndarray:
        """Basis states with both occupations ``<= n_max - margin``."""
        top = self.n_max - margin
        return np.array([self.index(n, m, s) for n in range(top + 1)
                         for m in range(top + 1) for s in (0, 1)])


@dataclass(frozen=True, eq=False)
class SuperchargeSet:
    Q_a: np.ndarray
    Q_a_dag: np.ndarray
    Q_b: np.ndarray
    Q_b_dag: np.ndarray


def build_supercharges(model: SusyModel) -> SuperchargeSet:
    modes = model.modes
    a = annihilation(modes, 0)
    b = annihilation(modes, 1)
    q_a = kron(a, SIGMA_MINUS)
    q_b = kron(b, SIGMA_PLUS)
    return SuperchargeSet(q_a, dagger(q_a), q_b, dagger(q_b))


def hamiltonian(model: SusyModel, which: str = "a") -> np.ndarray:
    q = build_supercharges(model)
    if which == "a":
        h = anticommutator(q.Q_a, q.Q_a_dag)
    elif which == "b":
        h = anticommutator(q.Q_b, q.Q_b_dag)
    else:
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")
    return model.hbar_omega * h


def j_susy_operator(model: SusyModel) -> AntilinearOperator:
    levels = model.levels
    swap = np.zeros((levels**2, levels**2), dtype=complex)
    for n in range(levels):
        for m in range(levels):
            swap[m * levels + n, n * levels + m] = 1.0
    return AntilinearOperator(kron(swap, SIGMA_X))


def j_susy_apply(model: SusyModel, v) -> np.ndarray:
    """Mode swap, spinor flip and complex conjugation, applied directly."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (model.dim,):
        raise DimensionMismatch(f"vector of shape {v.shape} for dim {model.dim}")
    t = np.conj(v).reshape(model.levels, model.levels, 2)
    return t.transpose(1, 0, 2)[:, :, ::-1].reshape(-1).copy()


def _restricted_diff(x: np.ndarray, y: np.ndarray, cols: np.ndarray) -> float:
    return op_norm((x - y)[:, cols])


def verify_intertwining(model: SusyModel) -> dict[str, float]:
    """Residuals of ``J X_a J = X_b`` on the truncation-safe subspace.

    Also reports ``||J Q_a J - Q_a||`` as a negative control (it should be
    of order one, not small).
    """
    q = build_supercharges(model)
    J = j_susy_operator(model)
    cols = model.safe_indices(1)
    ha, hb = hamiltonian(model, "a"), hamiltonian(model, "b")
    return {
        "JQaJ=Qb": _restricted_diff(J.conjugate(q.Q_a), q.Q_b, cols),
        "JQa_dagJ=Qb_dag": _restricted_diff(J.conjugate(q.Q_a_dag), q.Q_b_dag, cols),
        "JHaJ=Hb": _restricted_diff(J.conjugate(ha), hb, cols),
        "JQbJ=Qa": _restricted_diff(J.conjugate(q.Q_b), q.Q_a, cols),
        "control:JQaJ-Qa": _restricted_diff(J.conjugate(q.Q_a), q.Q_a, cols),
    }


def weyl_element_residual(model: SusyModel, kappa: complex) -> float:
    """Distance of ``J exp(i(k Q_a + k* Q_a^dagger)) J`` from the ``b`` algebra.

    Relative Hilbert-Schmidt residual after projecting onto the unital
    *-algebra generated by ``Q_b``.
    """
    q = build_supercharges(model)
    gen = kappa * q.Q_a + np.conj(kappa) * q.Q_a_dag
    w = unitary_from_hermitian(gen, 1.0)
    mapped = j_susy_operator(model).conjugate(w)
    alg_b = generate_algebra([q.Q_b], model.dim)
    return alg_b.relative_residual(mapped)


def supermultiplet_state(model: SusyModel, k: int, l: int, alpha: complex, beta: complex) -> np.ndarray:
    """``alpha |k, l-1> (x) up + beta |l-1, k> (x) down``."""
    top = model.n_max - 1
    if not (isinstance(k, (int, np.integer)) and isinstance(l, (int, np.integer))):
        raise InvalidQuantumNumbers("k and l must be integers")
    if k < 0 or l < 1 or k > top or l > top:
        raise InvalidQuantumNumbers(f"need 0 <= k <= {top} and 1 <= l <= {top}, got k={k}, l={l}")
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
        raise InvalidQuantumNumbers("|alpha|^2 + |beta|^2 must equal 1")
    v = alpha * model.basis_state(k, l - 1, 0) + beta * model.basis_state(l - 1, k, 1)
    return v


def susy_concurrence(model: SusyModel, state) -> float:
    return modular_concurrence(state, j_susy_operator(model))


def energy(model: SusyModel, state, which: str = "a") -> float:
    """``<state|H|state>`` in the same units as ``hbar_omega``."""
    state = np.asarray(state, dtype=complex)
    return float(np.vdot(state, hamiltonian(model, which) @ state).real)


__all__ = [
    "SusyModel",
    "SuperchargeSet",
    "build_supercharges",
    "energy",
    "hamiltonian",
    "j_susy_apply",
    "j_susy_operator",
    "supermultiplet_state",
    "susy_concurrence",
    "verify_intertwining",
    "weyl_element_residual",
]
