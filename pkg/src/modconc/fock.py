"""Truncated bosonic Fock spaces and smeared field operators.

A :class:`ModeSystem` is ``modes`` independent oscillators, each truncated to
occupations ``0..n_max``; mode 0 is the leftmost Kronecker factor.  Smeared
operators take the coefficient vector ``c_i = <f_i, f>`` of a test function in
an orthonormal one-particle basis:

    a(c) = sum_i conj(c_i) a_i        (antilinear in c)
    a^dagger(c) = a(c)^dagger

Two real-field conventions are exposed.  The Segal field
``Phi_s(c) = (a(c) + a^dagger(c)) / sqrt(2)`` obeys
``[Phi_s(c), Phi_s(d)] = i Im<c, d>``.  The dephasing field
``phi(c) = a(c) + a^dagger(c) = sqrt(2) Phi_s(c)`` has the Gaussian vacuum
``<0| exp(i phi(c)) |0> = exp(-<c, c> / 2)`` and is what the detector model
couples to.

Truncation breaks the ladder algebra at the top level only, so identities are
checked on the *safe subspace* of states whose occupations stay a margin below
``n_max`` (see :func:`safe_indices`).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionMismatch, IndexOutOfRange
from .linalg import dagger, kron, unitary_from_hermitian


@dataclass(frozen=True)
class FockCutoff:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def levels(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class ModeSystem:
    modes: int
    cutoff: FockCutoff

    def __post_init__(self):
        if int(self.modes) != self.modes or self.modes < 1:
            raise ValueError(f"modes must be a positive integer, got {self.modes}")
        if isinstance(self.cutoff, int):
            object.__setattr__(self, "cutoff", FockCutoff(self.cutoff))

    @classmethod
    def create(cls, modes: int, n_max: int) -> "ModeSystem":
        return cls(modes, FockCutoff(n_max))

    @property
    def n_max(self) -> int:
        return self.cutoff.n_max

    @property
    def dim(self) -> int:
        return self.cutoff.levels**self.modes

    @cached_property
    def occupations(self) -> np.ndarray:
        """Integer array ``(dim, modes)`` of occupation numbers per basis state."""
        grids = np.indices((self.cutoff.levels,) * self.modes).reshape(self.modes, -1)
        return grids.T.copy()

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis_state(self, *occ: int) -> np.ndarray:
        if len(occ) != self.modes or any(n < 0 or n > self.n_max for n in occ):
            raise IndexOutOfRange(f"occupation {occ} outside system {self}")
        idx = int(np.ravel_multi_index(occ, (self.cutoff.levels,) * self.modes))
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v

    def parity(self) -> np.ndarray:
        """Diagonal of ``(-1)**N`` with ``N`` the total occupation."""
        return (-1.0) ** self.occupations.sum(axis=1)


def single_mode_annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def _coefficients(sys: ModeSystem, c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.shape != (sys.modes,):
        raise DimensionMismatch(f"{c.shape[0]} coefficients for {sys.modes} modes")
    return c


def annihilation(sys: ModeSystem, mode: int) -> np.ndarray:
    """``a_mode`` embedded with identities on the other modes."""
    if not 0 <= mode < sys.modes:
        raise IndexOutOfRange(f"mode {mode} not in 0..{sys.modes - 1}")
    eye = np.eye(sys.cutoff.levels, dtype=complex)
    factors = [eye] * sys.modes
    factors[mode] = single_mode_annihilation(sys.n_max)
    return kron(*factors)


def creation(sys: ModeSystem, mode: int) -> np.ndarray:
    return dagger(annihilation(sys, mode))


def number_operator(sys: ModeSystem, mode: int) -> np.ndarray:
    a = annihilation(sys, mode)
    return dagger(a) @ a


def smeared_annihilation(sys: ModeSystem, c) -> np.ndarray:
    c = _coefficients(sys, c)
    out = np.zeros((sys.dim, sys.dim), dtype=complex)
    for i, ci in enumerate(c):
        if ci != 0:
            out += np.conj(ci) * annihilation(sys, i)
    return out


def smeared_creation(sys: ModeSystem, c) -> np.ndarray:
    return dagger(smeared_annihilation(sys, c))


def segal_field(sys: ModeSystem, c) -> np.ndarray:
    a = smeared_annihilation(sys, c)
    return (a + dagger(a)) / np.sqrt(2.0)


def dephasing_field(sys: ModeSystem, c) -> np.ndarray:
    a = smeared_annihilation(sys, c)
    return a + dagger(a)


def weyl(sys: ModeSystem, c, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Weyl operator ``W(c) = exp(i Phi_s(c))``."""
    return unitary_from_hermitian(segal_field(sys, c), 1.0, tol)


def dephasing_weyl(sys: ModeSystem, c, s: float = 1.0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(i s phi(c))`` for the dephasing field."""
    return unitary_from_hermitian(dephasing_field(sys, c), s, tol)


def vacuum_expectation(sys: ModeSystem, u) -> complex:
    u = np.asarray(u)
    if u.shape != (sys.dim, sys.dim):
        raise DimensionMismatch(f"operator of shape {u.shape} on a space of dim {sys.dim}")
    return complex(u[0, 0])


def inner(c, d) -> complex:
    """One-particle inner product ``<c, d> = sum conj(c_i) d_i``."""
    return complex(np.vdot(np.atleast_1d(c), np.atleast_1d(d)))


def safe_indices(sys: ModeSystem, margin: int = 2) -> np.ndarray:
    """Basis indices whose occupations are all ``<= n_max - margin``."""
    ok = np.all(sys.occupations <= sys.n_max - margin, axis=1)
    return np.flatnonzero(ok)


def restrict(op, indices) -> np.ndarray:
    """Columns of ``op`` on the given basis states (full rows kept).

    Keeping all rows means leakage out of the subspace counts as error.
    """
    return np.asarray(op)[:, indices]


def top_level_probability(sys: ModeSystem, psi) -> float:
    """Weight of ``psi`` on states where some mode sits at ``n_max``.

    ``psi`` may carry extra leading factors (the field must be the last,
    fastest-varying factor).
    """
    psi = np.asarray(psi).reshape(-1, sys.dim)
    top = np.any(sys.occupations == sys.n_max, axis=1)
    return float(np.sum(np.abs(psi[:, top]) ** 2))


def weyl_relation_residual(n_max: int, c, d, tol: Tolerances = DEFAULT_TOL) -> float:
    """``||W(c) W(d) - exp(-i Im<c,d> / 2) W(c + d)||`` on occupations ``<= n_max // 2``.

    The system has one mode per coefficient.  The residual is pure
    truncation error and shrinks as ``n_max`` grows.
    """
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    d = np.atleast_1d(np.asarray(d, dtype=complex))
    sys = ModeSystem.create(c.shape[0], n_max)
    lhs = weyl(sys, c, tol) @ weyl(sys, d, tol)
    rhs = np.exp(-0.5j * inner(c, d).imag) * weyl(sys, c + d, tol)
    cols = safe_indices(sys, n_max - n_max // 2)
    return float(np.linalg.norm(restrict(lhs - rhs, cols), 2))
