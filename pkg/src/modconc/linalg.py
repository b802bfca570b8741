"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Antilinear maps
get their own small value type, :class:`AntilinearOperator`, storing a single
matrix ``M`` with the convention ``v -> M @ conj(v)`` in the fixed
computational basis.  With that convention

* composing two antilinear maps gives the *linear* map ``M1 @ conj(M2)``,
* the adjoint (``<x, S y> = <y, S^dagger x>``) has matrix ``M.T``,
* ``S^dagger S`` is the positive matrix ``M.T @ conj(M)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionMismatch, NotHermitian, NotPSD, Singular

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {m.shape}")
    return m


def as_square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def kron(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor outermost.

    ``kron(A, B)[i*rB + k, j*cB + l] == A[i, j] * B[k, l]``.
    """
    if not mats:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(m) for m in mats))


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


def op_norm(a) -> float:
    """Spectral norm (largest singular value); 0 for empty arrays."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermiticity_error(h) -> float:
    h = np.asarray(h)
    return op_norm(h - dagger(h))


def _check_hermitian(h, tol: Tolerances) -> np.ndarray:
    h = as_square(h)
    err = hermiticity_error(h)
    if err > tol.herm:
        raise NotHermitian(f"||H - H^dagger|| = {err:.3e} exceeds {tol.herm:.1e}")
    return 0.5 * (h + dagger(h))


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Hermitian matrix.

    ``eigenvalues`` are real and sorted in descending order; column ``k`` of
    ``eigenvectors`` belongs to ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def apply_function(self, func) -> np.ndarray:
        """Return ``V diag(func(lambda)) V^dagger``."""
        v = self.eigenvectors
        return (v * func(self.eigenvalues)) @ dagger(v)


def hermitian_eig(h, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Raises
    ------
    NotHermitian
        If ``||H - H^dagger||`` exceeds ``tol.herm``.
    """
    h = _check_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    order = np.argsort(w, kind="stable")[::-1]
    return Spectrum(w[order].copy(), v[:, order].copy())


def psd_sqrt(p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol.psd, 0)`` are treated as roundoff and clamped to 0.
    """
    spec = hermitian_eig(p, tol)
    lam = spec.eigenvalues
    if lam.size and lam.min() < -tol.psd:
        raise NotPSD(f"smallest eigenvalue {lam.min():.3e} below -{tol.psd:.1e}")
    return spec.apply_function(lambda x: np.sqrt(np.clip(x, 0.0, None)))


def hermitian_power(p, power: complex, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``P**power`` for a positive definite ``P`` (principal branch).

    Used for modular flows ``Delta**(1j*t)`` and for ``Delta**(-1/2)``.
    """
    spec = hermitian_eig(p, tol)
    lam = spec.eigenvalues
    if lam.size and lam.min() <= 0:
        raise Singular(f"matrix power needs positive eigenvalues, min is {lam.min():.3e}")
    return spec.apply_function(lambda x: np.power(x.astype(complex), power))


def unitary_from_hermitian(h, s: float = 1.0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(i s H)`` for Hermitian ``H``, built from its eigen-decomposition."""
    spec = hermitian_eig(h, tol)
    return spec.apply_function(lambda x: np.exp(1j * s * x))


@dataclass(frozen=True, eq=False)
class AntilinearOperator:
    """Antilinear map ``v -> matrix @ conj(v)``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.dim:
            raise DimensionMismatch(f"vector of length {v.shape[0]} for operator of dim {self.dim}")
        return self.matrix @ np.conj(v)

    __call__ = apply

    def squared(self) -> np.ndarray:
        """The linear map ``S o S``."""
        return self.matrix @ np.conj(self.matrix)

    def then(self, other: "AntilinearOperator") -> np.ndarray:
        """Linear map ``other o self``."""
        return other.matrix @ np.conj(self.matrix)

    def after_linear(self, a) -> "AntilinearOperator":
        """Antilinear map ``self o A``."""
        return AntilinearOperator(self.matrix @ np.conj(as_square(a)))

    def conjugate(self, a) -> np.ndarray:
        """Linear map ``S A S`` (e.g. ``J A J``)."""
        return self.matrix @ np.conj(as_square(a)) @ np.conj(self.matrix)

    def expectation(self, psi) -> complex:
        """``<psi, S psi>``."""
        psi = np.asarray(psi, dtype=complex)
        return complex(np.vdot(psi, self.apply(psi)))

    def allclose(self, other: "AntilinearOperator", atol: float = 1e-10) -> bool:
        return self.matrix.shape == other.matrix.shape and np.allclose(self.matrix, other.matrix, atol=atol, rtol=0)


def complex_conjugation(dim: int) -> AntilinearOperator:
    return AntilinearOperator(np.eye(dim, dtype=complex))


def antilinear_adjoint(s: AntilinearOperator) -> AntilinearOperator:
    """Adjoint of an antilinear map: ``<x, S y> == <y, S^dagger x>``."""
    return AntilinearOperator(s.matrix.T.copy())


def antilinear_polar(s: AntilinearOperator, tol: Tolerances = DEFAULT_TOL):
    """Polar decomposition ``S = J o Delta**(1/2)`` of an invertible antilinear map.

    Returns
    -------
    J : AntilinearOperator
        Antiunitary part, matrix ``M @ conj(Delta**(-1/2))``.
    Delta : ndarray
        ``S^dagger S = M.T @ conj(M)``, Hermitian positive definite.

    Notes
    -----
    Both factors are read off the SVD ``M = U diag(s) W^dagger``:
    ``Delta = conj(W) diag(s**2) W.T`` and ``J = U W^dagger``, which keeps ``J``
    unitary to machine precision even for moderately conditioned ``M``.
    """
    m = s.matrix
    u, sv, wh = np.linalg.svd(m)
    if sv[-1] == 0 or sv[0] / sv[-1] > tol.cond:
        cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
        raise Singular(f"condition number {cond:.3e} exceeds {tol.cond:.1e}")
    w = dagger(wh)
    delta = (np.conj(w) * sv**2) @ w.T
    delta = 0.5 * (delta + dagger(delta))
    return AntilinearOperator(u @ wh), delta
