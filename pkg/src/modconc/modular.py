"""Finite-dimensional Tomita-Takesaki engine.

Algebras are stored as Hilbert-Schmidt orthonormal spanning sets
(:class:`AlgebraBasis`).  For a cyclic and separating unit vector ``Omega``
the map ``A Omega -> A^dagger Omega`` is a well-defined antilinear operator
``S`` on the whole space.  Its polar decomposition ``S = J Delta**(1/2)``
gives the modular conjugation ``J`` and the modular operator ``Delta``.

In finite dimensions ``Omega`` can only be cyclic and separating when the
algebra has the same dimension as the Hilbert space, so algebras in standard
form look like ``U (sum_i M_{n_i} (x) 1_{n_i}) U^dagger`` on ``sum_i n_i**2``
dimensions.  :func:`random_standard_instance` produces such pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import IllConditioned, ModconcError, NotCyclic, NotNormalized, NotSeparating
from .linalg import (
    AntilinearOperator,
    antilinear_polar,
    as_square,
    dagger,
    hermitian_power,
    op_norm,
)

RANK_TOL = 1e-8
NULL_TOL = 1e-9
MAX_CLOSURE_ROUNDS = 8
FLOW_TIMES = (0.3, 1.0, 2.7)


def _orthonormal_columns(vectors: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal basis for the column span of ``vectors``."""
    if vectors.shape[1] == 0:
        return vectors.copy()
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, s > rank_tol]


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """Hilbert-Schmidt orthonormal spanning set of an operator algebra.

    ``elements`` has shape ``(k, dim, dim)``.  Instances built directly with
    :meth:`from_span` are *not* closed; use :func:`generate_algebra` for that.
    """

    dim: int
    elements: np.ndarray
    contains_identity: bool = field(init=False)

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex).reshape(-1, self.dim, self.dim)
        object.__setattr__(self, "elements", el)
        eye = np.eye(self.dim) / np.sqrt(self.dim)
        object.__setattr__(self, "contains_identity", self.residual(eye) <= 1e-10)

    @classmethod
    def from_span(cls, mats, rank_tol: float = RANK_TOL) -> "AlgebraBasis":
        mats = [as_square(m) for m in mats]
        if not mats:
            raise ValueError("need at least one matrix")
        n = mats[0].shape[0]
        vecs = np.stack([m.reshape(-1) for m in mats], axis=1)
        norms = np.linalg.norm(vecs, axis=0)
        vecs = vecs[:, norms > 0] / norms[norms > 0]
        q = _orthonormal_columns(vecs, rank_tol)
        return cls(n, q.T.reshape(-1, n, n))

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        """Orthonormal columns ``(dim**2, size)``."""
        return self.elements.reshape(self.size, -1).T

    def project(self, x) -> np.ndarray:
        q = self.vectors
        v = np.asarray(x, dtype=complex).reshape(-1)
        return (q @ (dagger(q) @ v)).reshape(self.dim, self.dim)

    def residual(self, x) -> float:
        """Hilbert-Schmidt distance from ``x`` to the span."""
        x = np.asarray(x, dtype=complex)
        if self.size == 0:
            return float(np.linalg.norm(x))
        return float(np.linalg.norm(x - self.project(x)))

    def relative_residual(self, x) -> float:
        nrm = float(np.linalg.norm(x))
        return 0.0 if nrm == 0 else self.residual(x) / nrm

    def closure_residual(self) -> float:
        """Largest relative residual of pairwise products and adjoints."""
        el = self.elements
        prods = np.einsum("aij,bjk->abik", el, el).reshape(-1, self.dim, self.dim)
        cands = np.concatenate([prods, np.conj(np.transpose(el, (0, 2, 1)))])
        return max(self.relative_residual(c) for c in cands)


def generate_algebra(generators, dim: int | None = None, rank_tol: float = RANK_TOL,
                     max_rounds: int = MAX_CLOSURE_ROUNDS) -> AlgebraBasis:
    """Unital *-algebra generated by ``generators``.

    Starts from ``{1, g, g^dagger}`` and replaces the span by the span of all
    pairwise products until the dimension stops growing.  Each round doubles
    the admissible word length, so ``max_rounds`` rounds reach words of length
    ``2**max_rounds``.
    """
    gens = [as_square(g) for g in generators]
    if dim is None:
        if not gens:
            raise ValueError("dim is required when no generators are given")
        dim = gens[0].shape[0]
    for g in gens:
        if g.shape != (dim, dim):
            raise ValueError(f"generator of shape {g.shape}, expected {(dim, dim)}")
    seed = [np.eye(dim, dtype=complex)] + gens + [dagger(g) for g in gens]
    basis = AlgebraBasis.from_span(seed, rank_tol)
    for _ in range(max_rounds):
        el = basis.elements
        prods = np.einsum("aij,bjk->abik", el, el).reshape(-1, dim * dim).T
        q = basis.vectors
        resid = prods - q @ (dagger(q) @ prods)
        extra = _orthonormal_columns(resid, rank_tol)
        if extra.shape[1] == 0:
            return basis
        q = _orthonormal_columns(np.concatenate([q, extra], axis=1), rank_tol)
        basis = AlgebraBasis(dim, q.T.reshape(-1, dim, dim))
    raise ModconcError(f"algebra closure did not stabilise in {max_rounds} rounds")


def commutant(basis: AlgebraBasis, null_tol: float = NULL_TOL) -> AlgebraBasis:
    """All ``X`` with ``[X, A] = [X, A^dagger] = 0`` for every basis element.

    Including the adjoints makes the result the commutant of the *-algebra
    spanned by the input, which is always itself a von Neumann algebra.
    The null space is narrowed one constraint at a time, so the work shrinks
    as soon as the first few elements have been imposed.
    """
    n = basis.dim
    constraints = list(basis.elements) + [dagger(a) for a in basis.elements]
    null = np.eye(n * n, dtype=complex)
    for a in constraints:
        xs = null.T.reshape(-1, n, n)
        comm = (xs @ a - a @ xs).reshape(xs.shape[0], -1).T
        if not np.any(np.abs(comm) > null_tol):
            continue
        _, s, vh = np.linalg.svd(comm, full_matrices=True)
        s_full = np.zeros(vh.shape[0])
        s_full[: s.size] = s
        keep = s_full <= null_tol
        null = null @ dagger(vh)[:, keep]
        if null.shape[1] == 0:
            break
    return AlgebraBasis(n, null.T.reshape(-1, n, n))


def same_span(a: AlgebraBasis, b: AlgebraBasis, tol: float = 1e-10) -> bool:
    if a.dim != b.dim or a.size != b.size:
        return False
    ra = max((b.residual(x) for x in a.elements), default=0.0)
    rb = max((a.residual(x) for x in b.elements), default=0.0)
    return max(ra, rb) <= tol


def bicommutant_check(basis: AlgebraBasis, tol: float = 1e-10) -> bool:
    """True iff ``basis'' `` spans the same space as ``basis``."""
    return same_span(commutant(commutant(basis)), basis, tol)


def _orbit(basis: AlgebraBasis, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=complex)
    return (basis.elements @ omega).T


def _singular_values(basis: AlgebraBasis, omega) -> np.ndarray:
    return np.linalg.svd(_orbit(basis, omega), compute_uv=False)


def _rank(s: np.ndarray, rank_tol: float) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def is_cyclic(basis: AlgebraBasis, omega, rank_tol: float = 1e-10) -> bool:
    """``{A Omega}`` spans the whole space."""
    return _rank(_singular_values(basis, omega), rank_tol) == basis.dim


def is_separating(basis: AlgebraBasis, omega, rank_tol: float = 1e-10) -> bool:
    """``A -> A Omega`` is injective on the span."""
    return _rank(_singular_values(basis, omega), rank_tol) == basis.size


@dataclass(frozen=True, eq=False)
class ModularData:
    S: AntilinearOperator
    J: AntilinearOperator
    delta: np.ndarray
    omega: np.ndarray

    def delta_power(self, p: complex) -> np.ndarray:
        return hermitian_power(self.delta, p)


def tomita(basis: AlgebraBasis, omega, tol: Tolerances = DEFAULT_TOL) -> ModularData:
    """Modular data ``(S, J, Delta)`` for an algebra and a cyclic separating vector.

    Raises
    ------
    NotNormalized, NotCyclic, NotSeparating
        Precondition violations.
    IllConditioned
        If the Gram matrix of ``{A_k Omega}`` has condition number above
        ``tol.cond``.
    """
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (basis.dim,):
        raise ValueError(f"vector of shape {omega.shape} for dim {basis.dim}")
    if abs(np.linalg.norm(omega) - 1.0) > 1e-10:
        raise NotNormalized(f"||Omega|| = {np.linalg.norm(omega):.12f}")
    if not is_cyclic(basis, omega):
        raise NotCyclic("{A Omega} does not span the Hilbert space")
    if not is_separating(basis, omega):
        raise NotSeparating("some nonzero algebra element annihilates Omega")

    w = _orbit(basis, omega)
    w_adj = (np.conj(np.transpose(basis.elements, (0, 2, 1))) @ omega).T
    s = np.linalg.svd(w, compute_uv=False)
    gram_cond = (s[0] / s[-1]) ** 2
    if gram_cond > tol.cond:
        raise IllConditioned(f"Gram condition number {gram_cond:.3e} exceeds {tol.cond:.1e}")
    # M conj(W) = W_adj  <=>  conj(W).T M.T = W_adj.T
    mt, *_ = np.linalg.lstsq(np.conj(w).T, w_adj.T, rcond=None)
    S = AntilinearOperator(mt.T)
    J, delta = antilinear_polar(S, tol)
    return ModularData(S, J, delta, omega)


@dataclass
class ModularReport:
    """Per-property residuals of a modular-data check."""

    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.residuals.items() if not r <= self.tol]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def verify_modular_properties(md: ModularData, basis: AlgebraBasis, tol: float = 1e-9,
                              times=FLOW_TIMES) -> ModularReport:
    """Check the modular relations and report the worst residual of each.

    Residuals involving ``Delta`` are relative to the size of the target so
    they stay meaningful when ``Delta`` has a wide spectrum.
    """
    J, delta, omega = md.J, md.delta, md.omega
    n = basis.dim
    eye = np.eye(n)
    res: dict[str, float] = {}
    res["J_squared_identity"] = op_norm(J.squared() - eye)
    res["J_self_adjoint"] = op_norm(J.matrix.T - J.matrix)
    res["J_fixes_omega"] = float(np.linalg.norm(J.apply(omega) - omega))
    res["Delta_fixes_omega"] = float(np.linalg.norm(delta @ omega - omega))

    spec_ok = True
    try:
        half = hermitian_power(delta, 0.5)
        minus_half = hermitian_power(delta, -0.5)
    except ModconcError:
        spec_ok = False
    if spec_ok:
        lhs = J.conjugate(half)
        res["J_Delta_half_J"] = op_norm(lhs - minus_half) / max(1.0, op_norm(minus_half))
        recon = J.after_linear(half)
        res["S_polar_reconstruction"] = op_norm(recon.matrix - md.S.matrix) / max(1.0, op_norm(md.S.matrix))
    else:
        res["J_Delta_half_J"] = np.inf
        res["S_polar_reconstruction"] = np.inf

    s_err = 0.0
    for a in basis.elements:
        s_err = max(s_err, float(np.linalg.norm(md.S.apply(a @ omega) - dagger(a) @ omega)))
    res["S_action"] = s_err

    comm_err = 0.0
    for a in basis.elements:
        b = J.conjugate(a)
        for c in basis.elements:
            comm_err = max(comm_err, op_norm(b @ c - c @ b))
    res["J_maps_into_commutant"] = comm_err

    flow_err = 0.0
    if spec_ok:
        for t in times:
            u = hermitian_power(delta, 1j * t)
            for a in basis.elements:
                flow_err = max(flow_err, basis.relative_residual(u @ a @ dagger(u)))
    else:
        flow_err = np.inf
    res["modular_flow_invariance"] = flow_err
    return ModularReport(res, tol)


def reduced_density_delta(omega, dims: tuple[int, int]) -> np.ndarray:
    """``rho_A (x) rho_B**(-1)`` for ``Omega`` on ``C^dA (x) C^dB``.

    Independent closed form for the modular operator of ``B(C^dA) (x) 1`` when
    ``Omega`` has a real Schmidt form in the product basis.
    """
    psi = np.asarray(omega, dtype=complex).reshape(dims)
    rho_a = psi @ dagger(psi)
    rho_b = (dagger(psi) @ psi).T
    return np.kron(rho_a, np.linalg.inv(rho_b))


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def block_factor_elements(rng: np.random.Generator, blocks, count: int = 2) -> list[np.ndarray]:
    """Random elements of ``sum_i M_{n_i} (x) 1_{n_i}`` (unconjugated)."""
    dim = sum(b * b for b in blocks)
    out = []
    for _ in range(count):
        m = np.zeros((dim, dim), dtype=complex)
        off = 0
        for b in blocks:
            x = rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
            m[off:off + b * b, off:off + b * b] = np.kron(x, np.eye(b))
            off += b * b
        out.append(m)
    return out


def random_standard_instance(rng: np.random.Generator, blocks, tol: Tolerances = DEFAULT_TOL,
                             max_tries: int = 20):
    """Random ``(algebra, Omega)`` in standard form with the given block sizes.

    The algebra is ``U (sum_i M_{n_i} (x) 1_{n_i}) U^dagger`` with Haar ``U``
    and is regenerated from random generators through :func:`generate_algebra`.
    ``Omega`` is a random unit vector; draws whose Gram matrix would be
    ill-conditioned are rejected.
    """
    dim = sum(b * b for b in blocks)
    u = haar_unitary(rng, dim)
    gens = [u @ g @ dagger(u) for g in block_factor_elements(rng, blocks)]
    basis = generate_algebra(gens, dim)
    for _ in range(max_tries):
        omega = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        omega /= np.linalg.norm(omega)
        s = _singular_values(basis, omega)
        if (s[0] / s[-1]) ** 2 < min(tol.cond, 1e6):
            return basis, omega
    raise ModconcError("could not draw a well-conditioned cyclic separating vector")


def schmidt_vector(p: float) -> np.ndarray:
    """``sqrt(p)|00> + sqrt(1-p)|11>``."""
    return np.array([np.sqrt(p), 0, 0, np.sqrt(1 - p)], dtype=complex)


__all__ = [
    "AlgebraBasis",
    "ModularData",
    "ModularReport",
    "bicommutant_check",
    "commutant",
    "generate_algebra",
    "is_cyclic",
    "is_separating",
    "random_standard_instance",
    "same_span",
    "tomita",
    "verify_modular_properties",
]
