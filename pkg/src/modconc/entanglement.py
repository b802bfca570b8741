"""Concurrence and Bell-CHSH tools for two qubits.

Basis order is ``|00>, |01>, |10>, |11>`` with qubit A as the left factor.
Concurrence comes in three forms:

* :func:`concurrence_pure`, the spin-flip overlap ``|<psi~|psi>|``;
* :func:`wootters_concurrence` for density matrices;
* :func:`modular_concurrence`, ``|<psi, J psi>|`` for any antilinear ``J`` and
  any dimension.

The last one agrees with the first two on Schmidt-aligned states
``a|00> + b|11>`` when ``J`` is the detector-pair conjugation; on general
states it is a different number, so callers should not assume equality.

Dichotomic observables live in the z-x plane, ``A(t) = cos t Z + sin t X``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionMismatch, InvalidDensity, NotNormalized
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, AntilinearOperator, dagger, hermitian_eig, kron

YY = kron(SIGMA_Y, SIGMA_Y)
NORM_TOL = 1e-12
TSIRELSON = 2.0 * math.sqrt(2.0)


def _state(psi, dim: int | None = 4) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if dim is not None and psi.shape != (dim,):
        raise DimensionMismatch(f"expected a {dim}-vector, got shape {psi.shape}")
    return psi


def _check_normalized(psi: np.ndarray, tol: float = NORM_TOL) -> None:
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise NotNormalized(f"||psi|| = {nrm:.15f}")


def _clamp(c: float) -> float:
    return float(min(max(c, 0.0), 1.0))


def spin_flip_pure(psi) -> np.ndarray:
    """``(sigma_y (x) sigma_y) conj(psi)``."""
    return YY @ np.conj(_state(psi))


def concurrence_pure(psi) -> float:
    psi = _state(psi)
    _check_normalized(psi)
    return _clamp(abs(np.vdot(spin_flip_pure(psi), psi)))


def density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, np.conj(psi))


def validate_density(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidDensity(f"expected a 4x4 matrix, got {rho.shape}")
    if np.linalg.norm(rho - dagger(rho), 2) > tol.herm:
        raise InvalidDensity("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise InvalidDensity(f"trace is {np.trace(rho).real:.12f}, expected 1")
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if lam.min() < -tol.psd:
        raise InvalidDensity(f"negative eigenvalue {lam.min():.3e}")
    return 0.5 * (rho + dagger(rho))


def spin_flip_density(rho) -> np.ndarray:
    return YY @ np.conj(rho) @ YY


def wootters_concurrence(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    """Mixed-state concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are square roots of the eigenvalues (descending) of
    ``R = sqrt(rho) rho~ sqrt(rho)``.  With ``rho = V D**2 V^dagger`` one has
    ``R = X X^dagger`` for ``X = sqrt(rho) YY conj(sqrt(rho))``, so the
    ``l_i`` are the singular values of the unitarily equivalent
    ``D V^dagger YY conj(V) D``.  Taking them from an SVD avoids the square
    root of near-zero eigenvalues, which would turn rounding at 1e-16 into
    errors near 1e-8 on pure states.
    """
    rho = validate_density(rho, tol)
    spec = hermitian_eig(rho, tol)
    if spec.eigenvalues.min() < -tol.psd:
        raise InvalidDensity(f"negative eigenvalue {spec.eigenvalues.min():.3e}")
    f = spec.eigenvectors * np.sqrt(np.clip(spec.eigenvalues, 0.0, None))[None, :]
    s = np.linalg.svd(dagger(f) @ YY @ np.conj(f), compute_uv=False)
    return _clamp(s[0] - s[1] - s[2] - s[3])


def x_state_concurrence(rho) -> float:
    """Closed form for X-shaped two-qubit densities.

    ``2 max(0, |r03| - sqrt(r11 r22), |r12| - sqrt(r00 r33))``; used as an
    independent check on :func:`wootters_concurrence`.
    """
    rho = np.asarray(rho)
    d = np.real(np.diag(rho))
    a = abs(rho[0, 3]) - math.sqrt(max(d[1] * d[2], 0.0))
    b = abs(rho[1, 2]) - math.sqrt(max(d[0] * d[3], 0.0))
    return _clamp(2.0 * max(0.0, a, b))


def modular_concurrence(psi, J: AntilinearOperator) -> float:
    """``|<psi, J psi>|`` for a unit vector of any dimension."""
    psi = _state(psi, None)
    if psi.shape[0] != J.dim:
        raise DimensionMismatch(f"state of length {psi.shape[0]} for J of dim {J.dim}")
    _check_normalized(psi, 1e-10)
    return _clamp(abs(J.expectation(psi)))


def j_ab_operator() -> AntilinearOperator:
    """Detector-pair conjugation ``(a,b)(x)(c,d) -> (d*, c*)(x)(b*, a*)``."""
    m = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            m[2 * (1 - b) + (1 - a), 2 * a + b] = 1.0
    return AntilinearOperator(m)


@dataclass(frozen=True)
class BellSettings:
    alpha: float
    beta: float
    alpha_p: float
    beta_p: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.alpha_p, self.beta_p)

    def wrapped(self) -> "BellSettings":
        return BellSettings(*(float(np.mod(x, 2 * np.pi)) for x in self.as_tuple()))


OPTIMAL_BELL_SETTINGS = BellSettings(0.0, np.pi / 4, np.pi / 2, -np.pi / 4)


def dichotomic(theta: float) -> np.ndarray:
    return np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X


def chsh_operator(settings: BellSettings) -> np.ndarray:
    a, b, ap, bp = settings.as_tuple()
    A, B, Ap, Bp = dichotomic(a), dichotomic(b), dichotomic(ap), dichotomic(bp)
    return kron(A, B) + kron(A, Bp) + kron(Ap, B) - kron(Ap, Bp)


def _as_density(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1 or (state.ndim == 2 and 1 in state.shape):
        psi = _state(state)
        _check_normalized(psi, 1e-10)
        return density(psi)
    return validate_density(state)


def chsh_expectation(state, settings: BellSettings) -> float:
    """``<B>`` for a pure state vector or a density matrix."""
    rho = _as_density(state)
    val = np.trace(rho @ chsh_operator(settings))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"CHSH expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def max_violation_from_concurrence(c: float) -> float:
    """Largest CHSH value reachable at concurrence ``c``: ``2 sqrt(1 + c**2)``."""
    if not -1e-12 <= c <= 1 + 1e-12:
        raise ValueError(f"concurrence {c} outside [0, 1]")
    return 2.0 * math.sqrt(1.0 + min(max(c, 0.0), 1.0) ** 2)


def zx_correlations(state) -> np.ndarray:
    """``T[a, b] = <sigma_a (x) sigma_b>`` for ``a, b`` in ``(z, x)``."""
    rho = _as_density(state)
    paulis = (SIGMA_Z, SIGMA_X)
    return np.array([[np.trace(rho @ kron(p, q)).real for q in paulis] for p in paulis])


def chsh_objective(state):
    """Vectorised ``(alpha, beta, alpha', beta') -> <B>`` for a fixed state."""
    t = zx_correlations(state)

    def objective(a, b, ap, bp):
        def e(x, y):
            return (t[0, 0] * np.cos(x) * np.cos(y) + t[0, 1] * np.cos(x) * np.sin(y)
                    + t[1, 0] * np.sin(x) * np.cos(y) + t[1, 1] * np.sin(x) * np.sin(y))
        return e(a, b) + e(a, bp) + e(ap, b) - e(ap, bp)

    return objective


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def maximize_chsh(state, coarse_grid_steps: int = 24, refine_iters: int = 200):
    """Maximise the CHSH value over z-x plane settings.

    ``state`` is a state vector, a density matrix, or a vectorised callable
    ``f(alpha, beta, alpha', beta')``.  A full ``steps**4`` grid on
    ``[0, 2 pi)`` picks the start (first maximum in lexicographic angle
    order), then coordinate-wise golden-section passes refine it; a move is
    only kept if it improves the value.

    Returns
    -------
    settings : BellSettings
        Angles wrapped to ``[0, 2 pi)``.
    value : float
    """
    objective = state if callable(state) else chsh_objective(state)
    grid = 2 * np.pi * np.arange(coarse_grid_steps) / coarse_grid_steps
    mesh = np.meshgrid(grid, grid, grid, grid, indexing="ij")
    vals = objective(*mesh)
    flat = int(np.argmax(vals))
    idx = np.unravel_index(flat, vals.shape)
    x = np.array([grid[i] for i in idx], dtype=float)
    best = float(vals[idx])
    width = 2 * np.pi / coarse_grid_steps

    def at(point):
        return float(objective(*point))

    for _ in range(refine_iters):
        start = best
        for k in range(4):
            def f1(t, k=k):
                p = x.copy()
                p[k] = t
                return at(p)
            t_new, v_new = _golden_max(f1, x[k] - width, x[k] + width)
            if v_new > best:
                x[k], best = t_new, v_new
        if best - start <= 1e-15:
            break
    return BellSettings(*x).wrapped(), best
