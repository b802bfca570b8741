"""Entangled pair of gapless Unruh-DeWitt detectors in the pure-dephasing model.

Two qubits A and B start in ``(|gg> + r|ee>) / sqrt(1 + r**2)`` with the
field in its vacuum and evolve under

    U = exp(-i Z_A (x) phi(f_A)) exp(-i Z_B (x) phi(f_B)).

Only ``<h, h>`` with ``h = f_A + f_B`` survives in the detector state, and the
concurrence is ``C = 2 r / (1 + r**2) * exp(-2 <h, h>)``.  This module
computes that number three ways: the closed form, ``|<psi, J psi>|`` on an
explicit two-mode Fock state, and Wootters' formula on the reduced detector
density.

Smearing functions are Gaussians in ``d + 1`` dimensions.  Their pairing is the
Wightman two-point function on the positive mass shell,

    <f, g> = int d^d k / ((2 pi)^d 2 w_k)  conj(F(w_k, k)) G(w_k, k),

with ``F(w, k) = int f(t, x) exp(i (w t - k.x))``.  ``Im <f, g>`` is half the
Pauli-Jordan pairing, i.e. ``[phi(f), phi(g)] = 2 i Im <f, g>``.

Qubit basis: index 0 is the excited state ``e = (1, 0)``, index 1 the ground
state ``g = (0, 1)``; so ``|ee>`` is index 0 and ``|gg>`` index 3 of the pair.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .entanglement import BellSettings, j_ab_operator, modular_concurrence, wootters_concurrence
from .errors import (
    DimensionMismatch,
    NegativeNorm,
    NegativeParameter,
    QuadratureNotConverged,
    TruncationWarning,
    Unsupported,
)
from .fock import ModeSystem, dephasing_weyl, top_level_probability
from .linalg import AntilinearOperator, dagger, hermitian_eig

TRUNCATION_LIMIT = 1e-8
UDW_OPTIMAL_SETTINGS = BellSettings(0.0, -np.pi / 4, np.pi / 2, np.pi / 4)


@dataclass(frozen=True)
class GaussianTestFunction:
    """``amplitude * exp(-(t - t0)**2 / (2 sigma_t**2) - |x - x0|**2 / (2 sigma_x**2))``."""

    amplitude: float = 1.0
    t0: float = 0.0
    x0: tuple = (0.0, 0.0, 0.0)
    sigma_t: float = 0.5
    sigma_x: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(x) for x in np.atleast_1d(self.x0)))
        if not (self.sigma_t > 0 and self.sigma_x > 0):
            raise ValueError("Gaussian widths must be positive")

    def scaled(self, factor: float) -> "GaussianTestFunction":
        return replace(self, amplitude=self.amplitude * factor)

    def fourier_prefactor(self, spatial_dim: int) -> float:
        return self.amplitude * (2 * np.pi) ** ((spatial_dim + 1) / 2) * self.sigma_t * self.sigma_x**spatial_dim


@dataclass(frozen=True)
class FieldModel:
    """Free scalar field of mass ``mass`` in ``spatial_dim`` space dimensions.

    ``panels`` and ``nodes`` set the starting composite Gauss-Legendre rule on
    ``[0, k_max]``; refinement doubles the panel count.
    """

    mass: float = 1.0
    spatial_dim: int = 3
    panels: int = 16
    nodes: int = 24
    max_refinements: int = 6
    rel_tol: float = 1e-8
    decay_exponent: float = 60.0

    def __post_init__(self):
        if self.spatial_dim not in (1, 3):
            raise ValueError("spatial_dim must be 1 or 3")
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        if self.spatial_dim == 1 and not self.mass > 0:
            raise ValueError("a 1+1 dimensional field needs mass > 0 (infrared divergence)")


def _separation(f: GaussianTestFunction, g: GaussianTestFunction, d: int):
    xf, xg = np.asarray(f.x0), np.asarray(g.x0)
    if xf.shape != (d,) or xg.shape != (d,):
        raise DimensionMismatch(f"test-function centres must have {d} components")
    return g.t0 - f.t0, float(np.linalg.norm(xg - xf))


def _integrand(model: FieldModel, f, g, k: np.ndarray) -> np.ndarray:
    d = model.spatial_dim
    tau, dist = _separation(f, g, d)
    w = np.sqrt(k * k + model.mass**2)
    damp = np.exp(-0.5 * (f.sigma_t**2 + g.sigma_t**2) * w * w - 0.5 * (f.sigma_x**2 + g.sigma_x**2) * k * k)
    if d == 3:
        angular = 4 * np.pi * k * k * np.sinc(k * dist / np.pi) / (2 * np.pi) ** 3
    else:
        angular = 2 * np.cos(k * dist) / (2 * np.pi)
    pref = f.fourier_prefactor(d) * g.fourier_prefactor(d)
    return pref * angular * damp * np.exp(1j * w * tau) / (2 * w)


def _k_max(model: FieldModel, f, g) -> float:
    a = 0.5 * (f.sigma_t**2 + g.sigma_t**2 + f.sigma_x**2 + g.sigma_x**2)
    return math.sqrt(model.decay_exponent / a)


def radial_quadrature(model: FieldModel, f, g, panels: int):
    """Composite Gauss-Legendre estimate of ``<f, g>``.

    Returns ``(value, abs_scale)`` where ``abs_scale`` integrates ``|integrand|``.
    """
    x, wts = np.polynomial.legendre.leggauss(model.nodes)
    edges = np.linspace(0.0, _k_max(model, f, g), panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    k = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    w = (half[:, None] * wts[None, :]).reshape(-1)
    vals = _integrand(model, f, g, k)
    return complex(np.sum(w * vals)), float(np.sum(w * np.abs(vals)))


def inner_product(model: FieldModel, f: GaussianTestFunction, g: GaussianTestFunction) -> complex:
    """Wightman pairing ``<f, g>`` with adaptive panel doubling.

    Raises
    ------
    QuadratureNotConverged
        If two successive refinements still differ by more than
        ``model.rel_tol`` relative to the integral of ``|integrand|``.
    """
    if f.amplitude == 0 or g.amplitude == 0:
        return 0j
    panels = model.panels
    prev, _ = radial_quadrature(model, f, g, panels)
    for _ in range(model.max_refinements):
        panels *= 2
        cur, scale = radial_quadrature(model, f, g, panels)
        if abs(cur - prev) <= model.rel_tol * scale:
            if f == g:
                return complex(cur.real, 0.0)
            return cur
        prev = cur
    raise QuadratureNotConverged(f"<f,g> not converged after {model.max_refinements} refinements")


def refinement_change(model: FieldModel, f, g, panels: int | None = None) -> float:
    """Relative change of ``<f, g>`` when the panel count is doubled once."""
    p = model.panels if panels is None else panels
    a, _ = radial_quadrature(model, f, g, p)
    b, scale = radial_quadrature(model, f, g, 2 * p)
    return abs(b - a) / scale


def symplectic_overlap(model: FieldModel, f, g) -> float:
    """``Im <f, g>``; ``[phi(f), phi(g)] = 2i`` times this."""
    if f == g:
        return 0.0
    return inner_product(model, f, g).imag


def gram_matrix(model: FieldModel, f_a, f_b) -> np.ndarray:
    faa = inner_product(model, f_a, f_a)
    fbb = inner_product(model, f_b, f_b)
    fab = inner_product(model, f_a, f_b)
    return np.array([[faa, fab], [np.conj(fab), fbb]], dtype=complex)


def gram_coefficients(gram) -> np.ndarray:
    """Columns ``c_A, c_B`` in an orthonormal two-mode basis with ``C^dagger C = gram``.

    Built from the eigen-decomposition, so a real Gram matrix gives real
    coefficients and a rank-deficient one just leaves a mode unused.
    """
    spec = hermitian_eig(gram)
    lam = np.clip(spec.eigenvalues, 0.0, None)
    return np.sqrt(lam)[:, None] * dagger(spec.eigenvectors)


def default_pair(separation: float = 4.0, sigma: float = 0.5, spatial_dim: int = 3,
                 amplitude: float = 1.0):
    """Mirror-symmetric pair at ``t = 0`` and ``x = -+ separation/2`` on the first axis."""
    x = np.zeros(spatial_dim)
    x[0] = separation / 2
    f_a = GaussianTestFunction(amplitude, 0.0, tuple(-x), sigma, sigma)
    f_b = GaussianTestFunction(amplitude, 0.0, tuple(x), sigma, sigma)
    return f_a, f_b


def smearing_norm(model: FieldModel, f_a, f_b) -> float:
    """``<h, h>`` for ``h = f_A + f_B``."""
    g = gram_matrix(model, f_a, f_b)
    return float((g[0, 0] + g[1, 1] + 2 * g[0, 1].real).real)


def pair_with_norm(model: FieldModel, f_a, f_b, hh: float):
    """Rescale both amplitudes so that ``<f_A + f_B, f_A + f_B> = hh``."""
    if hh < 0:
        raise NegativeNorm(f"<h,h> = {hh} is negative")
    base = smearing_norm(model, f_a.scaled(1 / f_a.amplitude), f_b.scaled(1 / f_b.amplitude))
    eps = math.sqrt(hh / base)
    return f_a.scaled(eps / f_a.amplitude), f_b.scaled(eps / f_b.amplitude)


@dataclass(frozen=True)
class UdwScenario:
    """One detector-pair configuration.

    Exactly one of ``(f_a, f_b)`` and ``hh`` must be given; ``hh`` is the
    abstract ``<h, h>`` that bypasses the quadrature.
    """

    r: float
    f_a: GaussianTestFunction | None = None
    f_b: GaussianTestFunction | None = None
    hh: float | None = None
    settings: BellSettings = UDW_OPTIMAL_SETTINGS
    n_max: int = 16
    model: FieldModel = field(default_factory=FieldModel)
    gap: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise NegativeParameter(f"r = {self.r} must be >= 0")
        has_functions = self.f_a is not None and self.f_b is not None
        if (self.f_a is None) != (self.f_b is None):
            raise ValueError("give both test functions or neither")
        if has_functions == (self.hh is not None):
            raise ValueError("exactly one of (f_a, f_b) and hh must be set")
        if self.hh is not None and self.hh < 0:
            raise NegativeNorm(f"<h,h> = {self.hh} is negative")
        if self.gap != 0:
            raise Unsupported("only gapless detectors (gap = 0) admit the exact dephasing evolution")

    @property
    def abstract(self) -> bool:
        return self.hh is not None

    def norm(self) -> float:
        if self.abstract:
            return float(self.hh)
        return smearing_norm(self.model, self.f_a, self.f_b)


@dataclass(frozen=True, eq=False)
class DetectorPairState:
    """Detector pair plus field.

    Analytic states carry only ``(r, hh)``; numeric ones also hold the joint
    vector on ``C^2_A (x) C^2_B (x) Fock`` and the Fock ``field`` it lives on.
    """

    r: float
    hh: float
    vector: np.ndarray | None = None
    field: ModeSystem | None = None

    @property
    def provenance(self) -> str:
        return "analytic" if self.vector is None else "numeric"

    @property
    def field_dim(self) -> int:
        return 1 if self.field is None else self.field.dim


def _check_r(r: float) -> None:
    if r < 0:
        raise NegativeParameter(f"r = {r} must be >= 0")


def detector_amplitudes(r: float) -> np.ndarray:
    _check_r(r)
    v = np.zeros(4, dtype=complex)
    v[3] = 1.0
    v[0] = r
    return v / math.sqrt(1 + r * r)


def initial_state(r: float, field: ModeSystem | None = None) -> DetectorPairState:
    """``(|gg> + r|ee>) / sqrt(1 + r**2)`` with the field in its vacuum."""
    det = detector_amplitudes(r)
    vac = np.ones(1, dtype=complex) if field is None else field.vacuum()
    return DetectorPairState(r, 0.0, np.kron(det, vac), field)


def evolved_state_analytic(r: float, hh: float) -> DetectorPairState:
    _check_r(r)
    if hh < 0:
        raise NegativeNorm(f"<h,h> = {hh} is negative")
    return DetectorPairState(float(r), float(hh))


def evolved_state_from_coefficients(r: float, c_a, c_b, field: ModeSystem,
                                    tol: Tolerances = DEFAULT_TOL) -> DetectorPairState:
    """Apply the dephasing unitaries for explicit mode coefficients.

    Each ``exp(-i Z (x) phi(c))`` is assembled as
    ``sum_s |s><s| (x) exp(-i z_s phi(c))`` from exact exponentials of the
    truncated field.
    """
    c_a = np.asarray(c_a, dtype=complex)
    c_b = np.asarray(c_b, dtype=complex)
    z = np.array([1.0, -1.0])
    eye2 = np.eye(2)
    exps_a = {s: dephasing_weyl(field, c_a, -s, tol) for s in z}
    exps_b = {s: dephasing_weyl(field, c_b, -s, tol) for s in z}
    u_a = sum(np.kron(np.kron(np.diag(z == s).astype(complex), eye2), exps_a[s]) for s in z)
    u_b = sum(np.kron(np.kron(eye2, np.diag(z == s).astype(complex)), exps_b[s]) for s in z)
    psi0 = initial_state(r, field).vector
    psi = u_a @ (u_b @ psi0)
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 1e-10:
        raise ArithmeticError(f"norm drift {drift:.3e} after unitary evolution")
    top = top_level_probability(field, psi)
    if top > TRUNCATION_LIMIT:
        warnings.warn(f"top Fock level carries probability {top:.3e} (n_max={field.n_max})",
                      TruncationWarning, stacklevel=2)
    hh = float(np.real(np.vdot(c_a + c_b, c_a + c_b)))
    return DetectorPairState(float(r), hh, psi, field)


def evolved_state_numeric(scenario: UdwScenario, tol: Tolerances = DEFAULT_TOL) -> DetectorPairState:
    """Two-mode Fock realisation of the evolved state for real test functions."""
    if scenario.abstract:
        raise ValueError("numeric evolution needs test functions, not an abstract <h,h>")
    gram = gram_matrix(scenario.model, scenario.f_a, scenario.f_b)
    coeffs = gram_coefficients(gram)
    field_sys = ModeSystem.create(2, scenario.n_max)
    return evolved_state_from_coefficients(scenario.r, coeffs[:, 0], coeffs[:, 1], field_sys, tol)


def j_ab_full_operator(field: ModeSystem | None = None) -> AntilinearOperator:
    """``J_AB`` lifted to the detector-field space.

    On the field factor the conjugation is ``(-1)**N`` composed with complex
    conjugation in the occupation basis.  It fixes the vacuum and sends
    ``phi(c)`` to ``-phi(conj(c))``, so for real mode coefficients it commutes
    with every ``exp(i phi(c))``: on the field's Weyl operators it acts as the
    identity.
    """
    m = j_ab_operator().matrix
    if field is None:
        return AntilinearOperator(m)
    return AntilinearOperator(np.kron(m, np.diag(field.parity()).astype(complex)))


def j_ab_apply(v, field: ModeSystem | None = None) -> np.ndarray:
    """``(a,b)(x)(c,d)(x)chi -> (d*, c*)(x)(b*, a*)(x)K chi`` by index shuffling."""
    v = np.asarray(v, dtype=complex)
    fdim = 1 if field is None else field.dim
    if v.shape != (4 * fdim,):
        raise DimensionMismatch(f"vector of length {v.shape[0]}, expected {4 * fdim}")
    t = np.conj(v).reshape(2, 2, fdim)
    out = t[::-1, ::-1, :].transpose(1, 0, 2)
    if field is not None:
        out = out * field.parity()[None, None, :]
    return out.reshape(-1).copy()


def udw_concurrence(r: float, hh: float) -> float:
    """``2 r / (1 + r**2) * exp(-2 hh)``."""
    _check_r(r)
    if hh < 0:
        raise NegativeNorm(f"<h,h> = {hh} is negative")
    return 2 * r / (1 + r * r) * math.exp(-2 * hh)


def isolated_concurrence(r: float) -> float:
    return udw_concurrence(r, 0.0)


def reduced_detector_density(state: DetectorPairState) -> np.ndarray:
    """Partial trace over the field."""
    if state.vector is None:
        r, hh = state.r, state.hh
        norm = 1 + r * r
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = r * r / norm
        rho[3, 3] = 1 / norm
        rho[3, 0] = rho[0, 3] = r * math.exp(-2 * hh) / norm
        return rho
    psi = state.vector.reshape(4, state.field_dim)
    rho = psi @ dagger(psi)
    return 0.5 * (rho + dagger(rho))


def j_concurrence(state: DetectorPairState) -> float:
    """``|<psi, (J_AB (x) K) psi>|`` on a numeric state."""
    if state.vector is None:
        raise ValueError("J expectation needs a numeric state")
    return modular_concurrence(state.vector, j_ab_full_operator(state.field))


def angular_chsh(settings: BellSettings) -> float:
    a, b, ap, bp = settings.as_tuple()
    return math.cos(a + b) + math.cos(ap + b) + math.cos(a + bp) - math.cos(ap + bp)


def chsh_udw(r: float, hh: float, settings: BellSettings) -> float:
    return udw_concurrence(r, hh) * angular_chsh(settings)


def chsh_udw_objective(r: float, hh: float):
    """Vectorised closed form for :func:`~modconc.entanglement.maximize_chsh`."""
    c = udw_concurrence(r, hh)

    def objective(a, b, ap, bp):
        return c * (np.cos(a + b) + np.cos(ap + b) + np.cos(a + bp) - np.cos(ap + bp))

    return objective


def three_way_concurrence(state: DetectorPairState) -> dict[str, float]:
    """Closed form, J expectation and Wootters concurrence for one state."""
    out = {"formula": udw_concurrence(state.r, state.hh)}
    if state.vector is not None:
        out["j_numeric"] = j_concurrence(state)
    out["wootters_reduced"] = wootters_concurrence(reduced_detector_density(state))
    return out
