"""Numerical tolerances shared by the kernel and the physics modules."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance set used when a caller does not pass explicit values.

    Attributes
    ----------
    herm : float
        Allowed ``||H - H^dagger||`` before a matrix is rejected as non-Hermitian.
    eig : float
        Reconstruction / unitarity tolerance for eigen-decompositions.
    psd : float
        Negative eigenvalues in ``[-psd, 0]`` are clamped to zero.
    cond : float
        Largest accepted condition number (Gram matrices, polar decomposition).
    modular : float
        Residual bound for the modular property checks.
    quad : float
        Relative change allowed between successive quadrature refinements.
    """

    herm: float = 1e-10
    eig: float = 1e-9
    psd: float = 1e-10
    cond: float = 1e8
    modular: float = 1e-9
    quad: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"tolerance {f.name!r} must be positive")

    def updated(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


DEFAULT_TOL = Tolerances()
