"""Finite-dimensional modular theory and concurrence toolkit.

Submodules
----------
linalg        Hermitian/antilinear kernel and Pauli constants.
fock          Truncated bosonic Fock spaces, smeared fields, Weyl operators.
modular       Operator algebras, commutants and the Tomita-Takesaki construction.
entanglement  Concurrence (pure, Wootters, modular) and CHSH tools.
susy          Supersymmetric Landau-level toy model and its conjugation.
udw           Gapless Unruh-DeWitt detector pair in the pure-dephasing model.
cli           Scenario runner (``python -m modconc``).
"""
from .config import DEFAULT_TOL, Tolerances
from .errors import ModconcError, TruncationWarning

__version__ = "0.1.0"

__all__ = ["DEFAULT_TOL", "ModconcError", "Tolerances", "TruncationWarning", "__version__"]
