"""Exception and warning classes raised across the toolkit."""


class ModconcError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(ModconcError, ValueError):
    pass


class NotPSD(ModconcError, ValueError):
    pass


class Singular(ModconcError, ValueError):
    pass


class DimensionMismatch(ModconcError, ValueError):
    pass


class IndexOutOfRange(ModconcError, IndexError):
    pass


class NotCyclic(ModconcError, ValueError):
    pass


class NotSeparating(ModconcError, ValueError):
    pass


class IllConditioned(ModconcError, ValueError):
    pass


class NotNormalized(ModconcError, ValueError):
    pass


class InvalidDensity(ModconcError, ValueError):
    pass


class InvalidQuantumNumbers(ModconcError, ValueError):
    pass


class NegativeParameter(ModconcError, ValueError):
    pass


class NegativeNorm(ModconcError, ValueError):
    pass


class QuadratureNotConverged(ModconcError, RuntimeError):
    pass


class Unsupported(ModconcError, NotImplementedError):
    pass


class ConfigError(ModconcError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Fock truncation is visibly populated (top level carries weight)."""
