"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid site count, particle number, Renyi index or similar argument."""


class DimensionError(ValueError):
    """Vectors, matrices or bases whose sizes do not agree."""


class SizeGuardError(ValueError):
    """An exhaustive computation was requested beyond its default cost guard."""


class NumericalConsistencyError(ArithmeticError):
    """A quantity that must be real/Hermitian/normalized failed its tolerance."""


class SamplerError(RuntimeError):
    """The Markov chain could not be initialized or configured."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""
