"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A configuration or function parameter is outside its valid range."""


class UnsupportedConfigurationError(RuntimeError):
    """A valid-looking configuration requests an unsupported combination."""


class InvalidSpectrumError(ValueError):
    """A spectrum violates the Hermitian-symmetry constraints of a real signal."""


class PopulationExtinctionError(RuntimeError):
    """Every trajectory in a branching population was killed."""


class DivergenceError(RuntimeError):
    """A trajectory left the numerically representable region.

    The real gauge is designed to keep trajectories bounded, so this
    signals a configuration bug rather than an expected event.
    """
