"""Exception types shared across the package."""


class StateError(ValueError):
    """A state vector violates its normalization contract."""


class ConfigError(ValueError):
    """An experiment or integrator configuration is invalid."""


class ResourceLimitError(ValueError):
    """A dense operation was requested above the configured size limit."""


class NumericError(RuntimeError):
    """A numerical contract (unitarity, eigenvalue moduli) was violated."""


class DivergenceError(ValueError):
    """KL divergence is infinite: P has support where Q vanishes."""
