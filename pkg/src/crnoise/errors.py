"""Exception types shared across the toolkit."""


class ConfigError(ValueError):
    """A configuration key is unknown, malformed, or out of range."""


class NumericalError(RuntimeError):
    """A computation produced a singular or non-finite result."""
