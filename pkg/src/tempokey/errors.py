"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented precondition or range."""


class EstimationError(RuntimeError):
    """A statistical estimate cannot be formed from the available counts."""


class ConfigError(ValidationError):
    """A run configuration is malformed or contains unknown keys."""
