"""Exception types shared across the package."""


class DimensionError(ValueError):
    """State/gate dimensions are inconsistent or exceed the configured cap."""


class DomainError(ValueError):
    """A formula was evaluated outside its physically valid domain."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed its self-consistency check."""

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion


class ConfigError(ValueError):
    """Bad scenario configuration (parse, unit or validation failure)."""
