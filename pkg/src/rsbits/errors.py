"""Exception types shared across the library."""


class ConfigError(ValueError):
    """Unsupported or inconsistent build parameters."""


class QueryError(ValueError):
    """Query argument outside its valid range."""


class InvariantError(RuntimeError):
    """An internal structural guarantee was violated (indicates a bug)."""


class FormatError(ValueError):
    """Malformed serialized stream."""
