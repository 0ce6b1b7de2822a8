"""Exception types shared across the package."""


class DataError(Exception):
    """Raised when input data violates a contract (bad file, bad labels, empty result)."""


class ConfigError(Exception):
    """Raised when a configuration document is malformed or has invalid values."""
