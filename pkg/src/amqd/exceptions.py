"""Error types shared across the package."""


class ConfigError(ValueError):
    """Raised for invalid specs, parameters, or config files."""


class EstimationError(RuntimeError):
    """Raised when an estimator cannot produce a result (e.g. too few usable points)."""
