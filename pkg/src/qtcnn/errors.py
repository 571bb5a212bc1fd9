"""Shared exception types.

Argument-shape mistakes raise plain ValueError at the call site; the types
here mark conditions a caller may want to handle distinctly.
"""


class ConfigError(ValueError):
    """A configuration value is outside its supported range."""


class DataError(ValueError):
    """Input data violates the pipeline's contract (schema, size, class balance)."""


class NotFittedError(RuntimeError):
    """A fitted transform was applied before fitting."""


class DegenerateSeriesError(ValueError):
    """A return series has zero variance, so the Sharpe ratio is undefined."""
