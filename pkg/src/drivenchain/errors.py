"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """A configuration file or parameter set failed validation."""


class NumericalError(RuntimeError):
    """A numerical guarantee was violated (unitarity, norm, determinant...)."""
