"""Exception types shared across the package."""

from __future__ import annotations


class KdvLabError(Exception):
    """Base class for structured failures."""


class ConfigError(KdvLabError):
    """Malformed or unknown configuration content."""


class GridCompatibilityError(KdvLabError):
    """Rescaling target grid does not match the requested scaling."""


class BlowUpError(KdvLabError):
    """Solution left the trusted amplitude range."""

    def __init__(self, t: float, what: str = "solution blew up"):
        self.t = t
        super().__init__(f"{what} at t={t:.6g}")


class BudgetExceededError(KdvLabError):
    """Hyperplane summation would exceed the configured work budget."""


class NewtonDivergenceError(KdvLabError):
    """Newton iteration failed to converge within the iteration cap."""
