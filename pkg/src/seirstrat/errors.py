"""Exception hierarchy.

Two families: domain errors (bad inputs, impossible requests) and numerical
errors (the computation itself broke down).  CLI maps these to exit codes 2
and 3 respectively.
"""

from __future__ import annotations


class DomainError(ValueError):
    """Inputs are outside the region where the requested quantity exists."""


class NoEndemicEquilibriumError(DomainError):
    """Raised when the basic reproduction number does not exceed one."""


class InconsistentInputError(DomainError):
    """Observed quantities violate the constraints of the model family."""


class DegenerateTrajectoryError(DomainError):
    """The observed window carries no usable dynamics (flat series)."""


class UnidentifiableWindowError(DomainError):
    """The observed window does not pin down the parameters."""


class ConfigError(DomainError):
    """Scenario configuration is malformed or incomplete."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: overflow, non-finite state, no
    convergence, or step size underflow."""
