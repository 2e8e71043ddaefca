"""
Error hierarchy for the scattering toolkit.

Configuration problems (bad energies, couplings, grids, option values) and
numerical failures (poles, divergent series, poor fits) form two families so
the command line can map them onto distinct exit codes.
"""

from typing import Optional


class ScatteringError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigurationError(ScatteringError, ValueError):
    """Invalid physical input or run configuration (exit code 2)."""

    exit_code = 2


class BelowThresholdError(ConfigurationError):
    """Energy at or below the rest energy: no propagating solution."""


class CouplingTooStrongError(ConfigurationError):
    """|gamma| >= 1/2: the exponent s becomes imaginary for j = +-1/2."""


class NumericalError(ScatteringError, ArithmeticError):
    """Failure inside the numeric kernel (exit code 3)."""

    exit_code = 3


class PoleError(NumericalError):
    """Gamma function evaluated at a non-positive integer."""


class DomainError(NumericalError):
    """Argument outside the contracted domain of a formula."""


class ConvergenceError(NumericalError):
    """A series or expansion did not reach the requested tolerance."""

    def __init__(self, message: str, achieved_error: Optional[float] = None):
        if achieved_error is not None:
            message = f'{message} (achieved error {achieved_error:.3e})'
        super().__init__(message)
        self.achieved_error = achieved_error


class PoorFitError(NumericalError):
    """Asymptotic phase fit residual above tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f'{message} (residual {residual:.3e})')
        self.residual = residual


class StepUnderflowError(NumericalError):
    """ODE step size collapsed, usually because rho0 is too close to the origin."""
