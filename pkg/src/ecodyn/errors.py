"""Exception types raised across the package."""


class EcodynError(Exception):
    """Base class for all package errors."""


class ValidationError(EcodynError, ValueError):
    """A parameter set or configuration violates a model invariant."""


class ParseError(EcodynError, ValueError):
    """A configuration file could not be parsed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class DegenerateDenominator(EcodynError, ArithmeticError):
    """A closed-form equilibrium expression has a vanishing denominator."""


class NoConvergence(EcodynError, RuntimeError):
    """The companion-matrix eigen-iteration failed."""


class EigenFailure(EcodynError, RuntimeError):
    """The Jacobian eigen-solver failed."""


class WrongFamily(EcodynError, ValueError):
    """An operation was called with an equilibrium of the wrong family."""


class IntegrationError(EcodynError, RuntimeError):
    """Base class for integrator failures."""


class PositivityViolation(IntegrationError):
    """A state component dropped below the clamping tolerance."""


class StepSizeUnderflow(IntegrationError):
    """The adaptive step size fell below the representable minimum."""


class NonFiniteState(IntegrationError):
    """The integrator produced a NaN or infinite component."""
