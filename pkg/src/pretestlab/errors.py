"""Exception hierarchy shared across the package."""


class PretestError(Exception):
    """Base class for errors raised by pretestlab."""


class DomainError(PretestError, ValueError):
    """An argument lies outside the domain of a function."""


class ConvergenceError(PretestError, ArithmeticError):
    """An iterative numeric routine failed to converge."""


class DegenerateDataError(PretestError, ValueError):
    """Data on which a test statistic is undefined (e.g. zero spread)."""


class DegenerateThresholdError(PretestError):
    """Too many replicates of a simulation run produced degenerate data."""


class AssumptionViolation(PretestError, ValueError):
    """A precondition of the mixture superiority result does not hold."""

    def __init__(self, assumption: str, message: str):
        super().__init__(f"assumption ({assumption}) violated: {message}")
        self.assumption = assumption


class ConfigError(PretestError, ValueError):
    """Invalid configuration document."""
