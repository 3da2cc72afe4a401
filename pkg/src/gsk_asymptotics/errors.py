"""Exception hierarchy shared by every module of the package."""


class GskError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(GskError, ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class NumericalError(GskError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result (CLI exit code 3)."""


class DomainError(NumericalError):
    """An argument lies outside the domain where a function is defined."""


class CutoffTooSmallError(NumericalError):
    """The truncation cutoff leaves a non-negligible tail of the integrand."""


class PoleError(NumericalError):
    """Evaluation at (or numerically on top of) a pole."""


class AdmissibilityError(ConfigurationError):
    """The kernel violates sup |phi| < 1 on the real axis."""

    def __init__(self, message, lam=None, value=None):
        super().__init__(message)
        self.lam = lam
        self.value = value


class LogSingularityError(NumericalError):
    """1 + phi vanishes, so log(1 + phi) is singular."""


class RootError(NumericalError):
    """Root finding failed or produced an inconsistent root set."""


class SingularSystemError(NumericalError):
    """A linear system (I - A, or the discretized operator) is singular."""


class NyquistError(ConfigurationError):
    """The quadrature rule is too coarse to resolve the kernel oscillation."""

    def __init__(self, message, required_nodes=None):
        super().__init__(message)
        self.required_nodes = required_nodes


class CombinatorialLimitError(ConfigurationError):
    """Too many contour terms requested for the explicit sum."""

    def __init__(self, message, term_count=None):
        super().__init__(message)
        self.term_count = term_count
