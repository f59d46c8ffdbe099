"""Exception hierarchy shared by the solver modules."""


class SpinmagError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


class ParameterError(SpinmagError, ValueError):
    """A physical parameter violates the model invariants."""

    code = "parameter"

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ModelDomainError(SpinmagError, ValueError):
    """Inputs fall outside the domain where a formula is defined."""

    code = "domain"


class SingularSystemError(SpinmagError, ArithmeticError):
    code = "singular"


class ConvergenceError(SpinmagError, ArithmeticError):
    code = "convergence"


class InstabilityError(SpinmagError, ArithmeticError):
    """The drift matrix has an eigenvalue outside the open left half-plane."""

    code = "unstable"


class NumericalError(SpinmagError, ArithmeticError):
    code = "numerical"


class NoRootError(SpinmagError, ValueError):
    code = "no_root"


class ConfigError(SpinmagError, ValueError):
    """Invalid configuration document; ``path`` names the offending field."""

    code = "config"

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
