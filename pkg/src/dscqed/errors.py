"""Exception types shared across the package."""


class DscqedError(Exception):
    """Base class for package errors."""


class DimensionError(DscqedError, ValueError):
    """Invalid or incompatible matrix/space dimension."""


class LabelError(DscqedError, ValueError):
    """Unknown or colliding subsystem name."""


class HermiticityError(DscqedError, ValueError):
    """An operator violates a declared hermiticity contract."""


class DomainError(DscqedError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SizeError(DscqedError, ValueError):
    """Requested problem size exceeds the configured guard."""


class SolverError(DscqedError, RuntimeError):
    """Nonlinear solve failed; carries the last iterate and residual."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class ConfigError(DscqedError, ValueError):
    """Malformed run configuration; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
