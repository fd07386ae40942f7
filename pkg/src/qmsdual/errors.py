"""Exception hierarchy. The CLI maps these onto exit codes."""


class QmsError(Exception):
    """Base class for all package errors."""


class KernelError(QmsError, ArithmeticError):
    """A dense linear-algebra routine failed (non-convergence, rank deficiency)."""


class ShapeError(QmsError, ValueError):
    pass


class NotQMSGeneratorError(QmsError, ValueError):
    """The superoperator is not the generator of a quantum Markov semigroup."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class PreconditionError(QmsError, ValueError):
    """An analysis precondition fails, e.g. rho is not faithful or not invariant."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoPrivilegedRepError(QmsError):
    """The span of the Kraus operators is not invariant under the modular map.

    Equivalently the 0-dual semigroup is not a QMS.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InternalInconsistencyError(QmsError, RuntimeError):
    """A result contradicts a structural identity that must hold exactly."""
