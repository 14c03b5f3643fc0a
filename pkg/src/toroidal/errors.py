"""Exception types shared by all modules.

Every failure raised by the library derives from ``ToroidalError`` so the
command line layer can map it to an exit code.  ``IdentityBreach`` marks a
numerical identity that failed its tolerance and ``TooLarge`` marks a
resource bound that was exceeded.
"""


class ToroidalError(ValueError):
    """Base class for input and domain errors."""


class NotPrime(ToroidalError):
    pass


class TooLarge(ToroidalError):
    pass


class TrivialCharacter(ToroidalError):
    pass


class NonUnitGaussSum(ToroidalError):
    pass


class ContextMismatch(ToroidalError):
    pass


class EmptyData(ToroidalError):
    pass


class DivisibilityViolation(ToroidalError):
    pass


class InadmissiblePrime(ToroidalError):
    pass


class DomainError(ToroidalError):
    pass


class ExcludedTuple(ToroidalError):
    pass


class BadPolynomial(ToroidalError):
    pass


class BadMinorant(ToroidalError):
    pass


class BadShape(ToroidalError):
    pass


class MismatchedIdentity(ToroidalError):
    pass


class NotGallantKernel(ToroidalError):
    pass


class WeightBoundViolation(ToroidalError):
    pass


class IdentityBreach(RuntimeError):
    """A verified identity exceeded its tolerance."""

    def __init__(self, name, residual, tol):
        super().__init__(f"{name}: residual {residual:.3e} exceeds {tol:.1e}")
        self.name = name
        self.residual = residual
        self.tol = tol
