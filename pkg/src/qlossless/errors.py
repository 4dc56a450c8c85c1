"""Exception types raised across the package."""


class QLosslessError(Exception):
    """Base class for all package errors."""


class DensityError(QLosslessError, ValueError):
    """A matrix failed density-operator validation."""


class NotHermitian(DensityError):
    pass


class NotUnitTrace(DensityError):
    pass


class NegativeEigenvalue(DensityError):
    pass


class NoConvergence(QLosslessError, ArithmeticError):
    pass


class DomainError(QLosslessError, ValueError):
    pass


class DimensionMismatch(QLosslessError, ValueError):
    pass


class AlphaIsOne(QLosslessError, ValueError):
    pass


class AlphaOutOfRange(QLosslessError, ValueError):
    pass


class KraftViolated(QLosslessError, ValueError):
    pass


class ZeroProbabilitySymbol(QLosslessError, ValueError):
    pass


class InstanceTooLarge(QLosslessError, ValueError):
    pass


class NonOrthonormalBasis(QLosslessError, ValueError):
    pass


class DuplicateCodeword(QLosslessError, ValueError):
    pass


class UnparsableString(QLosslessError, ValueError):
    pass


class InfiniteBound(QLosslessError, ArithmeticError):
    """A bound diverges because a support-containment condition fails."""


class ZeroEigenvalue(QLosslessError, ValueError):
    pass
