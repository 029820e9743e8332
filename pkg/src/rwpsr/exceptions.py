"""Exception and warning types raised across the package."""


class RWPError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(RWPError, ValueError):
    pass


class SymmetryViolation(RWPError, ArithmeticError):
    """Inverse transform left a non-negligible imaginary part."""


class NonPositiveMu(RWPError, ValueError):
    pass


class NonPositiveSigma(RWPError, ValueError):
    pass


class ZeroSignal(RWPError, ValueError):
    pass


class ZeroResidualSpectrum(RWPError, ValueError):
    """Every alias group has nu == rho, so the residual vanishes for all mu."""


class TargetUnreachable(RWPError, ValueError):
    """The discrepancy target lies outside the residual-norm bracket."""


class SingularSystem(RWPError, ArithmeticError):
    pass


class EvenBand(RWPError, ValueError):
    pass


class IdenticalImages(RWPError, ValueError):
    pass


class UnsupportedFormat(RWPError, ValueError):
    pass


class MalformedHeader(RWPError, ValueError):
    pass


class TruncatedData(RWPError, ValueError):
    pass


class IoFailure(RWPError, OSError):
    pass


class BoundaryMinimumWarning(UserWarning):
    """The whiteness minimiser sits on the edge of the mu grid."""
