"""Exception types raised across the package."""


class MpkError(Exception):
    """Base class for all package errors."""


# linear algebra
class NotSymmetric(MpkError, ValueError):
    pass


class ConvergenceFailure(MpkError, RuntimeError):
    pass


class UnsupportedIndex(MpkError, ValueError):
    pass


class NotPositiveSemidefinite(MpkError, ValueError):
    pass


# symplectic matrices
class OddDimension(MpkError, ValueError):
    pass


class NotSymplectic(MpkError, ValueError):
    pass


class SingularB(MpkError, ValueError):
    pass


class SingularL(MpkError, ValueError):
    pass


class SingularBlock12(MpkError, ValueError):
    pass


class SingularBlock11(MpkError, ValueError):
    pass


class FactorizationFailure(MpkError, RuntimeError):
    pass


# metaplectic words
class SingularInput(MpkError, ValueError):
    pass


class IncompatibleIndex(MpkError, ValueError):
    pass


class DimensionMismatch(MpkError, ValueError):
    pass


class DegeneratePairing(MpkError, ArithmeticError):
    pass


# gaussian states
class SingularTheta(MpkError, ValueError):
    pass


class NotSquareIntegrable(MpkError, ValueError):
    pass


# grids and bases
class GridMismatch(MpkError, ValueError):
    pass


class ResamplingRequired(MpkError, ValueError):
    pass


class AliasingRisk(MpkError, ValueError):
    pass


class TruncationUnconverged(MpkError, RuntimeError):
    pass
