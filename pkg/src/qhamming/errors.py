"""Exception hierarchy shared across the package."""


class QHammingError(Exception):
    """Base class for all errors raised by this package."""


class EigenFailure(QHammingError):
    pass


class DimensionOverflow(QHammingError):
    pass


class DimensionMismatch(QHammingError):
    pass


class SizeMismatch(QHammingError):
    pass


class NotUnitary(QHammingError):
    pass


class NotHermitian(QHammingError):
    pass


class NotProjection(QHammingError):
    pass


class InvalidPermutation(QHammingError):
    pass


class IndexOutOfRange(QHammingError):
    pass


class AllZeroWeights(QHammingError):
    pass


class InfeasibleMarginals(QHammingError):
    pass


class DegenerateCycle(QHammingError):
    pass


class TooLarge(QHammingError):
    pass


class NotClassical(QHammingError):
    pass


class ValidationFailure(QHammingError):
    pass


class ParseError(QHammingError):
    pass


class CertificationError(QHammingError):
    """A computed bound violated lower <= upper beyond tolerance."""
