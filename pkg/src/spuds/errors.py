"""Exception hierarchy shared by every module of the package."""


class SpudsError(Exception):
    """Base class for all package errors."""


class ParseError(SpudsError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyData(SpudsError):
    pass


class DimensionMismatch(SpudsError):
    pass


class LengthMismatch(SpudsError):
    pass


class DegenerateData(SpudsError):
    pass


class InvalidSigma(SpudsError):
    pass


class IsolatedVertex(SpudsError):
    pass


class ZeroVolumeCluster(SpudsError):
    pass


class RequiresTwoClusters(SpudsError):
    pass


class ConvergenceFailure(SpudsError):
    pass


class NonSymmetric(SpudsError):
    pass


class EmptyCluster(SpudsError):
    pass


class AllOutliers(SpudsError):
    pass


class EmptySide(SpudsError):
    pass


class ConfigError(SpudsError, ValueError):
    pass


class TooLarge(SpudsError):
    """Dense n x n storage would exceed the configured size limit."""
