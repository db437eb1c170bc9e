"""Exception types raised across the package."""


class QMonogamyError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(QMonogamyError, ValueError):
    pass


class NotNormalized(QMonogamyError, ValueError):
    pass


class NotPositive(QMonogamyError, ValueError):
    pass


class DimensionMismatch(QMonogamyError, ValueError):
    pass


class BadRank(QMonogamyError, ValueError):
    pass


class BadOrder(QMonogamyError, ValueError):
    pass


class OutOfRange(QMonogamyError, ValueError):
    pass


class NotPure(QMonogamyError, ValueError):
    pass


class TooManyEntries(QMonogamyError, ValueError):
    pass


class RankTooLarge(QMonogamyError, ValueError):
    pass


class OptimizerFailed(QMonogamyError, RuntimeError):
    pass


class BadGrid(QMonogamyError, ValueError):
    pass


class BadEnsembleSize(QMonogamyError, ValueError):
    pass


class ReconstructionFailed(QMonogamyError, RuntimeError):
    pass


class UnsupportedDStar(QMonogamyError, ValueError):
    pass


class Unsupported(QMonogamyError, ValueError):
    pass


class BadOverlap(QMonogamyError, ValueError):
    pass


class BadConfig(QMonogamyError, ValueError):
    pass


class UnknownInequality(QMonogamyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
