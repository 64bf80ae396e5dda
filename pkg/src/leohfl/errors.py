"""Exception types raised across the simulator."""


class LeoHflError(Exception):
    """Base class for all simulator errors."""


# orbital
class NotInCoverage(LeoHflError, ValueError):
    pass


# linkmodel
class NonPositiveNoise(LeoHflError, ValueError):
    pass


class ZeroRate(LeoHflError, ValueError):
    pass


# resource
class ZeroFrequency(LeoHflError, ValueError):
    pass


class WindowTooShort(LeoHflError, ValueError):
    """Effective compute time (window minus transfer times) is not positive."""


class NoData(LeoHflError, ValueError):
    """Satellite has no training samples; it sits the round out."""


# aggregation
class EmptyReportSet(LeoHflError, ValueError):
    pass


class ZeroTotalLoss(LeoHflError, ValueError):
    pass


class AllZeroMass(LeoHflError, ValueError):
    pass


class LayoutMismatch(LeoHflError, ValueError):
    pass


class UnnormalizedWeights(LeoHflError, ValueError):
    pass


# learner
class DimensionMismatch(LeoHflError, ValueError):
    pass


class EmptyDataset(LeoHflError, ValueError):
    pass


class ShapeMismatch(LeoHflError, ValueError):
    pass


class TooSmall(LeoHflError, ValueError):
    pass


# harness
class IoFailure(LeoHflError, OSError):
    pass


class RoundFailure(LeoHflError, RuntimeError):
    """A module error surfaced mid-run; message names the round and satellite."""
