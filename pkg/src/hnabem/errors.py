"""Exception types raised across the package."""


class HnabemError(ValueError):
    """Base class for all domain errors raised by this package."""


class NonPositiveArgument(HnabemError):
    pass


class NonPositiveRealPart(HnabemError):
    pass


class CoincidentPoints(HnabemError):
    pass


class NonConvex(HnabemError):
    pass


class Degenerate(HnabemError):
    pass


class OutOfRange(HnabemError):
    pass


class BadGrading(HnabemError):
    pass


class BadLayers(HnabemError):
    pass


class AlphaOutOfRange(HnabemError):
    pass


class BadIndex(HnabemError):
    pass


class UnsupportedKernel(HnabemError):
    pass


class ZeroSeparation(HnabemError):
    pass


class NotStarShaped(HnabemError):
    pass


class SingularMatrix(HnabemError):
    pass


class PointInsideScatterer(HnabemError):
    pass


class ZeroReference(HnabemError):
    pass


class UnknownScene(HnabemError):
    pass
