"""Exception hierarchy shared by the compute modules and the CLI."""


class SemiframeError(ValueError):
    """
    Base class for every error raised by semiframe
    """


class DimensionMismatch(SemiframeError):
    pass


class NotHermitian(SemiframeError):
    pass


class SingularCalculus(SemiframeError):
    """
    A spectral function is infinite or undefined on the spectrum
    """


class EmptyFamily(SemiframeError):
    pass


class InconsistentScan(SemiframeError):
    pass


class GridMismatch(SemiframeError):
    pass


class DependentSpanningSet(SemiframeError):
    pass


class NotInvertible(SemiframeError):
    pass


class HypothesisViolated(SemiframeError):
    pass


class NotBiorthogonal(SemiframeError):
    pass


class NotTotal(SemiframeError):
    pass


class InvalidB(SemiframeError):
    pass


class WeightBelowOne(SemiframeError):
    pass


class NonpositiveSymbol(SemiframeError):
    pass


class ConfigParse(SemiframeError):
    pass


class UnknownGalleryCase(SemiframeError):
    pass


class PostconditionFailed(SemiframeError):
    """
    A computed output misses the identity it must satisfy
    """
    pass
