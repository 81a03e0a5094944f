"""Exception types raised by the laboratory."""


class RsLabError(Exception):
    """Base class for every error raised by rslab."""


class RamifiedPrime(RsLabError):
    pass


class Unsupported(RsLabError):
    pass


class NonRealCoefficient(RsLabError):
    pass


class UnsupportedField(RsLabError):
    pass


class CutoffTooLarge(RsLabError):
    pass


class BadSpec(RsLabError):
    pass


class StreamTooShort(RsLabError):
    pass


class CountMismatch(RsLabError):
    pass


class IncompleteSet(RsLabError):
    pass


class DegenerateRegion(RsLabError):
    pass


class ExhaustedRange(RsLabError):
    pass


class InadmissibleParameters(RsLabError):
    pass


class KappaUnavailable(RsLabError):
    pass


class DivergentLocalFactor(RsLabError):
    pass
