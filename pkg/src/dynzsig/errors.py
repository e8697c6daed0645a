"""Exception hierarchy shared by all modules."""


class DynZsigError(ValueError):
    """Base class for every error raised by this package."""


class OrdOfZero(DynZsigError):
    pass


class ZeroDenominator(DynZsigError):
    pass


class DegenerateMap(DynZsigError):
    pass


class ParseError(DynZsigError):
    pass


class GammaNotFixed(DynZsigError):
    pass


class GammaNotPeriodic(DynZsigError):
    pass


class PolynomialType(DynZsigError):
    pass


class AlphaPreperiodic(DynZsigError):
    pass


class DegreeTooSmall(DynZsigError):
    pass


class OrbitHitsGamma(DynZsigError):
    pass


class ZeroTerm(DynZsigError):
    pass


class PeriodOne(DynZsigError):
    pass


class BadReduction(DynZsigError):
    pass


class Undecided(DynZsigError):
    """Neither a cycle nor a positive-height certificate was reached."""
