"""Exception hierarchy shared by every module."""


class KreinError(Exception):
    """Base class for all library errors."""


class InvalidString(KreinError, ValueError):
    """Atoms unsorted, non-positive masses, or positions not left of ``l``."""


class InvalidSpectrum(KreinError, ValueError):
    pass


class NormalizationImpossible(KreinError):
    """``M(l) < c``: the string has too little mass to reach the target."""


class DomainError(KreinError, ValueError):
    pass


class DivergentTail(KreinError):
    """The principal solution was requested for a non-negative spectral parameter."""


class EmptySpectrum(KreinError):
    pass


class RootBracketFailure(KreinError):
    pass


class TruncationRequired(KreinError):
    """A string with ``l = +inf`` needs an explicit Dirichlet boundary."""


class IllConditioned(KreinError):
    pass


class NonFiniteSup(KreinError):
    pass


class InsufficientData(KreinError):
    pass


class DegenerateLimit(KreinError):
    pass


class PreconditionError(KreinError, ValueError):
    pass
