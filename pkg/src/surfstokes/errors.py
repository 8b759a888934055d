"""Exception hierarchy shared by all surfstokes modules."""


class SurfStokesError(Exception):
    """Base class for all library errors."""


class OutOfTubularNeighborhood(SurfStokesError, ValueError):
    pass


class DegenerateLift(SurfStokesError):
    pass


class ConfigError(SurfStokesError, ValueError):
    pass


class UnsupportedDegree(SurfStokesError, ValueError):
    pass


class UnsupportedExactness(SurfStokesError, ValueError):
    pass


class UnsupportedSurface(SurfStokesError, ValueError):
    pass


class DimensionMismatch(SurfStokesError, ValueError):
    pass


class SingularSystem(SurfStokesError):
    pass


class NoConvergence(SurfStokesError):
    pass


class EigenFailure(SurfStokesError):
    pass


class InvalidSequence(SurfStokesError, ValueError):
    pass
