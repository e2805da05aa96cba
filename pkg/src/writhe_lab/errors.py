"""Exception hierarchy shared by every module."""


class WritheLabError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(WritheLabError, ValueError):
    pass


class DegenerateEdgeError(WritheLabError, ValueError):
    pass


class GenerationFailureError(WritheLabError, RuntimeError):
    pass


class GeometricDegeneracyError(WritheLabError, ValueError):
    """Two edges intersect transversally, or a quantity is ill-defined there."""


class DisjointnessError(WritheLabError, ValueError):
    """Components of a curve system touch or intersect.

    Attributes
    ----------
    pair : tuple of int or None
        Indices of the offending components.
    distance : float or None
        Their minimum distance.
    """

    def __init__(self, message, pair=None, distance=None):
        super().__init__(message)
        self.pair = pair
        self.distance = distance


class DegenerateDirectionError(WritheLabError, ValueError):
    """The projection direction is not generic for the curve system.

    ``feature`` names what failed (``"edge"``, ``"endpoint"``, ``"coincident"``
    or ``"overlap"``) and ``detail`` carries the indices involved.
    """

    def __init__(self, message, feature=None, detail=None):
        super().__init__(message)
        self.feature = feature
        self.detail = detail


class TransportError(WritheLabError, ValueError):
    """Parallel transport across a 180 degree turn is undefined."""


class AmbiguousTwistError(WritheLabError, ValueError):
    pass


class NotAntiParallelError(WritheLabError, ValueError):
    pass


class PathObstructionError(WritheLabError, ValueError):
    pass


class InvalidStateError(WritheLabError, ValueError):
    pass


class NotJuxtaposedError(WritheLabError, ValueError):
    pass


class DegenerateSplitError(WritheLabError, ValueError):
    pass


class UnequalFluxError(WritheLabError, ValueError):
    pass


class CurveFileError(WritheLabError, ValueError):
    """Malformed curve file; ``position`` is ``(line, column, byte offset)``
    when known."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
