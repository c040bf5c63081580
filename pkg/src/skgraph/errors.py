"""Exception types raised across the package."""


class SkgError(Exception):
    """Base class for every error raised by skgraph."""


class FormatError(SkgError, ValueError):
    """A byte stream does not follow the format it claims to be in."""


class MalformedHeaderError(FormatError):
    pass


class TruncatedError(FormatError):
    """The stream ended before the declared payload was complete."""


class UnsupportedMagicError(FormatError):
    pass


class BadMagicError(FormatError):
    pass


class UnsupportedVersionError(FormatError):
    pass


class CountMismatchError(FormatError):
    """Stored node/branch counts contradict the branch-count identity."""


class CorruptTokenError(FormatError):
    pass


class OutOfBoundsWalkError(FormatError):
    """A chain walk left the declared image area."""


class DimensionMismatchError(SkgError, ValueError):
    pass


class DimensionOverflowError(SkgError, ValueError):
    pass


class TooManyAnchorsError(SkgError, ValueError):
    pass


class BackgroundPixelError(SkgError, ValueError):
    pass


class NotThinnedError(SkgError, ValueError):
    pass


class UnsmoothedInputError(SkgError, ValueError):
    pass


class ParityError(SkgError, ValueError):
    pass


class SharpTurnError(SkgError, ValueError):
    """Two consecutive chain steps differ by more than 45 degrees."""

    def __init__(self, position, turn):
        super().__init__(f"turn of {turn * 45} degrees after step {position}")
        self.position = position
        self.turn = turn


class EmptyTrainingError(SkgError, ValueError):
    pass
