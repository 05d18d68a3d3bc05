"""Exception types shared across the package."""


class OffsetTrackError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OffsetTrackError):
    """An argument is outside the domain an operation is defined on."""


class MatchingError(OffsetTrackError):
    """The queried pose is too far from the path to be matched."""


class FeasibilityError(OffsetTrackError):
    """The implement offset is incompatible with the local path curvature.

    Carries the violating curvature in ``curvature``.
    """

    def __init__(self, message, curvature):
        super().__init__(message)
        self.curvature = curvature


class SingularityError(OffsetTrackError):
    """A control-law denominator vanished (osculating-circle center or lever arm)."""


class DegenerateSpeedError(OffsetTrackError):
    """Forward speed is too small for the requested computation."""


class TuningError(OffsetTrackError):
    """Horizon tuning could not produce a result (all grid points failed)."""


class ConfigError(OffsetTrackError):
    """A configuration document violates the schema.

    ``key`` is the dotted key path; ``line`` the best-effort source line.
    """

    def __init__(self, message, key=None, line=None):
        if key is not None:
            message = f"{key}: {message}" if line is None else f"{key} (line {line}): {message}"
        super().__init__(message)
        self.key = key
        self.line = line
