"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ValidationError and subclasses are
user-input problems (exit 1), LoadError and plain OSError are I/O problems
(exit 2).
"""


class SynpartError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SynpartError, ValueError):
    """A parameter or input value violates its contract."""


class BoundsError(ValidationError):
    """A world-space point falls outside the volume along a named axis."""

    def __init__(self, axis: str, value: float, message: str | None = None):
        self.axis = axis
        self.value = value
        super().__init__(message or f"point outside volume on axis {axis}: {value} nm")


class GeometryMismatchError(ValidationError):
    """Two volumes that must share a geometry do not."""


class ConfigError(ValidationError):
    """An offset set or parameter combination is unusable as configured."""


class BackgroundEndpointError(ValidationError):
    """An annotation endpoint sits on the background label (0)."""

    def __init__(self, point, annotation_id=None):
        self.point = tuple(point)
        self.annotation_id = annotation_id
        where = f"annotation {annotation_id}" if annotation_id is not None else "point"
        super().__init__(f"{where} endpoint {self.point} lies on background label 0")


class LoadError(SynpartError, OSError):
    """A container or text file is missing, malformed, or inconsistent."""


class GenerationError(SynpartError, RuntimeError):
    """The synthetic generator could not satisfy the requested spec."""

    def __init__(self, requested: int, achieved: int, message: str | None = None):
        self.requested = requested
        self.achieved = achieved
        super().__init__(
            message
            or f"could only place {achieved} of {requested} synapses within the attempt budget"
        )
