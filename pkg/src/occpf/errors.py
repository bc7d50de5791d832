"""Exception hierarchy shared by every occpf module."""


class OccpfError(Exception):
    """Base class for all package errors."""


class ParseError(OccpfError):
    """A scenario file could not be read as JSON."""


class ValidationError(OccpfError):
    """A scenario violates an invariant. The message names the invariant."""


class ParameterError(OccpfError):
    """A parameter set makes a formula undefined (e.g. a zero divisor)."""


class GeometryError(OccpfError):
    """Degenerate geometry, e.g. the viewpoint lies inside an occluder."""


class StateError(OccpfError):
    """A stateful tracker was driven out of order."""


class NumericalError(OccpfError):
    """The integrated state left its finite bounds."""


class DegenerateForce(OccpfError):
    """The net virtual force is too small to define a heading."""
