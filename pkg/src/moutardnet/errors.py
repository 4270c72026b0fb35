"""Exception hierarchy shared by all modules."""


class MoutardError(Exception):
    """Base class for all errors raised by moutardnet."""


class DimensionError(MoutardError, ValueError):
    """Vectors or fields do not share an ambient dimension."""


class BoundaryError(MoutardError, IndexError):
    """A lattice index (or one of its shifts) falls outside the box."""

    def __init__(self, index, message=None):
        self.index = tuple(int(i) for i in index)
        super().__init__(message or f"index {self.index} is outside the lattice box")


class PreconditionError(MoutardError, ValueError):
    """Input data violate a stated precondition (off-quadric point, non-unit normal, ...)."""


class SingularConfigurationError(MoutardError):
    """A denominator of a propagation formula vanishes.

    ``position`` is the lattice position (base vertex of the face or cube) where
    it happened, when known.
    """

    def __init__(self, message, position=None):
        self.position = None if position is None else tuple(int(i) for i in position)
        if self.position is not None:
            message = f"{message} (at {self.position})"
        super().__init__(message)


class GeometryError(MoutardError):
    """The geometric object asked for does not exist (no common sphere, non-concircular points)."""


class DegenerateConfigurationError(GeometryError):
    """Coincident or otherwise degenerate defining points."""


class NonUniqueError(GeometryError):
    """The requested object exists but is not unique."""


class GaugeClosureError(MoutardError):
    """Gauge propagation around a vertex does not close: the net is not a Moutard net.

    ``position`` is the base vertex of the face where the mismatch was found.
    """

    def __init__(self, message, position=None):
        self.position = None if position is None else tuple(int(i) for i in position)
        if self.position is not None:
            message = f"{message} (at face {self.position})"
        super().__init__(message)


class ClosureError(MoutardError):
    """A discrete one-form that should be closed is not."""

    def __init__(self, message, position=None):
        self.position = None if position is None else tuple(int(i) for i in position)
        super().__init__(message)


class InternalConsistencyError(MoutardError):
    """Two routes that must agree by a theorem disagree; indicates a bug."""


class NetFormatError(MoutardError):
    """A net document is malformed."""


class UnsupportedVersionError(NetFormatError):
    """A net document carries a format version this library cannot read."""


class TouchingConfigurationError(PreconditionError):
    """Spheres do not satisfy the touching pattern a face completion requires."""
