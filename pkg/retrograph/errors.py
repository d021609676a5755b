"""Exceptions raised by retrograph.

Everything derives from ValueError so callers that only care about
"bad input" can catch that.
"""


class RetroGraphError(ValueError):
    """Base class for all retrograph errors."""


class InvalidTime(RetroGraphError):
    """A time is not a finite integer (or NOW where NOW is not allowed)."""


class InvalidVertex(RetroGraphError):
    """A vertex id is outside [0, n) or an edge is a self-loop."""


class IllegalOperation(RetroGraphError):
    """A retroactive operation would leave the update sequence illegal."""


class DuplicateTime(IllegalOperation):
    """An update already exists at the requested time."""


class IllegalInsert(IllegalOperation):
    """The pair is alive at the insertion time, or has a later lifespan."""


class IllegalDelete(IllegalOperation):
    """No alive edge of the pair at that time, or it is deleted later."""


class NoUpdateAtTime(IllegalOperation):
    """Cancel was issued at a time that holds no update."""


class WouldOrphanDelete(IllegalOperation):
    """Cancelling an Insert whose matching Delete still exists."""


class OverlappingLifespan(IllegalOperation):
    """Cancelling a Delete would make two lifespans of one pair overlap."""


class UnsupportedUpdate(IllegalOperation):
    """The structure does not accept this kind of update (e.g. Delete when incremental)."""


class UnknownEdge(RetroGraphError):
    """An engine edge id does not exist."""


class NotConnected(RetroGraphError):
    """A path query was issued for two vertices in different trees."""


class WeightOutOfRange(RetroGraphError):
    """An edge weight lies outside [1, W]."""


class MisalignedLifespan(RetroGraphError):
    """A lifespan endpoint does not coincide with a leaf boundary."""


class UnsupportedQuery(RetroGraphError):
    """A query kind is not answered by the selected structure."""


class UnknownStructure(RetroGraphError):
    """The requested structure kind is not registered."""


class TraceError(RetroGraphError):
    """A trace file could not be loaded.

    Attributes:
        line: 1-based line number of the offending directive
    """

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TraceSyntaxError(TraceError):
    """A directive does not follow the trace grammar."""


class TraceLegalityError(TraceError):
    """A directive is well-formed but its operation is illegal."""
