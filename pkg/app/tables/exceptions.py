class TableError(Exception):
    """
    Base class for errors raised by the open-addressing tables.
    """


class LayoutError(TableError):
    """
    The table parameters do not admit a valid layout (e.g., capacity too small for the requested free fraction).
    """


class TableInvariantError(TableError):
    """
    A structural invariant of a table was violated. This always indicates a bug in the table implementation, never
    bad luck in the probe sequence.
    """


class ArrayFullError(TableError):
    """
    A budget was requested for an array with no free slots.
    """


class TrialAbortedError(TableError):
    """
    An insertion could not complete and the trial it belongs to must be marked failed. Subclasses name the reason.
    """


class ProbeCapExceeded(TrialAbortedError):
    """
    An unbounded probe loop exceeded its configured cap without finding a free slot.
    """


class ExpensiveCaseCapExceeded(ProbeCapExceeded):
    """
    An elastic insertion in the expensive case (uniform probing of a nearly full array) exceeded its probe cap.
    """


class FunnelOverflow(TrialAbortedError):
    """
    A funnel insertion reached the two-choice array and found both of its buckets full.
    """
