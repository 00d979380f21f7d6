"""Exception hierarchy shared by all modules."""


class GuidelineAlignError(Exception):
    """Base class for every domain error raised by this package."""


# --- net model / parsing ---

class MalformedDocument(GuidelineAlignError):
    """Input document is not well-formed (XML, JSON, or CSV header)."""


class InvariantViolation(GuidelineAlignError):
    """A structural invariant of a model or mapping is violated."""


class UnknownPlace(GuidelineAlignError):
    """A marking references a place that is not part of the net."""


class NotEnabled(GuidelineAlignError):
    """Attempt to fire a transition that is not enabled."""


class StateCapExceeded(GuidelineAlignError):
    """Bounded replay search ran out of budget before deciding."""


# --- event logs ---

class MalformedRow(GuidelineAlignError):
    """A CSV row cannot be parsed; message carries the 1-based row number."""


class EmptyLog(GuidelineAlignError):
    """An event log document contains no traces."""


class DuplicateAbbreviation(GuidelineAlignError):
    pass


class DuplicateActivity(GuidelineAlignError):
    pass


class UnknownActivity(GuidelineAlignError):
    """An activity is missing from the stage map; names activity and position."""


class UnknownStage(GuidelineAlignError):
    pass


class MissingTimestamp(GuidelineAlignError):
    """Duration requested for a trace without the required timestamps."""


# --- alignment ---

class BothGaps(GuidelineAlignError):
    """A position pairs the gap symbol with itself."""


class ReservedSymbol(GuidelineAlignError):
    """An input sequence contains the reserved gap symbol."""


class EmptyAlignment(GuidelineAlignError):
    """Identity requested for a zero-length alignment."""


class EmptyNormativeLog(GuidelineAlignError):
    pass


# --- reporting ---

class MissingRound(GuidelineAlignError):
    """A chart or summary requires both pre and post rounds."""
