"""Event-log model, CSV ingestion, stage mapping, stage slicing, and durations.

The log CSV schema is fixed: ``case_id,resource,round,activity,start,end``
with ISO 8601 timestamps and a mandatory header. Rows with a non-empty
``case_id`` are grouped by it directly (simulated logs); rows without one
are grouped by ``(resource, round)`` and the case id is synthesized, using
the resource-to-student mapping when supplied.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateAbbreviation,
    DuplicateActivity,
    EmptyLog,
    InvariantViolation,
    MalformedRow,
    MissingTimestamp,
    UnknownActivity,
    UnknownStage,
)

LOG_COLUMNS = ("case_id", "resource", "round", "activity", "start", "end")
ROUNDS = ("pre", "post")


@dataclass(frozen=True)
class Event:
    activity: str
    start: datetime | None = None
    end: datetime | None = None


@dataclass(frozen=True)
class Trace:
    case_id: str
    resource: str = ""
    round: str | None = None
    events: tuple[Event, ...] = ()

    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...] = ()

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(a for t in self.traces for a in t.activities())

    @property
    def n_seq(self) -> int:
        return len(self.traces)

    @property
    def n_act(self) -> int:
        return len(self.alphabet)

    def sequences(self) -> list[tuple[str, ...]]:
        return [t.activities() for t in self.traces]


@dataclass(frozen=True)
class StageMap:
    """Total mapping activity -> (stage id, abbreviation).

    Stage ids must form a contiguous range 1..m and abbreviations must be
    unique across activities.
    """

    entries: dict  # activity -> (int stage, str abbreviation)

    def __post_init__(self) -> None:
        seen_abbrevs: dict[str, str] = {}
        stages = set()
        for activity, (stage, abbrev) in self.entries.items():
            if abbrev in seen_abbrevs:
                raise DuplicateAbbreviation(
                    f"abbreviation {abbrev!r} used for both {seen_abbrevs[abbrev]!r} and {activity!r}"
                )
            seen_abbrevs[abbrev] = activity
            stages.add(stage)
        if stages and stages != set(range(1, len(stages) + 1)):
            raise InvariantViolation(f"stage ids must form 1..m, got {sorted(stages)}")

    @property
    def n_stages(self) -> int:
        return len({s for s, _ in self.entries.values()})

    @property
    def stages(self) -> range:
        return range(1, self.n_stages + 1)

    def stage_of(self, activity: str) -> int:
        try:
            return self.entries[activity][0]
        except KeyError:
            raise UnknownActivity(f"activity {activity!r} not in stage map") from None

    def abbrev_of(self, activity: str) -> str:
        try:
            return self.entries[activity][1]
        except KeyError:
            raise UnknownActivity(f"activity {activity!r} not in stage map") from None


def parse_timestamp(text: str) -> datetime:
    cleaned = text.strip()
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    return datetime.fromisoformat(cleaned)


def _reader(document: str) -> csv.reader:
    return csv.reader(io.StringIO(document))


def load_log_csv(document: str, resource_map: Mapping[str, str] | None = None) -> EventLog:
    """Load an event-log CSV into an EventLog.

    Events of one case are ordered by start timestamp with input order
    breaking ties; cases appear in order of first occurrence.
    """
    rows = list(_reader(document))
    if not rows:
        raise EmptyLog("document is empty")
    header = tuple(h.strip() for h in rows[0])
    if header != LOG_COLUMNS:
        raise MalformedRow(f"row 1: expected header {','.join(LOG_COLUMNS)}, got {','.join(header)}")

    # group key -> (case_id, resource, round, [(input_index, Event)])
    groups: dict[tuple, list] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(LOG_COLUMNS):
            raise MalformedRow(f"row {lineno}: expected {len(LOG_COLUMNS)} fields, got {len(row)}")
        case_id, resource, round_, activity, start_s, end_s = (cell.strip() for cell in row)
        if not activity:
            raise MalformedRow(f"row {lineno}: missing activity")
        round_ = round_.lower()
        if round_ and round_ not in ROUNDS:
            raise MalformedRow(f"row {lineno}: round must be pre or post, got {round_!r}")
        try:
            start = parse_timestamp(start_s) if start_s else None
            end = parse_timestamp(end_s) if end_s else None
        except ValueError as exc:
            raise MalformedRow(f"row {lineno}: bad timestamp ({exc})") from exc
        if start is not None and end is not None and start > end:
            raise MalformedRow(f"row {lineno}: start is after end")

        if case_id:
            key = ("case", case_id)
        elif resource:
            key = ("resource", resource, round_)
            if resource_map is not None and resource not in resource_map:
                raise MalformedRow(f"row {lineno}: resource {resource!r} not in resource map")
            student = resource_map[resource] if resource_map else resource
            case_id = f"{student}_{round_}" if round_ else student
        else:
            raise MalformedRow(f"row {lineno}: neither case_id nor resource given")

        entry = groups.setdefault(key, [case_id, resource, round_ or None, []])
        entry[3].append((lineno, Event(activity=activity, start=start, end=end)))

    if not groups:
        raise EmptyLog("document has a header but no event rows")

    traces = []
    for case_id, resource, round_, events in groups.values():
        # flag-first key keeps naive and aware timestamps from being compared
        events.sort(key=lambda item: (item[1].start is not None, item[1].start or datetime.min, item[0]))
        traces.append(
            Trace(case_id=case_id, resource=resource, round=round_, events=tuple(e for _, e in events))
        )
    return EventLog(traces=tuple(traces))


def to_csv(log: EventLog) -> str:
    """Serialize an EventLog back to the CSV schema; preserves the event multiset."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LOG_COLUMNS)
    for trace in log.traces:
        for event in trace.events:
            writer.writerow(
                [
                    trace.case_id,
                    trace.resource,
                    trace.round or "",
                    event.activity,
                    event.start.isoformat() if event.start else "",
                    event.end.isoformat() if event.end else "",
                ]
            )
    return buf.getvalue()


def load_resource_map(document: str) -> dict[str, str]:
    """Load the resource-to-student mapping CSV (columns ``resource,student``)."""
    rows = list(_reader(document))
    if not rows or tuple(h.strip() for h in rows[0]) != ("resource", "student"):
        raise MalformedRow("row 1: expected header resource,student")
    mapping: dict[str, str] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise MalformedRow(f"row {lineno}: expected 2 fields")
        resource, student = row[0].strip(), row[1].strip()
        if resource in mapping:
            raise MalformedRow(f"row {lineno}: duplicate resource {resource!r}")
        mapping[resource] = student
    return mapping


def load_stage_map(document: str) -> StageMap:
    """Load a stage map CSV (columns ``activity,stage,abbreviation``).

    Stage values may be given as ``3`` or ``S3``.
    """
    rows = list(_reader(document))
    if not rows or tuple(h.strip() for h in rows[0]) != ("activity", "stage", "abbreviation"):
        raise MalformedRow("row 1: expected header activity,stage,abbreviation")
    entries: dict[str, tuple[int, str]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise MalformedRow(f"row {lineno}: expected 3 fields, got {len(row)}")
        activity, stage_s, abbrev = (c.strip() for c in row)
        if activity in entries:
            raise DuplicateActivity(f"row {lineno}: activity {activity!r} already mapped")
        if stage_s.upper().startswith("S"):
            stage_s = stage_s[1:]
        try:
            stage = int(stage_s)
        except ValueError:
            raise MalformedRow(f"row {lineno}: bad stage {row[1]!r}") from None
        entries[activity] = (stage, abbrev)
    return StageMap(entries=entries)


def abbreviate(trace: Trace | Sequence[str], stage_map: StageMap) -> tuple[str, ...]:
    """Positional mapping of a trace's activities to their abbreviations."""
    activities = trace.activities() if isinstance(trace, Trace) else tuple(trace)
    out = []
    for pos, activity in enumerate(activities):
        try:
            out.append(stage_map.entries[activity][1])
        except KeyError:
            raise UnknownActivity(f"activity {activity!r} at position {pos} not in stage map") from None
    return tuple(out)


def stage_slice(trace: Trace, stage_map: StageMap, stage: int) -> Trace:
    """Contiguous slice of ``trace`` between its first and last event of ``stage``.

    Events of other stages inside the window are retained. A trace with no
    event of the stage yields an empty trace (the stage-missing flag for
    downstream reports).
    """
    if stage not in stage_map.stages:
        raise UnknownStage(f"stage {stage!r} not declared in stage map (1..{stage_map.n_stages})")
    hits = [
        i
        for i, e in enumerate(trace.events)
        if stage_map.entries.get(e.activity, (None,))[0] == stage
    ]
    events = trace.events[hits[0] : hits[-1] + 1] if hits else ()
    return Trace(case_id=trace.case_id, resource=trace.resource, round=trace.round, events=events)


def stage_log(log: EventLog, stage_map: StageMap, stage: int) -> EventLog:
    """Apply :func:`stage_slice` to every trace of the log."""
    return EventLog(traces=tuple(stage_slice(t, stage_map, stage) for t in log.traces))


def duration(trace: Trace) -> float:
    """Minutes from the first event's start to the last event's end."""
    if not trace.events:
        raise MissingTimestamp(f"case {trace.case_id!r}: empty trace has no duration")
    start = trace.events[0].start
    end = trace.events[-1].end
    if start is None or end is None:
        raise MissingTimestamp(f"case {trace.case_id!r}: missing start or end timestamp")
    return (end - start).total_seconds() / 60.0
