import json
import re
from datetime import datetime
from pathlib import Path

import pytest

from guideline_align.eventlog import Event, EventLog, StageMap, Trace, load_stage_map
from guideline_align.petri import parse_net_json

DATA_DIR = Path(__file__).parent / "data"
PKG_DATA = Path(__file__).parents[1] / "src" / "guideline_align" / "data"


def net_json(places, transitions, arcs, initial, final) -> str:
    """Compact JSON net document from python structures.

    ``transitions`` entries are (id, label) or (id, label, visible).
    """
    t_objs = []
    for t in transitions:
        tid, label = t[0], t[1]
        visible = t[2] if len(t) > 2 else True
        t_objs.append({"id": tid, "label": label, "visible": visible})
    return json.dumps(
        {
            "places": list(places),
            "transitions": t_objs,
            "arcs": [list(a) for a in arcs],
            "initial": initial,
            "final": final,
        }
    )


MINIMAL_NET = net_json(["p0", "p1"], [("t0", "a")], [("p0", "t0"), ("t0", "p1")], "p0", "p1")

LINEAR3_NET = net_json(
    ["p0", "p1", "p2", "p3"],
    [("t0", "a"), ("t1", "b"), ("t2", "c")],
    [("p0", "t0"), ("t0", "p1"), ("p1", "t1"), ("t1", "p2"), ("p2", "t2"), ("t2", "p3")],
    "p0",
    "p3",
)

# a then one of b/c
CHOICE_NET = net_json(
    ["p0", "p1", "p2"],
    [("ta", "a"), ("tb", "b"), ("tc", "c")],
    [("p0", "ta"), ("ta", "p1"), ("p1", "tb"), ("tb", "p2"), ("p1", "tc"), ("tc", "p2")],
    "p0",
    "p2",
)

# two transitions racing from the initial place
FORK_NET = net_json(
    ["p0", "p1"],
    [("ta", "a"), ("tb", "b")],
    [("p0", "ta"), ("ta", "p1"), ("p0", "tb"), ("tb", "p1")],
    "p0",
    "p1",
)

# concurrent branches joined at the end
DIAMOND_NET = net_json(
    ["p0", "p1", "p2", "p3", "p4", "p5"],
    [("ta", "a"), ("tb", "b"), ("tc", "c"), ("td", "d")],
    [
        ("p0", "ta"),
        ("ta", "p1"),
        ("ta", "p2"),
        ("p1", "tb"),
        ("tb", "p3"),
        ("p2", "tc"),
        ("tc", "p4"),
        ("p3", "td"),
        ("p4", "td"),
        ("td", "p5"),
    ],
    "p0",
    "p5",
)

# a b (c b)* d
LOOP_NET = net_json(
    ["p0", "p1", "p2", "p3"],
    [("ta", "a"), ("tb", "b"), ("tc", "c"), ("td", "d")],
    [
        ("p0", "ta"),
        ("ta", "p1"),
        ("p1", "tb"),
        ("tb", "p2"),
        ("p2", "tc"),
        ("tc", "p1"),
        ("p2", "td"),
        ("td", "p3"),
    ],
    "p0",
    "p3",
)

INVISIBLE_NET = net_json(
    ["p0", "p1", "p2", "p3"],
    [("ta", "a"), ("tx", "INVISIBLE skip", False), ("tb", "b")],
    [("p0", "ta"), ("ta", "p1"), ("p1", "tx"), ("tx", "p2"), ("p2", "tb"), ("tb", "p3")],
    "p0",
    "p3",
)


@pytest.fixture
def minimal_net():
    return parse_net_json(MINIMAL_NET)


@pytest.fixture
def linear3_net():
    return parse_net_json(LINEAR3_NET)


@pytest.fixture
def choice_net():
    return parse_net_json(CHOICE_NET)


@pytest.fixture
def fork_net():
    return parse_net_json(FORK_NET)


@pytest.fixture
def diamond_net():
    return parse_net_json(DIAMOND_NET)


@pytest.fixture
def loop_net():
    return parse_net_json(LOOP_NET)


@pytest.fixture
def invisible_net():
    return parse_net_json(INVISIBLE_NET)


# --- event-log helpers ---


def make_trace(case_id, activities, start=None, step_min=1.0, round_=None, resource=""):
    """Trace whose events are ``step_min`` minutes apart (instant events)."""
    events = []
    for i, activity in enumerate(activities):
        ts = None
        if start is not None:
            ts = start.fromtimestamp(start.timestamp() + i * step_min * 60)
        events.append(Event(activity=activity, start=ts, end=ts))
    return Trace(case_id=case_id, resource=resource, round=round_, events=tuple(events))


DOCTOR_ACTIVITIES = {
    "a": 1, "b": 1, "c": 1, "d": 1,
    "e": 2, "f": 2, "g": 2,
}


@pytest.fixture
def doctor_stage_map():
    return StageMap(entries={k: (v, k) for k, v in DOCTOR_ACTIVITIES.items()})


@pytest.fixture
def doctor_log():
    return EventLog(
        traces=(
            make_trace("v1", ["a", "b", "c", "e", "g"]),
            make_trace("v2", ["b", "c", "f", "g"]),
            make_trace("v3", ["a", "c", "d", "e", "f", "g"]),
        )
    )


@pytest.fixture(scope="session")
def ccc19_stage_map():
    return load_stage_map((PKG_DATA / "ccc19" / "stages.csv").read_text())


# --- reference alignment corpus ---

_PAIR_HEADER = re.compile(r"^\[(?P<label>[^\]]+)\]$")


def load_reference_corpus():
    """Parse the reference alignments fixture into (label, s1, s2) triples."""
    triples = []
    label, rows = None, []
    for line in (DATA_DIR / "ccc19_reference_alignments.txt").read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _PAIR_HEADER.match(line)
        if m:
            label, rows = m.group("label"), []
            continue
        body = line.split(": [", 1)[1].rstrip("]")
        rows.append(tuple(s.strip() for s in body.split(",")))
        if len(rows) == 2:
            triples.append((label, rows[0], rows[1]))
    return triples


@pytest.fixture(scope="session")
def reference_corpus():
    return load_reference_corpus()
