"""Petri-net data model, PNML/JSON parsers, token-game semantics, and replay.

Markings are plain ``{place: count}`` dicts that never store zero counts.
Nets and markings are treated as immutable after construction; every
operation here is a pure function and safe to call concurrently.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvariantViolation,
    MalformedDocument,
    NotEnabled,
    StateCapExceeded,
    UnknownPlace,
)

Marking = dict[str, int]

INVISIBLE_PREFIX = "INVISIBLE"

DEFAULT_REPLAY_CAP = 100_000


@dataclass(frozen=True)
class Transition:
    id: str
    label: str
    visible: bool = True


@dataclass(frozen=True)
class PetriNet:
    """An ordinary (arc weight 1) Petri net with one initial token and a sink place.

    ``arcs`` are directed ``(source, target)`` pairs, each connecting a place
    to a transition or a transition to a place. The net is validated on
    construction; invalid structure raises :class:`InvariantViolation` naming
    the offending element.
    """

    places: frozenset[str]
    transitions: tuple[Transition, ...]
    arcs: frozenset[tuple[str, str]]
    initial_marking: Marking
    final_place: str

    _by_id: dict = field(init=False, repr=False, compare=False, default=None)
    _inputs: dict = field(init=False, repr=False, compare=False, default=None)
    _outputs: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        self._validate()
        by_id = {t.id: t for t in self.transitions}
        inputs: dict[str, list[str]] = {t.id: [] for t in self.transitions}
        outputs: dict[str, list[str]] = {t.id: [] for t in self.transitions}
        for src, dst in sorted(self.arcs):
            if src in by_id:
                outputs[src].append(dst)
            else:
                inputs[dst].append(src)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_inputs", {k: tuple(v) for k, v in inputs.items()})
        object.__setattr__(self, "_outputs", {k: tuple(v) for k, v in outputs.items()})

    def _validate(self) -> None:
        t_ids = [t.id for t in self.transitions]
        for tid in t_ids:
            if t_ids.count(tid) > 1:
                raise InvariantViolation(f"duplicate transition id {tid!r}")
            if tid in self.places:
                raise InvariantViolation(f"id {tid!r} used for both a place and a transition")
        t_set = set(t_ids)
        for src, dst in self.arcs:
            if src in self.places and dst in t_set:
                continue
            if src in t_set and dst in self.places:
                continue
            bad = src if src not in self.places and src not in t_set else dst
            raise InvariantViolation(f"arc ({src!r} -> {dst!r}) references unknown node {bad!r}")
        labels = [t.label for t in self.transitions if t.visible]
        for lab in labels:
            if labels.count(lab) > 1:
                raise InvariantViolation(f"duplicate visible transition label {lab!r}")
        for p, n in self.initial_marking.items():
            if p not in self.places:
                raise InvariantViolation(f"initial marking names unknown place {p!r}")
            if n < 0:
                raise InvariantViolation(f"negative token count at {p!r}")
        if sum(self.initial_marking.values()) != 1:
            raise InvariantViolation(
                f"initial marking must hold exactly one token, got {sum(self.initial_marking.values())}"
            )
        start = self.initial_place
        if any(dst == start for _, dst in self.arcs):
            raise InvariantViolation(f"initial place {start!r} has incoming arcs")
        if self.final_place not in self.places:
            raise InvariantViolation(f"final place {self.final_place!r} is not a place")
        if any(src == self.final_place for src, _ in self.arcs):
            raise InvariantViolation(f"final place {self.final_place!r} has outgoing arcs")

    @property
    def initial_place(self) -> str:
        return next(p for p, n in self.initial_marking.items() if n > 0)

    def transition(self, tid: str) -> Transition:
        return self._by_id[tid]

    def inputs(self, tid: str) -> tuple[str, ...]:
        return self._inputs[tid]

    def outputs(self, tid: str) -> tuple[str, ...]:
        return self._outputs[tid]

    @property
    def invisible_labels(self) -> frozenset[str]:
        return frozenset(t.label for t in self.transitions if not t.visible)


def enabled(net: PetriNet, marking: Mapping[str, int]) -> list[str]:
    """Transition ids enabled at ``marking``, sorted by id for reproducibility."""
    for p in marking:
        if p not in net.places:
            raise UnknownPlace(f"marking references unknown place {p!r}")
    out = []
    for t in net.transitions:
        if all(marking.get(p, 0) >= 1 for p in net.inputs(t.id)):
            out.append(t.id)
    out.sort()
    return out


def fire(net: PetriNet, marking: Mapping[str, int], tid: str) -> Marking:
    """Fire ``tid``, returning the successor marking. The input is not mutated."""
    if tid not in net._by_id or any(marking.get(p, 0) < 1 for p in net.inputs(tid)):
        raise NotEnabled(f"transition {tid!r} is not enabled")
    new: Marking = dict(marking)
    for p in net.inputs(tid):
        new[p] -= 1
        if new[p] == 0:
            del new[p]
    for p in net.outputs(tid):
        new[p] = new.get(p, 0) + 1
    return new


def _marking_key(marking: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((p, n) for p, n in marking.items() if n))


def replay(
    net: PetriNet,
    activities: Sequence[str],
    *,
    state_cap: int = DEFAULT_REPLAY_CAP,
) -> bool:
    """Decide whether ``activities`` is a valid visible run of the net.

    True iff some firing sequence from the initial marking reaches exactly
    one token on the final place while its visible-label projection equals
    ``activities``. Invisible transitions may interleave freely. The search
    is breadth-first over (marking, position) states and raises
    :class:`StateCapExceeded` once ``state_cap`` states have been expanded
    without a decision.
    """
    target = _marking_key({net.final_place: 1})
    start = (_marking_key(net.initial_marking), 0)
    seen = {start}
    queue = deque([start])
    expanded = 0
    while queue:
        key, idx = queue.popleft()
        if idx == len(activities) and key == target:
            return True
        expanded += 1
        if expanded > state_cap:
            raise StateCapExceeded(f"replay exceeded cap of {state_cap} states")
        marking = dict(key)
        for tid in enabled(net, marking):
            t = net.transition(tid)
            if t.visible:
                if idx >= len(activities) or t.label != activities[idx]:
                    continue
                succ = (_marking_key(fire(net, marking, tid)), idx + 1)
            else:
                succ = (_marking_key(fire(net, marking, tid)), idx)
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return False


# --- parsing ---


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _text_of(elem: ET.Element, name: str) -> str | None:
    for child in elem.iter():
        if _local(child.tag) == name:
            for sub in child.iter():
                if _local(sub.tag) == "text" and sub.text is not None:
                    return sub.text.strip()
    return None


def _is_marked_invisible(trans_elem: ET.Element) -> bool:
    # ProM-style toolspecific tags: activity="$invisible$" attribute or child.
    for child in trans_elem.iter():
        if _local(child.tag) != "toolspecific":
            continue
        if child.attrib.get("activity", "").strip() == "$invisible$":
            return True
        for sub in child.iter():
            if _local(sub.tag) == "activity" and (sub.text or "").strip() == "$invisible$":
                return True
    return False


def parse_pnml(document: str) -> PetriNet:
    """Parse a PNML document into a validated net.

    Supported subset: one ``net`` element, optional ``page`` nesting,
    ``place`` (optional ``initialMarking``), ``transition`` (``name`` text,
    optional ``toolspecific`` invisibility tag), ``arc`` with ``source`` and
    ``target`` attributes. Arc inscriptions other than weight 1 are rejected.
    The final place is the unique place without outgoing arcs.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not well-formed XML: {exc}") from exc

    nets = [e for e in root.iter() if _local(e.tag) == "net"]
    if _local(root.tag) == "net":
        nets = [root]
    if len(nets) != 1:
        raise MalformedDocument(f"expected exactly one <net>, found {len(nets)}")
    net_elem = nets[0]

    places: list[str] = []
    marking: Marking = {}
    transitions: list[Transition] = []
    arcs: list[tuple[str, str]] = []

    for elem in net_elem.iter():
        kind = _local(elem.tag)
        if kind == "place":
            pid = elem.attrib.get("id")
            if not pid:
                raise MalformedDocument("<place> without id attribute")
            places.append(pid)
            text = _text_of(elem, "initialMarking")
            if text is not None:
                try:
                    tokens = int(text)
                except ValueError:
                    raise MalformedDocument(f"place {pid!r}: non-integer initial marking {text!r}")
                if tokens:
                    marking[pid] = tokens
        elif kind == "transition":
            tid = elem.attrib.get("id")
            if not tid:
                raise MalformedDocument("<transition> without id attribute")
            label = _text_of(elem, "name") or tid
            visible = not _is_marked_invisible(elem) and not label.startswith(INVISIBLE_PREFIX)
            transitions.append(Transition(id=tid, label=label, visible=visible))
        elif kind == "arc":
            src, dst = elem.attrib.get("source"), elem.attrib.get("target")
            if not src or not dst:
                raise MalformedDocument(f"arc {elem.attrib.get('id', '?')!r} lacks source/target")
            weight = _text_of(elem, "inscription")
            if weight is not None and weight not in ("", "1"):
                raise InvariantViolation(
                    f"arc ({src!r} -> {dst!r}) has weight {weight!r}; only ordinary nets are supported"
                )
            arcs.append((src, dst))

    sources = {src for src, _ in arcs}
    sinks = [p for p in places if p not in sources]
    if len(sinks) != 1:
        raise InvariantViolation(
            f"expected exactly one place without outgoing arcs, found {sinks!r}"
        )
    return PetriNet(
        places=frozenset(places),
        transitions=tuple(transitions),
        arcs=frozenset(arcs),
        initial_marking=marking,
        final_place=sinks[0],
    )


def parse_net_json(document: str) -> PetriNet:
    """Parse the compact JSON net format (see :func:`render_net_json`)."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedDocument("top-level JSON value must be an object")
    for key in ("places", "transitions", "arcs", "initial", "final"):
        if key not in data:
            raise MalformedDocument(f"missing key {key!r}")
    try:
        transitions = tuple(
            Transition(id=t["id"], label=t["label"], visible=bool(t.get("visible", True)))
            for t in data["transitions"]
        )
        arcs = frozenset((str(a[0]), str(a[1])) for a in data["arcs"])
        places = frozenset(str(p) for p in data["places"])
    except (TypeError, KeyError, IndexError) as exc:
        raise MalformedDocument(f"malformed net JSON: {exc}") from exc
    net = PetriNet(
        places=places,
        transitions=transitions,
        arcs=arcs,
        initial_marking={str(data["initial"]): 1},
        final_place=str(data["final"]),
    )
    return net


def render_net_json(net: PetriNet) -> str:
    """Serialize a net to the JSON format; round-trips through parse_net_json."""
    obj = {
        "places": sorted(net.places),
        "transitions": [
            {"id": t.id, "label": t.label, "visible": t.visible} for t in net.transitions
        ],
        "arcs": sorted([list(a) for a in net.arcs]),
        "initial": net.initial_place,
        "final": net.final_place,
    }
    return json.dumps(obj, indent=2)
