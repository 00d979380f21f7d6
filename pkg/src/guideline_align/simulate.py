"""Seeded stochastic simulation of a Petri net into a normative event log.

Each run repeatedly fires a uniformly chosen enabled transition until the
net completes (one token on the final place), the activity cap is hit, or
it deadlocks. Run ``i`` draws from an independent substream: a PCG64
generator seeded with ``numpy.random.SeedSequence(seed, spawn_key=(i,))``.
That derivation is part of the output contract; results are bit-identical
for a fixed (net, config) regardless of execution schedule.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .eventlog import Event, EventLog, Trace
from .petri import INVISIBLE_PREFIX, PetriNet, enabled, fire

DEFAULT_FINAL_ACTIVITY = "Check catheter position"


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_runs: int = 1000
    max_activities: int = 65
    final_activity: str = DEFAULT_FINAL_ACTIVITY
    drop_invisible: bool = True
    deduplicate: bool = True

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.max_activities < 1:
            raise ValueError(f"max_activities must be >= 1, got {self.max_activities}")


class RunOutcome(enum.Enum):
    COMPLETE = "complete"
    TRUNCATED = "truncated"
    DEADLOCKED = "deadlocked"


@dataclass(frozen=True)
class RunResult:
    activities: tuple[str, ...]
    outcome: RunOutcome

    @property
    def complete(self) -> bool:
        return self.outcome is RunOutcome.COMPLETE


@dataclass(frozen=True)
class SimStats:
    """Post-processing discard counters.

    ``discarded_incomplete`` counts runs truncated by the activity cap plus
    complete runs whose last visible activity is not the configured final
    activity; ``discarded_deadlocked`` counts runs that stalled.
    """

    discarded_incomplete: int
    discarded_deadlocked: int
    duplicates_removed: int


@dataclass(frozen=True)
class SimResult:
    raw_runs: tuple[tuple[str, ...], ...]
    kept: EventLog
    stats: SimStats


def substream(seed: int, run_index: int) -> np.random.Generator:
    """The fixed per-run random stream; see the module docstring."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(run_index,))))


def simulate_run(net: PetriNet, max_activities: int, rng: np.random.Generator) -> RunResult:
    """One random walk over the token game, recording all fired labels."""
    final_key = {net.final_place: 1}
    marking = {p: n for p, n in net.initial_marking.items() if n}
    recorded: list[str] = []
    while True:
        if marking == final_key:
            return RunResult(tuple(recorded), RunOutcome.COMPLETE)
        if len(recorded) >= max_activities:
            return RunResult(tuple(recorded), RunOutcome.TRUNCATED)
        choices = enabled(net, marking)
        if not choices:
            return RunResult(tuple(recorded), RunOutcome.DEADLOCKED)
        tid = choices[int(rng.integers(len(choices)))]
        marking = fire(net, marking, tid)
        recorded.append(net.transition(tid).label)


def postprocess(
    runs: Sequence[RunResult],
    cfg: SimConfig,
    invisible_labels: Iterable[str] | None = None,
) -> tuple[EventLog, SimStats]:
    """Filter completed runs, drop invisible labels, and deduplicate.

    Runs must be given in run-index order; kept traces get case ids
    ``sim_<run_index>`` in first-occurrence order. When ``invisible_labels``
    is not given, labels with the ``INVISIBLE`` prefix are treated as
    invisible.
    """
    if invisible_labels is None:
        def is_invisible(label: str) -> bool:
            return label.startswith(INVISIBLE_PREFIX)
    else:
        invisible = frozenset(invisible_labels)

        def is_invisible(label: str) -> bool:
            return label in invisible

    incomplete = deadlocked = duplicates = 0
    seen: set[tuple[str, ...]] = set()
    traces: list[Trace] = []
    for index, run in enumerate(runs):
        if run.outcome is RunOutcome.DEADLOCKED:
            deadlocked += 1
            continue
        visible = tuple(a for a in run.activities if not is_invisible(a))
        if run.outcome is not RunOutcome.COMPLETE or not visible or visible[-1] != cfg.final_activity:
            incomplete += 1
            continue
        sequence = visible if cfg.drop_invisible else run.activities
        if cfg.deduplicate:
            if sequence in seen:
                duplicates += 1
                continue
            seen.add(sequence)
        traces.append(Trace(case_id=f"sim_{index}", events=tuple(Event(activity=a) for a in sequence)))
    stats = SimStats(
        discarded_incomplete=incomplete,
        discarded_deadlocked=deadlocked,
        duplicates_removed=duplicates,
    )
    return EventLog(traces=tuple(traces)), stats


def simulate_log(net: PetriNet, cfg: SimConfig, *, workers: int = 1) -> SimResult:
    """Run ``cfg.n_runs`` independent simulations and post-process them.

    ``workers`` > 1 executes runs on a thread pool; the per-run substreams
    and index-ordered collection make the result identical to a serial run.
    """
    indices = range(cfg.n_runs)

    def one(i: int) -> RunResult:
        return simulate_run(net, cfg.max_activities, substream(cfg.seed, i))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, indices))
    else:
        runs = [one(i) for i in indices]

    kept, stats = postprocess(runs, cfg, invisible_labels=net.invisible_labels)
    return SimResult(raw_runs=tuple(r.activities for r in runs), kept=kept, stats=stats)
