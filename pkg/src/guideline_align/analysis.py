"""Per-case, per-stage conformance reports and pre/post summary statistics.

A report row aligns one recorded case (abbreviated) against every sequence
of the normative log and keeps the maximum-identity match, for the whole
process and for each stage slice. Summaries aggregate unweighted means per
round and per-student improvement deltas (positive = better for both
identity and duration).
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .align import BestMatch, ScoreParams, best_match, pair_from_gapped
from .errors import GuidelineAlignError, MissingTimestamp
from .eventlog import EventLog, StageMap, Trace, abbreviate, duration, stage_slice


@dataclass(frozen=True)
class StageResult:
    identity: float
    best: BestMatch | None
    duration_min: float | None
    stage_missing: bool


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    round: str | None
    whole_identity: float
    whole_best: BestMatch
    duration_min: float | None
    per_stage: dict  # stage id -> StageResult

    def student(self) -> str:
        """Case id with a trailing round suffix removed."""
        if self.round and self.case_id.endswith(f"_{self.round}"):
            return self.case_id[: -(len(self.round) + 1)]
        return self.case_id


@dataclass(frozen=True)
class Improvement:
    student: str
    identity_gain: float
    duration_drop: float | None


@dataclass(frozen=True)
class SummaryStats:
    mean_duration: dict  # round -> minutes | None
    mean_identity: dict  # round -> percent | None
    stage_mean_identity: dict  # stage -> {round: percent | None}
    stage_mean_duration: dict  # stage -> {round: minutes | None}
    improvements: tuple[Improvement, ...]
    incomplete_students: tuple[str, ...]

    @property
    def mean_identity_gain(self) -> float | None:
        gains = [imp.identity_gain for imp in self.improvements]
        return sum(gains) / len(gains) if gains else None


def _trace_duration(trace: Trace) -> float | None:
    try:
        return duration(trace)
    except MissingTimestamp:
        return None


def _case_result(
    trace: Trace,
    norm_seqs: Sequence[tuple[str, ...]],
    norm_stage_seqs: Mapping[int, Sequence[tuple[str, ...]]],
    stage_map: StageMap,
    params: ScoreParams,
) -> CaseResult:
    whole_best = best_match(abbreviate(trace, stage_map), norm_seqs, params)
    per_stage: dict[int, StageResult] = {}
    for stage in stage_map.stages:
        piece = stage_slice(trace, stage_map, stage)
        if not piece.events:
            per_stage[stage] = StageResult(
                identity=0.0, best=None, duration_min=None, stage_missing=True
            )
            continue
        best = best_match(abbreviate(piece, stage_map), norm_stage_seqs[stage], params)
        per_stage[stage] = StageResult(
            identity=best.aligned.identity,
            best=best,
            duration_min=_trace_duration(piece),
            stage_missing=False,
        )
    return CaseResult(
        case_id=trace.case_id,
        round=trace.round,
        whole_identity=whole_best.aligned.identity,
        whole_best=whole_best,
        duration_min=_trace_duration(trace),
        per_stage=per_stage,
    )


def conformance_report(
    student_log: EventLog,
    norm_log: EventLog,
    stage_map: StageMap,
    params: ScoreParams = ScoreParams(),
    *,
    workers: int = 1,
) -> list[CaseResult]:
    """Best-match identities and durations for every case, whole and per stage.

    The normative log is abbreviated and stage-sliced once; cases are then
    independent, so ``workers`` > 1 may evaluate them on a thread pool with
    identical output.
    """
    norm_seqs = [abbreviate(t, stage_map) for t in norm_log.traces]
    norm_stage_seqs = {
        stage: [abbreviate(stage_slice(t, stage_map, stage), stage_map) for t in norm_log.traces]
        for stage in stage_map.stages
    }

    def one(trace: Trace) -> CaseResult:
        try:
            return _case_result(trace, norm_seqs, norm_stage_seqs, stage_map, params)
        except GuidelineAlignError as exc:
            raise type(exc)(f"case {trace.case_id!r}: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, student_log.traces))
    return [one(t) for t in student_log.traces]


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def summarize(results: Sequence[CaseResult]) -> SummaryStats:
    """Arithmetic means per round and per stage, plus per-student deltas.

    Students lacking one of the two rounds are flagged rather than rejected;
    their deltas are omitted. The output is invariant under permutation of
    the input.
    """
    if not results:
        raise ValueError("summarize requires at least one case result")
    stages = sorted({s for r in results for s in r.per_stage})
    rounds = ("pre", "post")

    by_round = {rnd: [r for r in results if r.round == rnd] for rnd in rounds}
    mean_identity = {rnd: _mean([r.whole_identity for r in by_round[rnd]]) for rnd in rounds}
    mean_duration = {
        rnd: _mean([r.duration_min for r in by_round[rnd] if r.duration_min is not None])
        for rnd in rounds
    }
    stage_mean_identity = {
        stage: {rnd: _mean([r.per_stage[stage].identity for r in by_round[rnd]]) for rnd in rounds}
        for stage in stages
    }
    stage_mean_duration = {
        stage: {
            rnd: _mean(
                [
                    r.per_stage[stage].duration_min
                    for r in by_round[rnd]
                    if r.per_stage[stage].duration_min is not None
                ]
            )
            for rnd in rounds
        }
        for stage in stages
    }

    paired: dict[str, dict[str, CaseResult]] = {}
    for result in results:
        if result.round in rounds:
            paired.setdefault(result.student(), {})[result.round] = result
    improvements: list[Improvement] = []
    incomplete: list[str] = []
    for student in sorted(paired, key=str):
        have = paired[student]
        if len(have) < 2:
            incomplete.append(student)
            continue
        pre, post = have["pre"], have["post"]
        drop = (
            pre.duration_min - post.duration_min
            if pre.duration_min is not None and post.duration_min is not None
            else None
        )
        improvements.append(
            Improvement(
                student=student,
                identity_gain=post.whole_identity - pre.whole_identity,
                duration_drop=drop,
            )
        )
    return SummaryStats(
        mean_duration=mean_duration,
        mean_identity=mean_identity,
        stage_mean_identity=stage_mean_identity,
        stage_mean_duration=stage_mean_duration,
        improvements=tuple(improvements),
        incomplete_students=tuple(incomplete),
    )


# --- serialization ---


def _best_to_dict(best: BestMatch | None, case_id: str) -> dict | None:
    if best is None:
        return None
    return best.aligned.to_json_dict(case_id=case_id, normative_index=best.normative_index)


def _best_from_dict(obj: dict | None, params: ScoreParams) -> BestMatch | None:
    if obj is None:
        return None
    pair = pair_from_gapped(obj["s1"], obj["s2"], params)
    return BestMatch(normative_index=obj["normative_index"], aligned=pair)


def report_to_dict(results: Sequence[CaseResult], summary: SummaryStats | None = None) -> dict:
    """Nested per-case/per-stage report structure for the JSON interface."""
    cases = []
    for r in results:
        cases.append(
            {
                "case_id": r.case_id,
                "round": r.round,
                "whole": {
                    "identity": r.whole_identity,
                    "duration_min": r.duration_min,
                    "best": _best_to_dict(r.whole_best, r.case_id),
                },
                "stages": {
                    str(stage): {
                        "identity": sr.identity,
                        "duration_min": sr.duration_min,
                        "stage_missing": sr.stage_missing,
                        "best": _best_to_dict(sr.best, r.case_id),
                    }
                    for stage, sr in sorted(r.per_stage.items())
                },
            }
        )
    out = {"cases": cases}
    if summary is not None:
        out["summary"] = {
            "mean_duration": summary.mean_duration,
            "mean_identity": summary.mean_identity,
            "stage_mean_identity": {str(k): v for k, v in summary.stage_mean_identity.items()},
            "stage_mean_duration": {str(k): v for k, v in summary.stage_mean_duration.items()},
            "mean_identity_gain": summary.mean_identity_gain,
            "improvements": [
                {
                    "student": imp.student,
                    "identity_gain": imp.identity_gain,
                    "duration_drop": imp.duration_drop,
                }
                for imp in summary.improvements
            ],
            "incomplete_students": list(summary.incomplete_students),
        }
    return out


def report_from_dict(data: dict, params: ScoreParams = ScoreParams()) -> list[CaseResult]:
    """Rebuild case results from the JSON report structure."""
    results = []
    for case in data["cases"]:
        whole = case["whole"]
        per_stage = {
            int(stage): StageResult(
                identity=sr["identity"],
                best=_best_from_dict(sr["best"], params),
                duration_min=sr["duration_min"],
                stage_missing=sr["stage_missing"],
            )
            for stage, sr in case["stages"].items()
        }
        results.append(
            CaseResult(
                case_id=case["case_id"],
                round=case["round"],
                whole_identity=whole["identity"],
                whole_best=_best_from_dict(whole["best"], params),
                duration_min=whole["duration_min"],
                per_stage=per_stage,
            )
        )
    return results


def summary_csv(summary: SummaryStats) -> str:
    """One row per (metric, round, whole|stage)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "round", "scope", "value"])

    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.6g}"

    for rnd in ("pre", "post"):
        writer.writerow(["mean_identity", rnd, "whole", fmt(summary.mean_identity[rnd])])
        for stage in sorted(summary.stage_mean_identity):
            writer.writerow(
                ["mean_identity", rnd, f"S{stage}", fmt(summary.stage_mean_identity[stage][rnd])]
            )
    for rnd in ("pre", "post"):
        writer.writerow(["mean_duration_min", rnd, "whole", fmt(summary.mean_duration[rnd])])
        for stage in sorted(summary.stage_mean_duration):
            writer.writerow(
                ["mean_duration_min", rnd, f"S{stage}", fmt(summary.stage_mean_duration[stage][rnd])]
            )
    return buf.getvalue()
