"""Optimal global pairwise alignment of activity sequences.

The aligner maximizes the summed position score (match reward, gap and
mismatch penalties) over all gapped pairings of the two full sequences,
via the classic quadratic dynamic program. Among equal-scoring recurrence
branches the precedence is diagonal, then up (gap in the second sequence),
then left (gap in the first), which makes the traceback deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    BothGaps,
    EmptyAlignment,
    EmptyNormativeLog,
    InvariantViolation,
    ReservedSymbol,
)
from .eventlog import EventLog

GAP = "-"

_DIAG, _UP, _LEFT = 1, 2, 3


@dataclass(frozen=True)
class ScoreParams:
    """Position scores: match must be positive, gap and mismatch negative."""

    match: float = 1.0
    gap: float = -2.0
    mismatch: float = -2.0

    def __post_init__(self) -> None:
        if not self.match > 0:
            raise ValueError(f"match score must be positive, got {self.match}")
        if not self.gap < 0:
            raise ValueError(f"gap score must be negative, got {self.gap}")
        if not self.mismatch < 0:
            raise ValueError(f"mismatch score must be negative, got {self.mismatch}")


@dataclass(frozen=True)
class DPMatrices:
    """Prefix-score matrix and traceback directions (1 diag, 2 up, 3 left)."""

    scores: np.ndarray
    traceback: np.ndarray


@dataclass(frozen=True)
class AlignedPair:
    """Two gap-padded sequences of equal length with their score and identity.

    Stripping gaps from ``s1``/``s2`` recovers the original inputs; no
    position holds a gap in both sequences. ``identity`` is the percentage
    of positions where both sequences carry the same activity, stored
    unrounded.
    """

    s1: tuple[str, ...]
    s2: tuple[str, ...]
    score: float
    identity: float
    matches: int

    def __len__(self) -> int:
        return len(self.s1)

    def to_json_dict(self, case_id: str | None = None, normative_index: int | None = None) -> dict:
        return {
            "case_id": case_id,
            "normative_index": normative_index,
            "score": self.score,
            "identity": self.identity,
            "matches": self.matches,
            "s1": list(self.s1),
            "s2": list(self.s2),
        }


@dataclass(frozen=True)
class BestMatch:
    normative_index: int
    aligned: AlignedPair


def score_pair(a: str, b: str, params: ScoreParams = ScoreParams()) -> float:
    """Score of one aligned position per the match/gap/mismatch scheme."""
    if a == GAP and b == GAP:
        raise BothGaps("a position may not pair the gap symbol with itself")
    if a == GAP or b == GAP:
        return params.gap
    return params.match if a == b else params.mismatch


def _check_symbols(seq: Sequence[str]) -> None:
    if GAP in seq:
        raise ReservedSymbol(f"input sequences may not contain the reserved gap symbol {GAP!r}")


def _identity_stats(s1: Sequence[str], s2: Sequence[str]) -> tuple[int, float]:
    matches = sum(1 for a, b in zip(s1, s2) if a == b and a != GAP)
    pct = 100.0 * matches / len(s1) if s1 else 0.0
    return matches, pct


def align(
    s1: Sequence[str],
    s2: Sequence[str],
    params: ScoreParams = ScoreParams(),
    *,
    with_matrices: bool = False,
) -> Union[AlignedPair, tuple[AlignedPair, DPMatrices]]:
    """Optimal global alignment of two sequences of opaque symbols.

    Either sequence may be empty. Runs in O(n*m) time and space; both the
    score and the returned gapped pair are deterministic.
    """
    a, b = tuple(s1), tuple(s2)
    _check_symbols(a)
    _check_symbols(b)
    n, m = len(a), len(b)
    match, gap, mismatch = params.match, params.gap, params.mismatch

    scores = [[0.0] * (m + 1) for _ in range(n + 1)]
    trace = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        scores[i][0] = i * gap
        trace[i][0] = _UP
    for j in range(1, m + 1):
        scores[0][j] = j * gap
        trace[0][j] = _LEFT
    for i in range(1, n + 1):
        ai = a[i - 1]
        row, prev = scores[i], scores[i - 1]
        trow = trace[i]
        for j in range(1, m + 1):
            best = prev[j - 1] + (match if ai == b[j - 1] else mismatch)
            t = _DIAG
            up = prev[j] + gap
            if up > best:
                best, t = up, _UP
            left = row[j - 1] + gap
            if left > best:
                best, t = left, _LEFT
            row[j] = best
            trow[j] = t

    out1: list[str] = []
    out2: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        t = trace[i][j]
        if t == _DIAG:
            out1.append(a[i - 1])
            out2.append(b[j - 1])
            i -= 1
            j -= 1
        elif t == _UP:
            out1.append(a[i - 1])
            out2.append(GAP)
            i -= 1
        else:
            out1.append(GAP)
            out2.append(b[j - 1])
            j -= 1
    out1.reverse()
    out2.reverse()

    matches, pct = _identity_stats(out1, out2)
    pair = AlignedPair(
        s1=tuple(out1), s2=tuple(out2), score=scores[n][m], identity=pct, matches=matches
    )
    if with_matrices:
        matrices = DPMatrices(
            scores=np.asarray(scores, dtype=float),
            traceback=np.asarray(trace, dtype=np.int8),
        )
        return pair, matrices
    return pair


def identity(s1: Sequence[str], s2: Sequence[str]) -> float:
    """Percentage of positions where both gapped sequences carry the same activity."""
    if len(s1) != len(s2):
        raise InvariantViolation(f"aligned sequences differ in length: {len(s1)} vs {len(s2)}")
    if len(s1) == 0:
        raise EmptyAlignment("identity of a zero-length alignment is undefined")
    return _identity_stats(tuple(s1), tuple(s2))[1]


def strip_gaps(seq: Sequence[str]) -> tuple[str, ...]:
    return tuple(sym for sym in seq if sym != GAP)


def pair_from_gapped(
    s1: Sequence[str], s2: Sequence[str], params: ScoreParams = ScoreParams()
) -> AlignedPair:
    """Reconstruct an AlignedPair from already-gapped sequences.

    Recomputes score, match count, and identity from the positions; used to
    ingest externally produced alignments and to round-trip rendered text.
    """
    a, b = tuple(s1), tuple(s2)
    if len(a) != len(b):
        raise InvariantViolation(f"aligned sequences differ in length: {len(a)} vs {len(b)}")
    score = 0.0
    for pos, (x, y) in enumerate(zip(a, b)):
        if x == GAP and y == GAP:
            raise BothGaps(f"position {pos} pairs the gap symbol with itself")
        score += score_pair(x, y, params)
    matches, pct = _identity_stats(a, b)
    return AlignedPair(s1=a, s2=b, score=score, identity=pct, matches=matches)


def best_match(
    s: Sequence[str],
    norm: Union[EventLog, Sequence[Sequence[str]]],
    params: ScoreParams = ScoreParams(),
) -> BestMatch:
    """Align ``s`` against every normative sequence and keep the maximum identity.

    Ties are broken by the lower normative index, so the result does not
    depend on evaluation order.
    """
    candidates = norm.sequences() if isinstance(norm, EventLog) else [tuple(c) for c in norm]
    if not candidates:
        raise EmptyNormativeLog("the normative log contains no sequences")
    best: BestMatch | None = None
    for index, candidate in enumerate(candidates):
        pair = align(s, candidate, params)
        if best is None or pair.identity > best.aligned.identity:
            best = BestMatch(normative_index=index, aligned=pair)
    return best
