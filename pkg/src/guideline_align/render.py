"""Renderers: aligned-sequence text, stage-colored alignment strips, SVG charts.

All output is a deterministic function of its inputs: coordinates are
formatted with fixed precision and no timestamps or generated ids are
embedded, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass
from importlib.resources import files as package_files
from pathlib import Path
from typing import Iterable, Sequence

from .align import GAP, AlignedPair, ScoreParams, pair_from_gapped
from .analysis import CaseResult
from .errors import MalformedDocument, MissingRound
from .eventlog import ROUNDS

PALETTE_ENV_VAR = "GUIDELINE_ALIGN_PALETTE"

CHART_KINDS = ("identity_dumbbell", "duration_dumbbell", "identity_vs_duration")

_DARK = "#1a1a1a"   # improvement / post trial
_LIGHT = "#9e9e9e"  # decline / pre trial


# --- text renderer ---


def render_alignment_text(pair: AlignedPair, label: str = "student") -> str:
    """Two bracketed rows, the first labeled ``label``, the second ``normative``."""
    first = f"{label}: [{', '.join(pair.s1)}]"
    second = f"normative: [{', '.join(pair.s2)}]"
    return f"{first}\n{second}"


_ROW_RE = re.compile(r"^(?P<label>[^\[\]]*?):\s*\[(?P<body>.*)\]\s*$")


def _parse_row(line: str) -> tuple[str, tuple[str, ...]]:
    m = _ROW_RE.match(line.strip())
    if not m:
        raise MalformedDocument(f"not an alignment row: {line!r}")
    body = m.group("body").strip()
    symbols = tuple(s.strip() for s in body.split(",")) if body else ()
    return m.group("label").strip(), symbols


def parse_alignment_text(
    text: str, params: ScoreParams = ScoreParams()
) -> tuple[str, AlignedPair]:
    """Inverse of :func:`render_alignment_text`; recomputes score and identity."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise MalformedDocument(f"expected 2 alignment rows, got {len(lines)}")
    label, s1 = _parse_row(lines[0])
    second_label, s2 = _parse_row(lines[1])
    if second_label != "normative":
        raise MalformedDocument(f"second row must be labeled 'normative', got {second_label!r}")
    return label, pair_from_gapped(s1, s2, params)


# --- palette ---


def load_palette(path: str | Path | None = None) -> dict[str, str]:
    """Stage-number -> color mapping for alignment strips.

    Resolution order: explicit ``path``, the ``GUIDELINE_ALIGN_PALETTE``
    environment variable, then the packaged default.
    """
    if path is None:
        path = os.environ.get(PALETTE_ENV_VAR) or None
    if path is None:
        raw = package_files("guideline_align").joinpath("data/palette.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    try:
        palette = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"palette is not valid JSON: {exc}") from exc
    if not isinstance(palette, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in palette.items()
    ):
        raise MalformedDocument("palette must map stage strings to color strings")
    return palette


def _cell_color(symbol: str, palette: dict[str, str]) -> str:
    if symbol == GAP:
        return "#ffffff"
    return palette.get(symbol[:1], "#d9d9d9")


def render_alignment_svg(
    pair: AlignedPair, label: str = "student", palette: dict[str, str] | None = None
) -> str:
    """AliView-style strip: one colored cell per aligned position, two rows."""
    if palette is None:
        palette = load_palette()
    cell_w, cell_h, label_w, pad = 26, 20, 96, 4
    width = label_w + cell_w * len(pair) + pad * 2
    height = cell_h * 2 + pad * 3
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">'
    ]
    for row, (name, symbols) in enumerate([(label, pair.s1), ("normative", pair.s2)]):
        y = pad + row * (cell_h + pad)
        parts.append(
            f'<text x="{label_w - 6}" y="{y + cell_h - 6}" text-anchor="end">{_esc(name)}</text>'
        )
        for col, symbol in enumerate(symbols):
            x = label_w + col * cell_w
            parts.append(
                f'<rect class="cell" x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="{_cell_color(symbol, palette)}" stroke="#666666"/>'
            )
            parts.append(
                f'<text x="{x + cell_w / 2:.1f}" y="{y + cell_h - 6}" '
                f'text-anchor="middle">{_esc(symbol)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- charts ---


@dataclass(frozen=True)
class ChartSpec:
    """One chart to emit: what kind, for which scope, into which file."""

    kind: str
    scope: str | int = "whole"
    filename: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in CHART_KINDS:
            raise ValueError(f"unknown chart kind {self.kind!r}; expected one of {CHART_KINDS}")
        if self.scope != "whole" and not (isinstance(self.scope, int) and self.scope >= 1):
            raise ValueError(f"scope must be 'whole' or a stage id, got {self.scope!r}")

    @property
    def default_filename(self) -> str:
        scope = self.scope if self.scope == "whole" else f"stage_{self.scope}"
        return f"{self.kind}_{scope}.svg"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _identity_of(case: CaseResult, scope: str | int) -> float:
    return case.whole_identity if scope == "whole" else case.per_stage[scope].identity


def _duration_of(case: CaseResult, scope: str | int) -> float | None:
    return case.duration_min if scope == "whole" else case.per_stage[scope].duration_min


def _student_key(student: str) -> tuple:
    return (0, int(student)) if student.isdigit() else (1, student)


def _paired_cases(cases: Sequence[CaseResult]) -> list[tuple[str, CaseResult, CaseResult]]:
    by_student: dict[str, dict[str, CaseResult]] = {}
    for case in cases:
        if case.round in ROUNDS:
            by_student.setdefault(case.student(), {})[case.round] = case
    out = []
    for student in sorted(by_student, key=_student_key):
        have = by_student[student]
        if "pre" in have and "post" in have:
            out.append((student, have["pre"], have["post"]))
    return out


def _duration_upper(values: Iterable[float]) -> float:
    top = max(list(values) or [0.0])
    return max(5.0, math.ceil(top / 5.0) * 5.0)


class _Canvas:
    """Tiny fixed-precision SVG builder."""

    width, height = 640, 400
    left, right, top, bottom = 56, 16, 34, 44

    def __init__(self, title: str) -> None:
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif" font-size="12">',
            f'<text class="title" x="{self.width / 2:.2f}" y="20" text-anchor="middle">{_esc(title)}</text>',
        ]

    @property
    def plot_w(self) -> float:
        return self.width - self.left - self.right

    @property
    def plot_h(self) -> float:
        return self.height - self.top - self.bottom

    def x(self, frac: float) -> float:
        return self.left + frac * self.plot_w

    def y(self, frac: float) -> float:
        return self.height - self.bottom - frac * self.plot_h

    def line(self, x1, y1, x2, y2, color, cls, width=1.5) -> None:
        self.parts.append(
            f'<line class="{cls}" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def circle(self, cx, cy, r, color, cls) -> None:
        self.parts.append(
            f'<circle class="{cls}" cx="{cx:.2f}" cy="{cy:.2f}" r="{r}" fill="{color}"/>'
        )

    def polygon(self, points, color, cls) -> None:
        pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
        self.parts.append(f'<polygon class="{cls}" points="{pts}" fill="{color}"/>')

    def text(self, x, y, content, anchor="middle", cls="label") -> None:
        self.parts.append(
            f'<text class="{cls}" x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}">{_esc(str(content))}</text>'
        )

    def axes(self) -> None:
        x0, y0 = self.x(0.0), self.y(0.0)
        self.line(x0, self.y(1.0), x0, y0, "#333333", "axis", 1.0)
        self.line(x0, y0, self.x(1.0), y0, "#333333", "axis", 1.0)

    def y_ticks(self, lo: float, hi: float, steps: int, fmt: str) -> None:
        for k in range(steps + 1):
            value = lo + (hi - lo) * k / steps
            py = self.y(k / steps)
            self.line(self.x(0.0) - 4, py, self.x(0.0), py, "#333333", "tick", 1.0)
            self.text(self.x(0.0) - 8, py + 4, fmt.format(value), anchor="end", cls="tick-label")

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _dumbbell_chart(cases: Sequence[CaseResult], spec: ChartSpec) -> str:
    metric = "identity" if spec.kind == "identity_dumbbell" else "duration"
    pairs = _paired_cases(cases)
    if metric == "identity":
        rows = [(s, _identity_of(pre, spec.scope), _identity_of(post, spec.scope)) for s, pre, post in pairs]
    else:
        rows = [
            (s, _duration_of(pre, spec.scope), _duration_of(post, spec.scope))
            for s, pre, post in pairs
        ]
        rows = [(s, a, b) for s, a, b in rows if a is not None and b is not None]
    if not rows:
        raise MissingRound(f"{spec.kind} needs at least one student with both pre and post values")

    scope_label = "whole process" if spec.scope == "whole" else f"stage {spec.scope}"
    if metric == "identity":
        title = f"Identity pre vs post, {scope_label}"
        lo, hi = 0.0, 100.0
        tick_fmt = "{:.0f}%"
    else:
        title = f"Duration pre vs post, {scope_label}"
        lo, hi = 0.0, _duration_upper([v for _, a, b in rows for v in (a, b)])
        tick_fmt = "{:.0f} min"

    canvas = _Canvas(title)
    canvas.axes()
    canvas.y_ticks(lo, hi, 5, tick_fmt)
    for idx, (student, pre_v, post_v) in enumerate(rows):
        cx = canvas.x((idx + 0.5) / len(rows))
        y_pre = canvas.y((pre_v - lo) / (hi - lo))
        y_post = canvas.y((post_v - lo) / (hi - lo))
        better = post_v >= pre_v if metric == "identity" else post_v <= pre_v
        color = _DARK if better else _LIGHT
        cls = "arrow improvement" if better else "arrow decline"
        canvas.line(cx, y_pre, cx, y_post, color, cls, 2.0)
        head = 5.0 if y_post > y_pre else -5.0
        canvas.polygon(
            [(cx, y_post), (cx - 4.0, y_post - head), (cx + 4.0, y_post - head)], color, "arrow-head"
        )
        canvas.circle(cx, y_pre, 3.0, color, "start-dot")
        canvas.text(cx, canvas.y(0.0) + 16, student, cls="x-label")
    canvas.text(canvas.x(0.5), canvas.height - 8, "student", cls="axis-label")
    return canvas.svg()


def _scatter_chart(cases: Sequence[CaseResult], spec: ChartSpec) -> str:
    scope_label = "whole process" if spec.scope == "whole" else f"stage {spec.scope}"
    points = []
    for case in cases:
        dur = _duration_of(case, spec.scope)
        if dur is None or case.round not in ROUNDS:
            continue
        points.append((case.round, dur, _identity_of(case, spec.scope)))
    upper = _duration_upper([d for _, d, _ in points])
    canvas = _Canvas(f"Identity vs duration, {scope_label}")
    canvas.axes()
    canvas.y_ticks(0.0, 100.0, 5, "{:.0f}%")
    for k in range(6):
        value = upper * k / 5
        px = canvas.x(k / 5)
        canvas.line(px, canvas.y(0.0), px, canvas.y(0.0) + 4, "#333333", "tick", 1.0)
        canvas.text(px, canvas.y(0.0) + 16, f"{value:.0f}", cls="tick-label")
    for rnd, dur, ident in points:
        color = _LIGHT if rnd == "pre" else _DARK
        canvas.circle(
            canvas.x(dur / upper), canvas.y(ident / 100.0), 4.0, color, f"point {rnd}"
        )
    canvas.text(canvas.x(0.5), canvas.height - 8, "duration (min)", cls="axis-label")
    return canvas.svg()


def render_chart(cases: Sequence[CaseResult], spec: ChartSpec) -> str:
    if spec.kind == "identity_vs_duration":
        return _scatter_chart(cases, spec)
    return _dumbbell_chart(cases, spec)


def emit_charts(
    cases: Sequence[CaseResult], specs: Sequence[ChartSpec], out_dir: str | Path = "."
) -> list[Path]:
    """Write one standalone SVG per spec; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    for spec in specs:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / (spec.filename or spec.default_filename)
        path.write_text(render_chart(cases, spec), encoding="utf-8")
        written.append(path)
    return written
