"""Conformance checking of process executions against a Petri-net guideline.

The pipeline: parse the guideline net, simulate it into a normative event
log, then compute optimal global alignments between recorded cases and the
normative sequences, whole-process and per stage, reporting identity and
duration metrics.
"""

from .align import (
    GAP,
    AlignedPair,
    BestMatch,
    DPMatrices,
    ScoreParams,
    align,
    best_match,
    identity,
    pair_from_gapped,
    score_pair,
    strip_gaps,
)
from .analysis import (
    CaseResult,
    Improvement,
    StageResult,
    SummaryStats,
    conformance_report,
    report_from_dict,
    report_to_dict,
    summarize,
    summary_csv,
)
from .eventlog import (
    Event,
    EventLog,
    StageMap,
    Trace,
    abbreviate,
    duration,
    load_log_csv,
    load_resource_map,
    load_stage_map,
    stage_log,
    stage_slice,
    to_csv,
)
from .petri import (
    Marking,
    PetriNet,
    Transition,
    enabled,
    fire,
    parse_net_json,
    parse_pnml,
    render_net_json,
    replay,
)
from .render import (
    ChartSpec,
    emit_charts,
    load_palette,
    parse_alignment_text,
    render_alignment_svg,
    render_alignment_text,
    render_chart,
)
from .simulate import (
    RunOutcome,
    RunResult,
    SimConfig,
    SimResult,
    SimStats,
    postprocess,
    simulate_log,
    simulate_run,
    substream,
)

__version__ = "0.1.0"
