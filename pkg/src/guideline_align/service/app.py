"""FastAPI service wrapping the conformance-checking core.

Endpoints are pure compute: documents travel in request bodies and results
in responses, so the service never touches a client's filesystem. Domain
errors map to 422 with the offending element named in ``detail``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..align import ScoreParams, align
from ..analysis import conformance_report, report_to_dict, summarize
from ..errors import GuidelineAlignError
from ..eventlog import load_log_csv, load_resource_map, load_stage_map, to_csv
from ..petri import parse_net_json, parse_pnml
from ..simulate import SimConfig, simulate_log
from .schemas import (
    AlignRequest,
    AlignResponse,
    HealthResponse,
    ReportRequest,
    ReportResponse,
    SimStatsModel,
    SimulateRequest,
    SimulateResponse,
)

app = FastAPI(
    title="guideline-align",
    description="Conformance checking via Petri-net simulation and global sequence alignment",
    version=__version__,
)


@app.exception_handler(GuidelineAlignError)
async def _domain_error(request: Request, exc: GuidelineAlignError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": str(exc), "error": type(exc).__name__},
    )


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc), "error": "ValueError"})


def _parse_net(document: str, net_format: str):
    return parse_pnml(document) if net_format == "pnml" else parse_net_json(document)


def _score_params(model) -> ScoreParams:
    return ScoreParams(match=model.match, gap=model.gap, mismatch=model.mismatch)


@app.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    net = _parse_net(req.net, req.net_format)
    cfg = SimConfig(
        seed=req.seed,
        n_runs=req.runs,
        max_activities=req.max_len,
        final_activity=req.final_activity,
        drop_invisible=req.drop_invisible,
        deduplicate=req.deduplicate,
    )
    result = simulate_log(net, cfg)
    return SimulateResponse(
        csv=to_csv(result.kept),
        n_kept=result.kept.n_seq,
        stats=SimStatsModel(
            discarded_incomplete=result.stats.discarded_incomplete,
            discarded_deadlocked=result.stats.discarded_deadlocked,
            duplicates_removed=result.stats.duplicates_removed,
        ),
    )


@app.post("/align", response_model=AlignResponse)
def align_pair(req: AlignRequest) -> AlignResponse:
    pair = align(req.s1, req.s2, _score_params(req.scores))
    return AlignResponse(**pair.to_json_dict())


@app.post("/report", response_model=ReportResponse)
def report(req: ReportRequest) -> ReportResponse:
    resource_map = load_resource_map(req.resources_csv) if req.resources_csv else None
    student_log = load_log_csv(req.log_csv, resource_map=resource_map)
    norm_log = load_log_csv(req.norm_csv)
    stage_map = load_stage_map(req.stages_csv)
    results = conformance_report(student_log, norm_log, stage_map, _score_params(req.scores))
    summary = summarize(results)
    return ReportResponse(report=report_to_dict(results, summary))
