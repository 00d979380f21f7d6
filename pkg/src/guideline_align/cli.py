"""Command-line client for the conformance service.

Subcommands call the HTTP endpoints (in process by default, or a remote
server via ``--server``) and handle all file I/O on the client side.
Exit codes: 0 success, 1 input/usage error, 2 internal error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analysis import report_from_dict, summarize, summary_csv
from .errors import GuidelineAlignError, MissingRound
from .render import (
    CHART_KINDS,
    ChartSpec,
    emit_charts,
    load_palette,
    render_alignment_svg,
    render_alignment_text,
)
from .service.client import ServiceClient, ServiceInternalError


@click.group()
@click.option("--server", default=None, metavar="URL", help="Base URL of a running service; default runs the service in process.")
@click.pass_context
def cli(ctx: click.Context, server: str | None) -> None:
    """Check conformance of recorded process executions against a Petri-net guideline."""
    ctx.obj = ServiceClient(base_url=server)


def _write_output(text: str, output: str) -> None:
    if output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _infer_net_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "json" if path.lower().endswith(".json") else "pnml"


@cli.command()
@click.option("--net", "net_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Guideline net (PNML or JSON).")
@click.option("--net-format", type=click.Choice(["pnml", "json"]), default=None, help="Override format inferred from the file extension.")
@click.option("--runs", default=1000, show_default=True, type=click.IntRange(min=1), help="Number of simulation runs.")
@click.option("--max-len", default=65, show_default=True, type=click.IntRange(min=1), help="Maximum recorded activities per run.")
@click.option("--seed", required=True, type=int, help="Random seed (mandatory for reproducibility).")
@click.option("--final-activity", default="Check catheter position", show_default=True)
@click.option("--keep-invisible", is_flag=True, help="Keep invisible labels in the output log.")
@click.option("--no-dedup", is_flag=True, help="Keep duplicate sequences.")
@click.option("-o", "--output", default="-", show_default=True, help="Output CSV path, '-' for stdout.")
@click.pass_obj
def simulate(client: ServiceClient, net_path: str, net_format: str | None, runs: int, max_len: int, seed: int, final_activity: str, keep_invisible: bool, no_dedup: bool, output: str) -> None:
    """Simulate the net into a normative event log (CSV)."""
    result = client.simulate(
        net=Path(net_path).read_text(encoding="utf-8"),
        net_format=_infer_net_format(net_path, net_format),
        seed=seed,
        runs=runs,
        max_len=max_len,
        final_activity=final_activity,
        drop_invisible=not keep_invisible,
        deduplicate=not no_dedup,
    )
    _write_output(result["csv"], output)
    stats = result["stats"]
    click.echo(
        f"kept {result['n_kept']} sequences "
        f"(incomplete {stats['discarded_incomplete']}, deadlocked {stats['discarded_deadlocked']}, "
        f"duplicates {stats['duplicates_removed']})",
        err=True,
    )


@cli.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Recorded event log CSV.")
@click.option("--norm", "norm_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Normative event log CSV.")
@click.option("--stages", "stages_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Stage map CSV.")
@click.option("--resources", "resources_path", default=None, type=click.Path(exists=True, dir_okay=False), help="Optional resource-to-student mapping CSV.")
@click.option("--match", default=1.0, show_default=True, type=float)
@click.option("--gap", default=-2.0, show_default=True, type=float)
@click.option("--mismatch", default=-2.0, show_default=True, type=float)
@click.option("-o", "--output", default="-", show_default=True, help="Report JSON path, '-' for stdout.")
@click.pass_obj
def align(client: ServiceClient, log_path: str, norm_path: str, stages_path: str, resources_path: str | None, match: float, gap: float, mismatch: float, output: str) -> None:
    """Align every recorded case against the normative log into a report (JSON)."""
    result = client.report(
        log_csv=Path(log_path).read_text(encoding="utf-8"),
        norm_csv=Path(norm_path).read_text(encoding="utf-8"),
        stages_csv=Path(stages_path).read_text(encoding="utf-8"),
        resources_csv=Path(resources_path).read_text(encoding="utf-8") if resources_path else None,
        scores={"match": match, "gap": gap, "mismatch": mismatch},
    )
    _write_output(json.dumps(result["report"], indent=2) + "\n", output)


@cli.command()
@click.option("--report", "report_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Report JSON produced by the align subcommand.")
@click.option("--out-dir", default="report_out", show_default=True, help="Directory for rendered files.")
@click.option("--no-charts", is_flag=True, help="Skip SVG charts.")
@click.option("--no-strips", is_flag=True, help="Skip per-case alignment strip SVGs.")
def report(report_path: str, out_dir: str, no_charts: bool, no_strips: bool) -> None:
    """Render a report: aligned-sequence text, summary CSV, and SVG charts."""
    data = json.loads(Path(report_path).read_text(encoding="utf-8"))
    if "report" in data and "cases" not in data:
        data = data["report"]
    cases = report_from_dict(data)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    blocks = []
    for case in cases:
        header = f"{case.case_id} (identity {round(case.whole_identity)}%)"
        blocks.append(header + "\n" + render_alignment_text(case.whole_best.aligned))
    (out / "alignments.txt").write_text("\n\n".join(blocks) + "\n", encoding="utf-8")

    summary = summarize(cases)
    (out / "summary.csv").write_text(summary_csv(summary), encoding="utf-8")

    written = [out / "alignments.txt", out / "summary.csv"]
    if not no_strips:
        palette = load_palette()
        strip_dir = out / "strips"
        strip_dir.mkdir(exist_ok=True)
        for case in cases:
            path = strip_dir / f"{case.case_id}.svg"
            path.write_text(
                render_alignment_svg(case.whole_best.aligned, label=case.case_id, palette=palette),
                encoding="utf-8",
            )
            written.append(path)
    if not no_charts:
        stages = sorted({s for c in cases for s in c.per_stage})
        scopes: list[str | int] = ["whole", *stages]
        for kind in CHART_KINDS:
            specs = [ChartSpec(kind=kind, scope=scope) for scope in scopes]
            try:
                written.extend(emit_charts(cases, specs, out_dir=out))
            except MissingRound as exc:
                click.echo(f"skipping {kind} charts: {exc}", err=True)
    for path in written:
        click.echo(str(path), err=True)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the conformance service with uvicorn."""
    import uvicorn

    uvicorn.run("guideline_align.service:app", host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point returning an exit code instead of raising SystemExit."""
    try:
        cli.main(args=argv, prog_name="guideline-align", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ServiceInternalError as exc:
        click.echo(f"internal error: {exc}", err=True)
        return 2
    except GuidelineAlignError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # pragma: no cover - last resort
        click.echo(f"internal error: {exc}", err=True)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
