"""Command-line client over the planning engine.

Every subcommand is a thin wrapper: parse arguments, call the same engine
functions the HTTP service uses, write files or JSON to stdout. Report CSVs
therefore come out byte-identical whichever front end produced them.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .config import WEIGHT_SOURCE_FILE, load_config
from .errors import ResplanError
from .metrics import (
    Objective,
    best_outcome,
    evaluate_strategies,
    load_measure_specs,
    outcomes_to_csv,
    read_trace_csv,
)
from .accidents import render_incident_report, reports_to_jsonl
from .orchestrator import PlanningEngine, reproduce_tables
from .plans import load_plans_file, load_score_table_csv
from .topsis import load_decision_matrix


def _parse_bits(text: str) -> list[int]:
    tokens = text.replace(",", " ").split()
    return [int(t) for t in tokens]


def _engine(ctx: click.Context, weights_file: Path | None = None) -> PlanningEngine:
    config = load_config(ctx.obj)
    if weights_file is not None:
        config = replace(
            config, weight_source=WEIGHT_SOURCE_FILE, weights_file=weights_file
        )
    return PlanningEngine(config)


def _emit(payload, out: Path | None):
    text = json.dumps(payload, indent=2) + "\n"
    if out is not None:
        out.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="JSON config file; defaults plus env overrides otherwise.",
)
@click.pass_context
def main(ctx, config_path):
    """Traffic incident response planning toolkit."""
    ctx.obj = config_path


@main.command()
@click.option("--doc", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--backend", default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def synthesize(ctx, doc, backend, out):
    """Synthesize a guideline document into a scenario-action table."""
    engine = _engine(ctx)
    try:
        table = engine.synthesize(doc.read_text(encoding="utf-8"), backend_id=backend)
    except ResplanError as err:
        raise click.ClickException(str(err))
    _emit(table.to_dict(), out)


@main.command()
@click.option("--matrix", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def weights(ctx, matrix, out):
    """Derive per-action weights from a decision matrix file."""
    engine = _engine(ctx)
    try:
        table = engine.topsis_weights(load_decision_matrix(matrix))
    except ResplanError as err:
        raise click.ClickException(str(err))
    if out is not None:
        table.dump_json(out)
        mirror = out.with_suffix(".csv")
        mirror.write_text(table.to_csv(), encoding="utf-8")
        click.echo(f"wrote {out} and {mirror}")
    else:
        click.echo(json.dumps(table.as_mapping(), indent=2))


@main.command()
@click.option("--incident", "incident_id", required=True)
@click.option("--m", type=int, default=None, help="generation count (config default 3)")
@click.option("--backend", default=None)
@click.option("--weights-file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def generate(ctx, incident_id, m, backend, weights_file, out):
    """Generate, fuse, and score a response plan for an incident."""
    engine = _engine(ctx, weights_file)
    try:
        job = engine.generate_plan(incident_id, m=m, backend_id=backend)
    except ResplanError as err:
        raise click.ClickException(str(err))
    _emit(job.to_dict(), out)
    result = job.result
    click.echo(
        f"job {job.job_id} {job.status.value}: fused "
        f"{list(result.fused_bits)} score {result.score:.3f}"
    )


@main.command()
@click.option("--bits", default=None, help='e.g. "1,0,1,1,0,1,0,1,0,1"')
@click.option("--plan-file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--weights-file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def score(ctx, bits, plan_file, weights_file, out):
    """Score a binary plan against the active weight table."""
    if (bits is None) == (plan_file is None):
        raise click.ClickException("provide exactly one of --bits or --plan-file")
    engine = _engine(ctx, weights_file)
    try:
        if plan_file is not None:
            plan = load_plans_file(plan_file)[0]
            payload = engine.score_bits(plan.bits)
        else:
            payload = engine.score_bits(_parse_bits(bits))
    except (ResplanError, ValueError) as err:
        raise click.ClickException(str(err))
    _emit(payload, out)


@main.command()
@click.option("--plan", "plans", multiple=True, help="repeatable bit vector")
@click.option("--plans-file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def fuse(ctx, plans, plans_file, out):
    """Fuse several binary plans into one consensus plan."""
    bit_lists = [_parse_bits(p) for p in plans]
    if plans_file is not None:
        bit_lists.extend(list(p.bits) for p in load_plans_file(plans_file))
    engine = _engine(ctx)
    try:
        payload = engine.fuse_bits(bit_lists)
    except (ResplanError, ValueError) as err:
        raise click.ClickException(str(err))
    _emit(payload, out)


@main.command()
@click.option("--incident", "incident_id", default=None)
@click.option("--all", "all_records", is_flag=True, help="render every fixture record")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def report(ctx, incident_id, all_records, out):
    """Render incident report text (single, or a JSON-lines batch)."""
    if bool(incident_id) == all_records:
        raise click.ClickException("provide exactly one of --incident or --all")
    engine = _engine(ctx)
    try:
        if all_records:
            text = reports_to_jsonl(engine.incidents().values())
        else:
            text = render_incident_report(engine.incident(incident_id)) + "\n"
    except ResplanError as err:
        raise click.ClickException(str(err))
    if out is not None:
        out.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--scores", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--manual-label", default="Manual solution")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def compare(ctx, scores, manual_label, out):
    """Average per-model score difference against the manual column."""
    engine = _engine(ctx)
    try:
        report = engine.compare_scores(load_score_table_csv(scores), manual_label)
    except ResplanError as err:
        raise click.ClickException(str(err))
    csv_text = report.to_csv()
    if out is not None:
        out.write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out}")
    for model, diff in report.average_difference:
        click.echo(f"{model}: {diff:.2f}")


@main.command("reproduce-tables")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--data-dir", type=click.Path(path_type=Path), default=None)
@click.pass_context
def reproduce_tables_cmd(ctx, out, data_dir):
    """Recompute the reference tables and check them against fixtures."""
    try:
        bundle = reproduce_tables(data_dir)
    except ResplanError as err:
        raise click.ClickException(str(err))
    if out is not None:
        for path in bundle.write(out):
            click.echo(f"wrote {path}")
    for check in bundle.checks:
        status = "PASS" if check.passed else f"FAIL ({', '.join(check.failures)})"
        click.echo(f"{check.name}: {status}")
    if not bundle.passed:
        sys.exit(1)


@main.command()
@click.option(
    "--trace",
    "traces",
    multiple=True,
    required=True,
    help="strategy_id=trace.csv (repeatable)",
)
@click.option("--measures", required=True, type=click.Path(exists=True, path_type=Path))
@click.option(
    "--objective",
    type=click.Choice(["maximize", "minimize"]),
    default="maximize",
)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def evaluate(traces, measures, objective, out):
    """Aggregate strategy traces and rank them by the heuristic."""
    specs = load_measure_specs(measures)
    trace_map = {}
    for item in traces:
        strategy_id, _, path = item.partition("=")
        if not path:
            raise click.ClickException(f"--trace needs strategy_id=path, got {item!r}")
        trace_map[strategy_id] = read_trace_csv(path)
    try:
        outcomes = evaluate_strategies(trace_map, specs)
        goal = Objective.MAXIMIZE if objective == "maximize" else Objective.MINIMIZE
        winner = best_outcome(outcomes, goal)
    except ResplanError as err:
        raise click.ClickException(str(err))
    csv_text = outcomes_to_csv(outcomes, specs)
    if out is not None:
        out.write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(csv_text, nl=False)
    click.echo(f"best outcome ({objective}): {winner}")


if __name__ == "__main__":
    main()
