"""Command line entry points: run, teach, eval, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .baseline import errors_to_jsonl
from .corpus import load_corpus, render_table, run_eval
from .rewrite import load_rules, save_rules
from .session import run_migration


@click.group()
def main() -> None:
    """SQL dialect migration with teachable conversion rules."""


@main.command("run")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--rules", "rules_path", type=click.Path(dir_okay=False), default=None)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@click.option("--errors", "errors_path", type=click.Path(dir_okay=False), default=None,
              help="Write residual errors as JSON lines.")
def run_command(
    in_dir: str,
    out_dir: str,
    rules_path: str | None,
    seed: int,
    report_path: str | None,
    errors_path: str | None,
) -> None:
    """Convert every .sql file under --in into --out; exit 0 iff no residuals."""
    rules = load_rules(rules_path) if rules_path and Path(rules_path).exists() else []
    session = run_migration(in_dir, rules=rules, seed=seed)
    session.write_outputs(out_dir)
    report = session.report()
    if report_path:
        Path(report_path).write_text(json.dumps(report, indent=2) + "\n")
    if errors_path:
        residuals = [error for errors in session.residuals.values() for error in errors]
        residuals.sort(key=lambda error: (error.segment_id, error.code, error.span.byte_start))
        Path(errors_path).write_text(errors_to_jsonl(residuals))
    click.echo(
        f"{report['total_segments']} segments: "
        f"{report['converted_by_baseline']} baseline, "
        f"{report['converted_by_learned']} learned, "
        f"{report['residual_segments']} residual"
    )
    for code, count in report["residual_errors_by_code"].items():
        click.echo(f"  {code}: {count}")
    sys.exit(0 if session.residual_count() == 0 else 1)


@main.command("teach")
@click.option("--session", "base_url", required=True, help="Base URL of a running serve instance.")
@click.option("--error", "error_code", required=True)
@click.option("--target", "target_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reject", is_flag=True, default=False, help="Preview only, then reject.")
def teach_command(base_url: str, error_code: str, target_path: str, reject: bool) -> None:
    """Submit an expert target for one residual error and accept the rule."""
    import httpx

    target_text = Path(target_path).read_text().rstrip("\n")
    base = base_url.rstrip("/")
    response = httpx.post(
        f"{base}/demonstrations",
        json={"error_code": error_code, "target_text": target_text},
        timeout=60.0,
    )
    if response.status_code != 200:
        click.echo(f"error: {response.json().get('detail')}", err=True)
        sys.exit(1)
    preview = response.json()
    click.echo(f"preview {preview['preview_id']}: {len(preview['sites'])} site(s)")
    for site in preview["sites"]:
        verification = site.get("verification") or {}
        badge = "ok" if verification.get("grammatical") else "NOT GRAMMATICAL"
        click.echo(f"  {site['segment_id']}: {badge}")
    decision = "reject" if reject else "accept"
    response = httpx.post(
        f"{base}/rules/{decision}", json={"preview_id": preview["preview_id"]}, timeout=60.0
    )
    if response.status_code != 200:
        click.echo(f"error: {response.json().get('detail')}", err=True)
        sys.exit(1)
    summary = response.json()
    click.echo(f"{decision}ed; residual segments now {summary['residual_segments']}")


@main.command("eval")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def eval_command(corpus_dir: str, seed: int, report_path: str | None) -> None:
    """Induce from each case's demonstrations and score the holdouts."""
    corpus = load_corpus(corpus_dir)
    result = run_eval(corpus, seed=seed)
    click.echo(render_table(result))
    if report_path:
        Path(report_path).write_text(json.dumps(result.to_doc(), indent=2) + "\n")


@main.command("serve")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--rules", "rules_path", type=click.Path(dir_okay=False), default=None)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--ui-dir", "ui_dir", type=click.Path(file_okay=False), default=None)
@click.option("--save-rules", "save_rules_path", type=click.Path(dir_okay=False), default=None,
              help="Write the learned library here on shutdown.")
def serve_command(
    in_dir: str,
    rules_path: str | None,
    port: int,
    seed: int,
    ui_dir: str | None,
    save_rules_path: str | None,
) -> None:
    """Serve the session API (and the review console, if built) on localhost."""
    import uvicorn

    from .service import create_app

    rules = load_rules(rules_path) if rules_path and Path(rules_path).exists() else []
    session = run_migration(in_dir, rules=rules, seed=seed)
    app = create_app(session, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    finally:
        if save_rules_path:
            save_rules(session.learned_rules, save_rules_path)


if __name__ == "__main__":
    main()
