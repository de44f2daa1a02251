from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from sqlporter.cli import main as cli_main
from sqlporter.session import (
    MigrationSession,
    NoResidualError,
    StalePreview,
    TargetParseError,
    replay_history,
    run_migration,
)

from conftest import FIG1_SOURCE, FIG1_TARGET


def test_fig1_directory_yields_one_residual(fig1_dir):
    session = run_migration(fig1_dir)
    assert session.residual_count() == 1
    assert set(session.residuals) == {"E001"}
    report = session.report()
    assert report["total_segments"] == 1
    assert report["residual_segments"] == 1


def test_empty_directory_is_an_error(tmp_path):
    with pytest.raises(FileNotFoundError):
        run_migration(tmp_path)


def test_report_counts_partition_segments(tmp_path):
    root = tmp_path / "in"
    root.mkdir()
    (root / "a.sql").write_text("SELECT 1\n")
    (root / "b.sql").write_text(FIG1_SOURCE + "\n")
    session = run_migration(root)
    report = session.report()
    assert (
        report["converted_by_baseline"]
        + report["converted_by_learned"]
        + report["residual_segments"]
        == report["total_segments"]
    )


def test_teach_accept_resolves_the_residual(fig1_dir):
    session = run_migration(fig1_dir)
    preview = session.submit_demonstration("E001", FIG1_TARGET)
    assert len(preview.sites) == 1
    site = preview.sites[0]
    assert site.after == FIG1_TARGET
    assert site.verification["grammatical"]
    assert site.verification["intentional_repair"] == "E001"
    # preview does not mutate
    assert session.residual_count() == 1
    session.accept_rule(preview)
    assert session.residual_count() == 0
    report = session.report()
    assert report["converted_by_learned"] == 1


def test_reject_leaves_state_unchanged_except_history(fig1_dir):
    session = run_migration(fig1_dir)
    before = session.report()
    preview = session.submit_demonstration("E001", FIG1_TARGET)
    session.reject_rule(preview)
    after = session.report()
    assert session.residual_count() == 1
    assert before["residual_errors_by_code"] == after["residual_errors_by_code"]
    assert session.history[-1].kind == "RuleRejected"


def test_accept_after_accept_is_stale(fig1_dir):
    session = run_migration(fig1_dir)
    first = session.submit_demonstration("E001", FIG1_TARGET)
    second = session.submit_demonstration("E001", FIG1_TARGET)
    session.accept_rule(first)
    with pytest.raises(StalePreview):
        session.accept_rule(second)


def test_bad_target_text_surfaces_as_target_parse_error(fig1_dir):
    session = run_migration(fig1_dir)
    with pytest.raises(TargetParseError):
        session.submit_demonstration("E001", "DECLARE var1 VARCHAR(20) = NULL")


def test_accepted_rule_generalizes_to_sibling_segments(tmp_path):
    root = tmp_path / "in"
    root.mkdir()
    (root / "a.sql").write_text(FIG1_SOURCE + "\n")
    (root / "b.sql").write_text(FIG1_SOURCE.replace("var1", "var9") + "\n")
    session = run_migration(root)
    preview = session.submit_demonstration("E001", FIG1_TARGET)
    assert len(preview.sites) == 2  # blast radius covers both residuals
    session.accept_rule(preview)
    assert session.residual_count() == 0
    with pytest.raises(NoResidualError):
        session.submit_demonstration("E001", "SELECT 1")


def test_induction_failures_surface_verbatim_from_the_session(tmp_path):
    from sqlporter.induction import UnboundTemplateHole

    root = tmp_path / "in"
    root.mkdir()
    (root / "a.sql").write_text("DECLARE flag BIT = 1\nSELECT flag = TRUE AS is_on\n")
    (root / "b.sql").write_text("DECLARE ready BIT = 0\nSELECT ready = FALSE AS idle\n")
    session = run_migration(root)
    assert len(session.residuals["E011"]) == 2

    first = session.submit_demonstration(
        "E011", "DECLARE flag BIT DEFAULT 1\nSELECT flag = 1 AS is_on"
    )
    session.accept_rule(first)
    # the TRUE-only rule cannot fix the FALSE comparison
    assert len(session.residuals["E011"]) == 1

    # joining the FALSE demonstration makes the target underivable
    with pytest.raises(UnboundTemplateHole):
        session.submit_demonstration(
            "E011", "DECLARE ready BIT DEFAULT 0\nSELECT ready = 0 AS idle"
        )


def test_unknown_code_raises_no_residual(fig1_dir):
    session = run_migration(fig1_dir)
    with pytest.raises(NoResidualError):
        session.submit_demonstration("E999", FIG1_TARGET)


def test_outputs_mirror_input_tree(tmp_path, fig1_dir):
    nested = fig1_dir / "nested"
    nested.mkdir()
    (nested / "ok.sql").write_text("SELECT 1\n")
    session = run_migration(fig1_dir)
    preview = session.submit_demonstration("E001", FIG1_TARGET)
    session.accept_rule(preview)
    out = tmp_path / "out"
    session.write_outputs(out)
    assert (out / "fig1.sql").read_text() == FIG1_TARGET + "\n"
    assert (out / "nested" / "ok.sql").read_text() == "SELECT 1\n"


def test_unparseable_file_becomes_e000_residual(tmp_path):
    root = tmp_path / "in"
    root.mkdir()
    (root / "bad.sql").write_text("SELEKT oops\n")
    (root / "good.sql").write_text("SELECT 1\n")
    session = run_migration(root)
    assert "E000" in session.residuals
    assert session.report()["residual_segments"] == 1
    out = tmp_path / "out"
    session.write_outputs(out)
    assert (out / "bad.sql").read_text() == "SELEKT oops\n"


def test_history_replays_to_the_same_state(fig1_dir):
    session = run_migration(fig1_dir)
    preview = session.submit_demonstration("E001", FIG1_TARGET)
    session.accept_rule(preview)
    replayed = replay_history(fig1_dir, session.history)
    original_report = session.report()
    replayed_report = replayed.report()
    for key in ("total_segments", "converted_by_baseline", "converted_by_learned",
                "residual_segments", "residual_errors_by_code"):
        assert original_report[key] == replayed_report[key]
    assert [s["status"] for s in original_report["segments"]] == [
        s["status"] for s in replayed_report["segments"]
    ]


def test_rerun_is_deterministic(fig1_dir, tmp_path):
    first = run_migration(fig1_dir)
    second = run_migration(fig1_dir)
    assert first.report() == second.report()
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    first.write_outputs(out1)
    second.write_outputs(out2)
    assert (out1 / "fig1.sql").read_bytes() == (out2 / "fig1.sql").read_bytes()


# -- CLI ---------------------------------------------------------------------


def test_cli_run_reports_and_exit_code(fig1_dir, tmp_path):
    runner = CliRunner()
    out_dir = tmp_path / "out"
    report_path = tmp_path / "report.json"
    errors_path = tmp_path / "errors.jsonl"
    result = runner.invoke(
        cli_main,
        [
            "run",
            "--in", str(fig1_dir),
            "--out", str(out_dir),
            "--report", str(report_path),
            "--errors", str(errors_path),
        ],
    )
    assert result.exit_code == 1  # one residual
    report = json.loads(report_path.read_text())
    assert report["residual_errors_by_code"] == {"E001": 1}
    lines = [json.loads(line) for line in errors_path.read_text().splitlines()]
    assert len(lines) == 1
    assert lines[0]["code"] == "E001"
    assert set(lines[0]) == {"segment_id", "code", "message", "span"}

    clean = tmp_path / "clean"
    clean.mkdir()
    (clean / "ok.sql").write_text("SELECT 1\n")
    result = runner.invoke(cli_main, ["run", "--in", str(clean), "--out", str(tmp_path / "out2")])
    assert result.exit_code == 0


def test_cli_eval_prints_the_table(corpus_dir, tmp_path):
    runner = CliRunner()
    report_path = tmp_path / "metrics.json"
    result = runner.invoke(
        cli_main, ["eval", "--corpus", str(corpus_dir), "--report", str(report_path)]
    )
    assert result.exit_code == 0
    assert "resolved 9/11" in result.output
    metrics = json.loads(report_path.read_text())
    assert metrics["resolved_count"] == 9
    assert metrics["regression_count"] == 0
