from __future__ import annotations

from sqlporter.baseline import INTENTIONAL_REPAIRS, baseline_convert, gap_list
from sqlporter.corpus import Corpus, load_corpus, render_table, run_eval
from sqlporter.dialects import TGT
from sqlporter.parser import parse
from sqlporter.printer import print_sql
from sqlporter.verifier import verify


def test_corpus_covers_every_registered_error_class(corpus):
    assert [case.code for case in corpus.cases] == [code for code, _ in gap_list()]


def test_case_shape_matches_the_protocol(corpus):
    for case in corpus.cases:
        assert 1 <= len(case.demos) <= 2, case.code
        assert len(case.holdouts) >= 3, case.code
        assert len(case.holdouts) == len(case.expected_targets), case.code


def test_every_demo_and_holdout_fails_with_exactly_its_code(corpus):
    for case in corpus.cases:
        segments = [demo.source for demo in case.demos] + list(case.holdouts)
        for segment in segments:
            outcome = baseline_convert(segment)
            codes = sorted({error.code for error in outcome.errors})
            assert codes == [case.code], segment.segment_id


def test_expert_texts_are_canonical_target_dialect(corpus):
    for case in corpus.cases:
        texts = [demo.expert_target.text for demo in case.demos] + list(case.expected_targets)
        for text in texts:
            assert print_sql(parse(text, TGT), TGT) == text


def test_expected_targets_verify_against_their_sources(corpus):
    repairable = set(INTENTIONAL_REPAIRS)
    for case in corpus.cases:
        repair = case.code if case.code in repairable else None
        pairs = [(demo.source, demo.expert_target.text) for demo in case.demos]
        pairs += list(zip(case.holdouts, case.expected_targets))
        for source, expected in pairs:
            report = verify(source, expected, repair_code=repair)
            assert report.accepted, (case.code, source.segment_id)


def test_convertible_fixtures_convert_without_rules(corpus):
    for fixture in corpus.convertible:
        outcome = baseline_convert(fixture.segment)
        assert outcome.converted is not None, fixture.name
        assert outcome.converted.text == fixture.expected, fixture.name
        parse(outcome.converted.text, TGT)


def test_eval_hits_the_nine_of_eleven_target(corpus):
    result = run_eval(corpus)
    assert result.total_cases == 11
    assert result.resolved_count == 9
    assert result.regression_count == 0
    by_code = {case.code: case for case in result.cases}
    assert not by_code["E010"].resolved
    assert not by_code["E011"].resolved
    assert by_code["E011"].failure and "UnboundTemplateHole" in by_code["E011"].failure
    for code, case in by_code.items():
        if code not in ("E010", "E011"):
            assert case.resolved, code
        assert case.demos_used <= 2


def test_eval_uses_demos_only_never_holdouts(corpus):
    # dropping holdouts must not change any induced rule
    trimmed = Corpus(
        cases=tuple(
            type(case)(case.code, case.demos, case.holdouts[:1], case.expected_targets[:1])
            for case in corpus.cases
        ),
        convertible=corpus.convertible,
    )
    full = run_eval(corpus)
    partial = run_eval(trimmed)
    assert [
        (rule.trigger, rule.pattern, rule.guards, rule.template) for rule in full.rules
    ] == [(rule.trigger, rule.pattern, rule.guards, rule.template) for rule in partial.rules]


def test_empty_corpus_evaluates_to_zero_of_zero(tmp_path):
    empty = load_corpus(tmp_path)
    result = run_eval(empty)
    assert result.resolved_count == 0
    assert result.total_cases == 0
    assert result.regression_count == 0


def test_case_whose_holdout_equals_its_demo_resolves(corpus, tmp_path):
    import json

    case_dir = tmp_path / "E001"
    case_dir.mkdir()
    demo = corpus.cases[0].demos[0]
    (case_dir / "demo-1.json").write_text(
        json.dumps(
            {
                "demo_id": demo.demo_id,
                "error_code": "E001",
                "source": demo.source.text,
                "expert_target": demo.expert_target.text,
            }
        )
    )
    (case_dir / "holdout-1.sql").write_text(demo.source.text + "\n")
    (case_dir / "expected-1.sql").write_text(demo.expert_target.text + "\n")
    result = run_eval(load_corpus(tmp_path))
    assert result.resolved_count == 1


def test_render_table_mentions_every_case(corpus):
    table = render_table(run_eval(corpus))
    for case in corpus.cases:
        assert case.code in table
    assert "resolved 9/11" in table
