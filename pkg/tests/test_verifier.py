from __future__ import annotations

from decimal import Decimal

import pytest

from sqlporter.dialects import SRC, TGT
from sqlporter.segments import segment_from_text
from sqlporter.verifier import (
    CLOCK_DAY,
    Environment,
    EvalError,
    evaluate,
    generate_environments,
    null_grid,
    segment_variables,
    verify,
)

from conftest import FIG1_SOURCE, FIG1_TARGET


def eval_src(text: str, **bindings):
    return evaluate(segment_from_text(text, SRC, "t:0"), Environment(bindings))


def eval_tgt(text: str, **bindings):
    return evaluate(segment_from_text(text, TGT, "t:0"), Environment(bindings))


# -- evaluation semantics -----------------------------------------------------


def test_null_propagates_through_src_string_concat():
    assert eval_src('SELECT var1 + "string" AS v', var1=None) == [None]


def test_tgt_repair_coalesces_null_to_the_literal():
    assert eval_tgt('SELECT CONCAT(ISNULL(var1, ""), "string") AS v', var1=None) == ["string"]


def test_plain_concat_without_nulls():
    assert eval_src('SELECT "a" + "b" AS v') == ["ab"]
    assert eval_tgt('SELECT CONCAT("a", "b") AS v') == ["ab"]


def test_concat_propagates_null_in_tgt():
    assert eval_tgt('SELECT CONCAT(a, "x") AS v', a=None) == [None]


def test_declare_initializer_used_when_env_lacks_binding():
    assert eval_src('DECLARE x VARCHAR(4) = "q"\nSELECT x + "!" AS v') == ["q!"]
    # an environment binding overrides the initializer
    assert eval_src('DECLARE x VARCHAR(4) = "q"\nSELECT x + "!" AS v', x="z") == ["z!"]


def test_numeric_arithmetic_is_exact_decimal():
    assert eval_src("SELECT a + b AS v", a=Decimal("0.1"), b=Decimal("0.2")) == [Decimal("0.3")]
    assert eval_src("SELECT a / b AS v", a=Decimal(1), b=Decimal(8)) == [Decimal("0.125")]


def test_type_incompatible_operands_raise():
    with pytest.raises(EvalError):
        eval_src('SELECT flag + "x" AS v', flag=True)
    with pytest.raises(EvalError):
        eval_src("SELECT a - b AS v", a="s", b=Decimal(1))


def test_comparisons_are_three_valued():
    assert eval_src("SELECT a > b AS v", a=Decimal(2), b=Decimal(1)) == [True]
    assert eval_src("SELECT a > b AS v", a=None, b=Decimal(1)) == [None]
    assert eval_src("SELECT a = b AS v", a="x", b="x") == [True]


def test_bool_number_comparison_coerces():
    assert eval_src("SELECT flag = 1 AS v", flag=True) == [True]
    assert eval_src("SELECT flag = TRUE AS v", flag=True) == [True]


def test_case_and_iif_agree_on_null_condition():
    src = eval_src('SELECT IIF(q > 5, "big", "small") AS v', q=None)
    tgt = eval_tgt('SELECT CASE WHEN q > 5 THEN "big" ELSE "small" END AS v', q=None)
    assert src == tgt == ["small"]


def test_coalesce_matches_nested_isnull():
    for args in [(None, None, "z"), (None, "b", "z"), ("a", None, "z")]:
        env = dict(zip("xyw", args))
        src = eval_src("SELECT COALESCE(x, y, w) AS v", **env)
        tgt = eval_tgt("SELECT ISNULL(x, ISNULL(y, w)) AS v", **env)
        assert src == tgt


def test_clock_functions_are_fixed():
    assert eval_src("SELECT GETDATE() AS v") == [CLOCK_DAY]
    assert eval_tgt("SELECT NOW() AS v") == [CLOCK_DAY]


def test_cast_truncates_strings_and_integers():
    assert eval_src("SELECT CAST(v AS CHAR(3)) AS c", v="abcdef") == ["abc"]
    assert eval_src("SELECT CAST(v AS SIGNED) AS c", v=Decimal("3.9")) == [Decimal(3)]
    assert eval_src("SELECT CONVERT(VARCHAR(2), v) AS c", v=Decimal("125")) == ["12"]


def test_limit_expression_participates_in_output():
    values = eval_src("SELECT TOP (n) sku FROM items", n=Decimal(4), sku="s")
    assert values == ["s", Decimal(4)]


def test_qualified_names_resolve_by_terminal_part():
    assert eval_src("SELECT t.name AS n FROM t", name="bo") == ["bo"]


# -- environments ---------------------------------------------------------------


def test_segment_variables_excludes_aliases_and_qualifiers():
    segment = segment_from_text("SELECT [t].[c] AS out, other AS o2", SRC, "t:0")
    assert segment_variables(segment) == ["c", "other"]


def test_environment_generation_is_deterministic_and_typed():
    segment = segment_from_text(
        'DECLARE n INT = 1\nDECLARE b BIT = 1\nDECLARE s VARCHAR(8) = "x"\nSELECT n, b, s',
        SRC,
        "t:0",
    )
    first = generate_environments([segment], seed=7, runs=5)
    second = generate_environments([segment], seed=7, runs=5)
    assert [env.bindings for env in first] == [env.bindings for env in second]
    for env in first:
        assert isinstance(env.bindings["n"], Decimal)
        assert env.bindings["n"] == env.bindings["n"].to_integral_value()
        assert isinstance(env.bindings["b"], bool)
        assert isinstance(env.bindings["s"], str)
        assert all(value is not None for value in env.bindings.values())


def test_null_grid_covers_all_masks():
    segment = segment_from_text("SELECT a + b AS s", SRC, "t:0")
    grid = null_grid([segment])
    masks = {
        tuple(env.bindings[name] is None for name in sorted(env.bindings)) for env in grid
    }
    assert len(masks) == 4


# -- verify ----------------------------------------------------------------------


def fig1_segment():
    return segment_from_text(FIG1_SOURCE, SRC, "fig1:0")


def test_fig1_verification_accepted_with_repair():
    report = verify(fig1_segment(), FIG1_TARGET, repair_code="E001")
    assert report.grammatical
    assert report.equivalent_non_null
    assert len(report.divergences) == 1
    divergence = report.divergences[0]
    assert divergence.environment.bindings == {"var1": None}
    assert divergence.source_values == (None,)
    assert divergence.target_values == ("string",)
    assert report.intentional_repair == "E001"
    assert report.accepted


def test_fig1_divergence_rejected_without_repair_code():
    report = verify(fig1_segment(), FIG1_TARGET, repair_code=None)
    assert report.grammatical and report.equivalent_non_null
    assert not report.accepted


def test_src_text_is_not_grammatical_under_tgt():
    report = verify(fig1_segment(), FIG1_SOURCE, repair_code="E001")
    assert not report.grammatical
    assert not report.accepted


def test_wrong_literal_is_caught_with_a_witness():
    mutated = FIG1_TARGET.replace('"string"', '"wrong"')
    report = verify(fig1_segment(), mutated, repair_code="E001")
    assert report.grammatical
    assert not report.equivalent_non_null
    assert not report.accepted


def test_verification_is_deterministic_given_the_seed():
    first = verify(fig1_segment(), FIG1_TARGET, repair_code="E001", seed=11)
    second = verify(fig1_segment(), FIG1_TARGET, repair_code="E001", seed=11)
    assert first == second


def test_exact_fix_needs_no_repair_code():
    source = segment_from_text(
        'DECLARE n VARCHAR(4) = NULL\nSELECT COALESCE(n, m, "z") AS c', SRC, "t:0"
    )
    report = verify(source, 'DECLARE n VARCHAR(4) DEFAULT NULL\nSELECT ISNULL(n, ISNULL(m, "z")) AS c')
    assert report.grammatical and report.equivalent_non_null
    assert report.divergences == ()
    assert report.accepted
