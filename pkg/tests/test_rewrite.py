from __future__ import annotations

import pytest

from sqlporter.dialects import SRC
from sqlporter.nodes import NodeKind, node_count, structural_equal, walk
from sqlporter.parser import parse
from sqlporter.printer import print_sql
from sqlporter.rewrite import (
    Guard,
    Hole,
    NonTermination,
    PatternNode,
    TransformRule,
    apply,
    apply_library,
    load_rules,
    match,
    pattern_of,
    rule_from_doc,
    rule_to_doc,
    save_rules,
)


def expr_of(text: str):
    tree = parse(f"SELECT {text}", SRC)
    return tree.children[0].children[0]


PLUS_XY = PatternNode(NodeKind.BINARY_OP, "+", (Hole("x"), Hole("y")))
PLUS_XX = PatternNode(NodeKind.BINARY_OP, "+", (Hole("x"), Hole("x")))


def test_match_binds_both_operands():
    subject = expr_of('a + "s"')
    bindings = match(PLUS_XY, subject)
    assert len(bindings) == 1
    assert bindings[0].mapping["x"].token == "a"
    assert bindings[0].mapping["y"].token == "s"


def test_universal_hole_matches_every_subtree():
    tree = parse('SELECT a + "s" AS out', SRC)
    bindings = match(Hole("any"), tree)
    assert len(bindings) == node_count(tree)
    # pre-order: first binding is the whole tree
    assert bindings[0].mapping["any"] is tree


def test_nonlinear_pattern_requires_equal_subtrees():
    assert match(PLUS_XX, expr_of("a + b")) == []
    hits = match(PLUS_XX, expr_of("a + a"))
    assert len(hits) == 1


def test_kind_constrained_hole():
    only_ident = PatternNode(
        NodeKind.BINARY_OP, "+", (Hole("x", frozenset({NodeKind.IDENTIFIER})), Hole("y"))
    )
    assert match(only_ident, expr_of("a + b"))
    assert match(only_ident, expr_of("1 + b")) == []


def _rename_rule(rule_id="swap-upper", priority=0, target="LOWER"):
    return TransformRule(
        rule_id=rule_id,
        pattern=PatternNode(NodeKind.FUNCTION_CALL, "UPPER", (Hole("x"),)),
        template=PatternNode(NodeKind.FUNCTION_CALL, target, (Hole("x"),)),
        priority=priority,
    )


def test_apply_rewrites_and_counts():
    tree = parse("SELECT UPPER(a), UPPER(b)", SRC)
    rewritten, count = apply(_rename_rule(), tree)
    assert count == 2
    names = [n.token for _, n in walk(rewritten) if n.kind is NodeKind.FUNCTION_CALL]
    assert names == ["LOWER", "LOWER"]


def test_apply_with_no_matches_is_identity():
    tree = parse("SELECT 1", SRC)
    rewritten, count = apply(_rename_rule(), tree)
    assert count == 0
    assert rewritten is tree


def test_guard_blocks_rewrites():
    guarded = TransformRule(
        rule_id="guarded",
        pattern=PLUS_XY,
        template=PatternNode(NodeKind.FUNCTION_CALL, "CONCAT", (Hole("x"), Hole("y"))),
        guards=(Guard("x", "is_nullable"),),
    )
    nullable = parse('DECLARE a VARCHAR(4) = NULL\nSELECT a + "s"', SRC)
    _, count = apply(guarded, nullable)
    assert count == 1
    not_nullable = parse('DECLARE a VARCHAR(4) NOT NULL = "q"\nSELECT a + "s"', SRC)
    _, count = apply(guarded, not_nullable)
    assert count == 0


def test_template_must_bind_all_holes():
    with pytest.raises(ValueError):
        TransformRule(
            rule_id="bad",
            pattern=Hole("x"),
            template=PatternNode(NodeKind.FUNCTION_CALL, "F", (Hole("zzz"),)),
        )


def test_token_equals_and_kind_is_guards():
    rule = TransformRule(
        rule_id="only-a",
        pattern=PatternNode(NodeKind.FUNCTION_CALL, "UPPER", (Hole("x"),)),
        template=Hole("x"),
        guards=(Guard("x", "kind_is", "Identifier"), Guard("x", "token_equals", "a")),
    )
    _, count = apply(rule, parse("SELECT UPPER(a), UPPER(b), UPPER(1)", SRC))
    assert count == 1


def test_apply_library_reaches_fixpoint_with_trace():
    tree = parse("SELECT UPPER(UPPER(a))", SRC)
    rewritten, trace = apply_library([_rename_rule()], tree)
    assert [rule_id for rule_id, _ in trace] == ["swap-upper", "swap-upper"]
    printed = print_sql(rewritten, SRC)
    assert printed == "SELECT LOWER(LOWER(a))"


def test_apply_library_empty_is_identity():
    tree = parse("SELECT 1", SRC)
    rewritten, trace = apply_library([], tree)
    assert trace == []
    assert structural_equal(rewritten, tree)


def test_overlapping_rules_resolved_by_priority_then_rule_id():
    drop = TransformRule(
        rule_id="b-upper-drop",
        pattern=PatternNode(NodeKind.FUNCTION_CALL, "UPPER", (Hole("x"),)),
        template=Hole("x"),
    )
    rename = _rename_rule(rule_id="a-upper-to-lower")
    tree = parse("SELECT UPPER(name)", SRC)

    rewritten, trace = apply_library([drop, rename], tree)
    assert [rule_id for rule_id, _ in trace] == ["a-upper-to-lower"]
    assert print_sql(rewritten, SRC) == "SELECT LOWER(name)"

    # a lower priority number preempts rule_id order
    rewritten, trace = apply_library([_rename_rule(), drop.__class__(
        rule_id="b-upper-drop",
        pattern=drop.pattern,
        template=drop.template,
        priority=-1,
    )], tree)
    assert [rule_id for rule_id, _ in trace] == ["b-upper-drop"]
    assert print_sql(rewritten, SRC) == "SELECT name"


def test_growing_rule_raises_nontermination():
    grower = TransformRule(
        rule_id="grower",
        pattern=PatternNode(NodeKind.NUMBER_LIT, "1"),
        template=PatternNode(
            NodeKind.FUNCTION_CALL, "UPPER", (PatternNode(NodeKind.NUMBER_LIT, "1"),)
        ),
    )
    tree = parse("SELECT 1", SRC)
    with pytest.raises(NonTermination):
        apply_library([grower], tree)


def test_span_filter_fences_rules():
    tree = parse("SELECT UPPER(a), UPPER(b)", SRC)
    spans = [n.span for _, n in walk(tree) if n.kind is NodeKind.FUNCTION_CALL]
    first_call = spans[0]

    def only_first(rule, span):
        return first_call.contains(span)

    rewritten, trace = apply_library([_rename_rule()], tree, allowed=only_first)
    assert len(trace) == 1
    assert print_sql(rewritten, SRC) == "SELECT LOWER(a), UPPER(b)"


def test_rule_serialization_roundtrip(tmp_path):
    rule = TransformRule(
        rule_id="learned-e001",
        pattern=PatternNode(
            NodeKind.BINARY_OP, "+", (Hole("h1", frozenset({NodeKind.IDENTIFIER})), Hole("h2"))
        ),
        template=PatternNode(NodeKind.FUNCTION_CALL, "CONCAT", (Hole("h1"), Hole("h2"))),
        guards=(Guard("h1", "is_nullable"),),
        trigger="E001",
        priority=100,
    )
    assert rule_from_doc(rule_to_doc(rule)) == rule

    path = tmp_path / "rules.json"
    save_rules([rule], path)
    assert load_rules(path) == [rule]


def test_pattern_of_matches_only_identical_trees():
    subject = expr_of('a + "s"')
    pattern = pattern_of(subject)
    assert match(pattern, subject)
    assert match(pattern, expr_of('b + "s"')) == []
