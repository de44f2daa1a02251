from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from sqlporter.baseline import BaselineStatus, baseline_convert, builtin_rules
from sqlporter.dialects import SRC, TGT
from sqlporter.nodes import node_count, structural_equal, validate_tree, walk
from sqlporter.parser import parse
from sqlporter.printer import print_sql
from sqlporter.rewrite import Hole, apply_library, match
from sqlporter.segments import segment_from_text

from fuzztrees import random_script

identifiers = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True).filter(
    lambda s: s.upper() not in {"AS", "END", "NOT", "NULL", "TOP", "CASE", "WHEN", "THEN", "ELSE", "CAST", "TRUE", "FALSE", "FROM"}
)
numbers = st.integers(min_value=0, max_value=999).map(str)
strings = st.text(alphabet="abcdefghij", min_size=0, max_size=5).map(lambda s: f'"{s}"')
atoms = st.one_of(identifiers, numbers, strings)


@st.composite
def expressions(draw, depth=2):
    if depth == 0:
        return draw(atoms)
    choice = draw(st.integers(min_value=0, max_value=3))
    if choice == 0:
        return draw(atoms)
    if choice == 1:
        op = draw(st.sampled_from(["+", "-", "*", "/"]))
        return f"{draw(expressions(depth=depth - 1))} {op} {draw(expressions(depth=depth - 1))}"
    if choice == 2:
        return f"UPPER({draw(expressions(depth=depth - 1))})"
    return f"ISNULL({draw(expressions(depth=depth - 1))}, {draw(expressions(depth=depth - 1))})"


@given(expressions())
@settings(max_examples=150, deadline=None)
def test_roundtrip_property_on_generated_expressions(expr):
    text = f"SELECT {expr}"
    first = parse(text, SRC)
    printed = print_sql(first, SRC)
    assert structural_equal(parse(printed, SRC), first)


@given(expressions())
@settings(max_examples=100, deadline=None)
def test_universal_hole_binds_every_subtree(expr):
    tree = parse(f"SELECT {expr}", SRC)
    assert len(match(Hole("x"), tree)) == node_count(tree)


def test_random_scripts_roundtrip_and_stay_valid():
    rng = random.Random(1234)
    for _ in range(200):
        text = random_script(rng)
        tree = parse(text, SRC)
        validate_tree(tree)
        printed = print_sql(tree, SRC)
        assert structural_equal(parse(printed, SRC), tree)


def test_builtin_normalization_terminates_on_random_trees():
    rng = random.Random(99)
    rules = builtin_rules()
    for _ in range(300):
        tree = parse(random_script(rng), SRC)
        rewritten, _ = apply_library(rules, tree)
        validate_tree(rewritten)


def test_fuzzed_conversions_reparse_under_tgt():
    rng = random.Random(2718)
    converted = 0
    for index in range(300):
        segment = segment_from_text(random_script(rng), SRC, f"fuzz:{index}")
        outcome = baseline_convert(segment)
        if outcome.status is BaselineStatus.CONVERTED:
            converted += 1
            reparsed = parse(outcome.converted.text, TGT)
            validate_tree(reparsed)
    assert converted > 50  # the generator must exercise the happy path too


def test_span_containment_on_random_scripts():
    rng = random.Random(31)
    for _ in range(100):
        tree = parse(random_script(rng), SRC)
        for _, parent in walk(tree):
            for child in parent.children:
                assert parent.span.contains(child.span)
