from __future__ import annotations

import json

import pytest

from sqlporter.baseline import builtin_rules
from sqlporter.dialects import (
    SRC,
    TGT,
    BUILTIN_PROFILES,
    CatalogEntry,
    DeclareInitializer,
    DialectProfile,
    IdentifierQuote,
    NullConcatSemantics,
    ProfileError,
    RowLimit,
    StringConcat,
    StringQuote,
    load_profile,
    profile_from_document,
)
from sqlporter.nodes import NodeKind
from sqlporter.parser import parse
from sqlporter.printer import print_sql
from sqlporter.rewrite import Hole

from conftest import REPO_ROOT


def test_exactly_two_builtin_profiles():
    assert sorted(BUILTIN_PROFILES) == ["SRC", "TGT"]


def test_shipped_profile_documents_match_builtins():
    assert load_profile(REPO_ROOT / "profiles" / "SRC.json") == SRC
    assert load_profile(REPO_ROOT / "profiles" / "TGT.json") == TGT


def test_profile_document_roundtrip():
    for profile in (SRC, TGT):
        assert profile_from_document(profile.to_document()) == profile


def test_null_coalesce_consistency_enforced():
    doc = SRC.to_document()
    doc["null_coalesce_fn"] = {"name": "IFNULL", "arity": 2}
    with pytest.raises(ProfileError):
        profile_from_document(doc)


def test_double_quoted_identifiers_clash_with_double_quoted_strings():
    doc = SRC.to_document()
    doc["identifier_quote"] = "DoubleQuotes"
    with pytest.raises(ProfileError):
        profile_from_document(doc)


def _functions_in(pattern) -> set[str]:
    if isinstance(pattern, Hole):
        return set()
    names = {pattern.token} if pattern.kind is NodeKind.FUNCTION_CALL else set()
    for child in pattern.children:
        names |= _functions_in(child)
    return names


def test_every_function_referenced_by_builtin_rules_is_catalogued():
    known = set(SRC.known_functions) | set(TGT.known_functions)
    for rule in builtin_rules():
        for pattern in (rule.pattern, rule.template):
            assert _functions_in(pattern) <= known


def test_custom_profile_with_pipes_concat_and_single_quotes():
    doc = {
        "name": "PIPES",
        "declare_initializer": "DefaultKeyword",
        "string_concat": "PipesOperator",
        "null_coalesce_fn": {"name": "COALESCE", "arity": 2},
        "string_quote": "Single",
        "identifier_quote": "DoubleQuotes",
        "row_limit": "LimitSuffix",
        "null_concat_semantics": "TreatAsEmpty",
        "function_catalog": {"coalesce_pair": {"name": "COALESCE", "arity": 2}},
    }
    profile = profile_from_document(doc)
    tree = parse("SELECT a || 'x' AS s", profile)
    concat = tree.children[0].children[0].children[0]
    assert concat.token == "||"
    assert print_sql(tree, profile) == "SELECT a || 'x' AS s"
    # double quotes are identifiers in this profile
    quoted = parse('SELECT "weird name" AS n', profile)
    ident = quoted.children[0].children[0].children[0]
    assert ident.kind is NodeKind.IDENTIFIER and ident.token == "weird name"


def test_pipes_operator_rejected_by_builtin_profiles():
    from sqlporter.parser import ParseError

    with pytest.raises(ParseError):
        parse("SELECT a || b AS s", SRC)
    with pytest.raises(ParseError):
        parse("SELECT a || b AS s", TGT)
