"""Dialect profiles: declarative descriptions of one SQL dialect's variant points.

A profile is pure data.  The parser, printer and converter consult it for the
declaration-initializer keyword, string concatenation style, quoting rules,
row-limit placement, NULL semantics and the function catalog.  Two built-in
profiles ship with the package (``SRC`` and ``TGT``); additional profiles can
be loaded from JSON documents with the same field layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class DeclareInitializer(str, Enum):
    EQUALS_SIGN = "EqualsSign"
    DEFAULT_KEYWORD = "DefaultKeyword"


class StringConcat(str, Enum):
    PLUS_OPERATOR = "PlusOperator"
    CONCAT_FUNCTION = "ConcatFunction"
    # Not used by either built-in profile; available to loaded profiles so the
    # `||` operator spelling has a home.
    PIPES_OPERATOR = "PipesOperator"


class StringQuote(str, Enum):
    DOUBLE = "Double"
    SINGLE = "Single"
    BOTH = "Both"


class IdentifierQuote(str, Enum):
    BRACKETS = "Brackets"
    BACKTICKS = "Backticks"
    DOUBLE_QUOTES = "DoubleQuotes"


class RowLimit(str, Enum):
    TOP_PREFIX = "TopPrefix"
    LIMIT_SUFFIX = "LimitSuffix"


class NullConcatSemantics(str, Enum):
    PROPAGATE_NULL = "PropagateNull"
    TREAT_AS_EMPTY = "TreatAsEmpty"


@dataclass(frozen=True)
class CatalogEntry:
    """Dialect spelling of a canonical function; arity -1 means variadic (>= 2)."""

    name: str
    arity: int


class ProfileError(ValueError):
    """A profile document is inconsistent or unusable."""


@dataclass(frozen=True)
class DialectProfile:
    name: str
    declare_initializer: DeclareInitializer
    string_concat: StringConcat
    null_coalesce_fn: CatalogEntry
    string_quote: StringQuote
    identifier_quote: IdentifierQuote
    row_limit: RowLimit
    null_concat_semantics: NullConcatSemantics
    function_catalog: dict[str, CatalogEntry] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.identifier_quote is IdentifierQuote.DOUBLE_QUOTES and self.string_quote in (
            StringQuote.DOUBLE,
            StringQuote.BOTH,
        ):
            raise ProfileError(
                f"profile {self.name!r}: double-quoted identifiers clash with double-quoted strings"
            )
        coalesce = self.function_catalog.get("coalesce_pair")
        if coalesce is not None and coalesce != self.null_coalesce_fn:
            raise ProfileError(
                f"profile {self.name!r}: null_coalesce_fn disagrees with catalog coalesce_pair"
            )

    @property
    def known_functions(self) -> dict[str, int]:
        """Callable names in this dialect, mapped to arity (-1 = variadic)."""
        return {entry.name: entry.arity for entry in self.function_catalog.values()}

    def catalog_name(self, canonical: str) -> str | None:
        entry = self.function_catalog.get(canonical)
        return entry.name if entry else None

    def to_document(self) -> dict:
        return {
            "name": self.name,
            "declare_initializer": self.declare_initializer.value,
            "string_concat": self.string_concat.value,
            "null_coalesce_fn": {"name": self.null_coalesce_fn.name, "arity": self.null_coalesce_fn.arity},
            "string_quote": self.string_quote.value,
            "identifier_quote": self.identifier_quote.value,
            "row_limit": self.row_limit.value,
            "null_concat_semantics": self.null_concat_semantics.value,
            "function_catalog": {
                canonical: {"name": entry.name, "arity": entry.arity}
                for canonical, entry in sorted(self.function_catalog.items())
            },
        }


def profile_from_document(doc: dict) -> DialectProfile:
    try:
        return DialectProfile(
            name=doc["name"],
            declare_initializer=DeclareInitializer(doc["declare_initializer"]),
            string_concat=StringConcat(doc["string_concat"]),
            null_coalesce_fn=CatalogEntry(**doc["null_coalesce_fn"]),
            string_quote=StringQuote(doc["string_quote"]),
            identifier_quote=IdentifierQuote(doc["identifier_quote"]),
            row_limit=RowLimit(doc["row_limit"]),
            null_concat_semantics=NullConcatSemantics(doc["null_concat_semantics"]),
            function_catalog={
                canonical: CatalogEntry(**entry) for canonical, entry in doc["function_catalog"].items()
            },
        )
    except KeyError as missing:
        raise ProfileError(f"profile document missing field {missing}") from None


def load_profile(path: str | Path) -> DialectProfile:
    return profile_from_document(json.loads(Path(path).read_text()))


def save_profile(profile: DialectProfile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(profile.to_document(), indent=2) + "\n")


SRC = DialectProfile(
    name="SRC",
    declare_initializer=DeclareInitializer.EQUALS_SIGN,
    string_concat=StringConcat.PLUS_OPERATOR,
    null_coalesce_fn=CatalogEntry("ISNULL", 2),
    string_quote=StringQuote.DOUBLE,
    identifier_quote=IdentifierQuote.BRACKETS,
    row_limit=RowLimit.TOP_PREFIX,
    null_concat_semantics=NullConcatSemantics.PROPAGATE_NULL,
    function_catalog={
        "current_timestamp": CatalogEntry("GETDATE", 0),
        "string_length": CatalogEntry("LEN", 1),
        "coalesce_pair": CatalogEntry("ISNULL", 2),
        "coalesce_chain": CatalogEntry("COALESCE", -1),
        "conditional": CatalogEntry("IIF", 3),
        "convert_type": CatalogEntry("CONVERT", 2),
        "upper": CatalogEntry("UPPER", 1),
        "lower": CatalogEntry("LOWER", 1),
    },
)

TGT = DialectProfile(
    name="TGT",
    declare_initializer=DeclareInitializer.DEFAULT_KEYWORD,
    string_concat=StringConcat.CONCAT_FUNCTION,
    null_coalesce_fn=CatalogEntry("ISNULL", 2),
    string_quote=StringQuote.DOUBLE,
    identifier_quote=IdentifierQuote.BACKTICKS,
    row_limit=RowLimit.LIMIT_SUFFIX,
    null_concat_semantics=NullConcatSemantics.PROPAGATE_NULL,
    function_catalog={
        "current_timestamp": CatalogEntry("NOW", 0),
        "string_length": CatalogEntry("CHAR_LENGTH", 1),
        "coalesce_pair": CatalogEntry("ISNULL", 2),
        "string_concat": CatalogEntry("CONCAT", -1),
        "date_add": CatalogEntry("DATE_ADD", 2),
        "upper": CatalogEntry("UPPER", 1),
        "lower": CatalogEntry("LOWER", 1),
    },
)

BUILTIN_PROFILES: dict[str, DialectProfile] = {"SRC": SRC, "TGT": TGT}


def get_profile(name: str) -> DialectProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        raise ProfileError(f"unknown dialect profile {name!r}") from None
