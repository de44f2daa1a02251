"""Deterministic baseline converter with an explicit gap list.

The baseline plays the role of the off-the-shelf migration tool: it converts
the easy, mechanical differences (declaration initializers, function renames,
plain string concatenation, quoting, row-limit placement) and refuses eleven
registered construct classes, emitting one structured conversion error per
distinct offending subtree.  The gaps are deliberate and fixed: they are the
residual workload the learning loop exists to absorb.

Detection walks the tree pre-order; at each node the registered detectors are
tried in code order and the first hit claims the whole subtree, so flagged
constructs never nest.  Conversion then normalizes everything outside the
flagged regions with the built-in rule set and, when nothing was flagged,
prints the result under the target dialect.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from . import analysis
from .analysis import Declaration, ValueFamily
from .dialects import SRC, TGT, DialectProfile
from .nodes import AstNode, NodeKind, Span
from .parser import parse
from .printer import print_sql
from .rewrite import Guard, Hole, PatternNode, TransformRule, apply_library
from .segments import SqlSegment


@dataclass(frozen=True)
class ConversionError:
    code: str
    message: str
    span: Span
    segment_id: str
    #: Offending subtree; None only for the E000 parse-failure pseudo-error.
    construct: Optional[AstNode]

    def to_doc(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "code": self.code,
            "message": self.message,
            "span": {
                "byte_start": self.span.byte_start,
                "byte_end": self.span.byte_end,
                "line": self.span.line,
            },
        }


class BaselineStatus(Enum):
    CONVERTED = "Converted"
    FAILED = "Failed"


@dataclass(frozen=True)
class BaselineOutcome:
    status: BaselineStatus
    converted: Optional[SqlSegment]
    errors: tuple[ConversionError, ...]
    #: Tree normalized everywhere outside flagged constructs; the learned-rule
    #: pipeline and rule induction both start from this.
    residual_ast: AstNode


_Detector = Callable[[AstNode, dict[str, Declaration], str], bool]


def _family(expr: AstNode, decls: dict[str, Declaration]) -> ValueFamily:
    return analysis.family_of(expr, decls)


def _is_string_plus(expr: AstNode, decls: dict[str, Declaration]) -> bool:
    return (
        expr.kind is NodeKind.BINARY_OP
        and expr.token == "+"
        and _family(expr, decls) is ValueFamily.STRING
    )


def _concat_sides(node: AstNode, decls: dict[str, Declaration]) -> bool:
    families = {_family(child, decls) for child in node.children}
    return ValueFamily.STRING in families and families <= {ValueFamily.STRING, ValueFamily.NULL}


def _chain_leaves(node: AstNode, decls: dict[str, Declaration]) -> list[AstNode]:
    if _is_string_plus(node, decls):
        return [
            leaf for child in node.children for leaf in _chain_leaves(child, decls)
        ]
    return [node]


def _detect_null_concat(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.BINARY_OP or node.token != "+":
        return False
    if not _concat_sides(node, decls):
        return False
    if any(_is_string_plus(child, decls) for child in node.children):
        return False
    left, right = node.children
    return analysis.is_nullable(left, decls) != analysis.is_nullable(right, decls)


def _detect_nested_concat(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.BINARY_OP or node.token != "+":
        return False
    if not _concat_sides(node, decls):
        return False
    if not any(_is_string_plus(child, decls) for child in node.children):
        return False
    leaves = _chain_leaves(node, decls)
    nullable = [analysis.is_nullable(leaf, decls) for leaf in leaves]
    return any(nullable) and not all(nullable)


def _detect_coalesce_chain(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    return node.kind is NodeKind.FUNCTION_CALL and node.token == "COALESCE" and len(node.children) >= 3


def _detect_conditional(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    return node.kind is NodeKind.FUNCTION_CALL and node.token == "IIF"


def _detect_convert(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    return node.kind is NodeKind.FUNCTION_CALL and node.token == "CONVERT"


def _detect_date_arithmetic(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.BINARY_OP or node.token != "+":
        return False
    left, right = node.children
    return (
        left.kind is NodeKind.IDENTIFIER
        and _family(left, decls) is ValueFamily.DATETIME
        and _family(right, decls) is ValueFamily.NUMBER
    )


_CLOCK_PARENTS = frozenset(
    {NodeKind.BINARY_OP, NodeKind.CASE_EXPR, NodeKind.CAST_EXPR, NodeKind.FUNCTION_CALL}
)


def _detect_clock_in_expression(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind not in _CLOCK_PARENTS or node.token == "GETDATE":
        return False
    return any(
        child.kind is NodeKind.FUNCTION_CALL and child.token == "GETDATE" for child in node.children
    )


def _detect_limit_expression(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.LIMIT_CLAUSE:
        return False
    child = node.children[0]
    if child.kind is NodeKind.NUMBER_LIT:
        return False
    # An explicit integer cast is the accepted spelling of a computed limit.
    if child.kind is NodeKind.CAST_EXPR and (child.children[1].token or "") == "SIGNED":
        return False
    return True


def _detect_bracket_qualified(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.BINARY_OP or node.token != ".":
        return False
    return "[" in text[node.span.byte_start : node.span.byte_end]


def _detect_numeric_coercion(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is not NodeKind.BINARY_OP or node.token != "+":
        return False
    families = {_family(node.children[0], decls), _family(node.children[1], decls)}
    return families == {ValueFamily.NUMBER, ValueFamily.STRING}


def _detect_bool_literal(node: AstNode, decls: dict[str, Declaration], text: str) -> bool:
    if node.kind is NodeKind.BINARY_OP and node.token in analysis.COMPARISON_OPS:
        return any(child.kind is NodeKind.BOOL_LIT for child in node.children)
    return node.kind is NodeKind.BOOL_LIT


@dataclass(frozen=True)
class ErrorClass:
    code: str
    slug: str
    message: str  # "{expr}" is replaced with the offending construct
    detector: _Detector
    guard_recipe: tuple[tuple[tuple[int, ...], str, Optional[str]], ...] = ()


ERROR_REGISTRY: tuple[ErrorClass, ...] = (
    ErrorClass(
        "E001",
        "null-string-concatenation",
        "String concatenation between NULL and NOT NULL values makes the whole string AS NULL",
        _detect_null_concat,
        guard_recipe=(((0,), "is_nullable", None),),
    ),
    ErrorClass(
        "E002",
        "nested-mixed-null-concat",
        "Nested string concatenation with mixed NULL and NOT NULL parts cannot be converted: {expr}",
        _detect_nested_concat,
        guard_recipe=(((0, 0), "is_nullable", None),),
    ),
    ErrorClass(
        "E003",
        "coalesce-arity",
        "COALESCE with more than two arguments has no direct equivalent: {expr}",
        _detect_coalesce_chain,
    ),
    ErrorClass(
        "E004",
        "iif-conditional",
        "IIF is not supported by the target dialect: {expr}",
        _detect_conditional,
    ),
    ErrorClass(
        "E005",
        "convert-type-expression",
        "CONVERT(type, expr) is not supported by the target dialect: {expr}",
        _detect_convert,
    ),
    ErrorClass(
        "E006",
        "date-plus-arithmetic",
        "Date arithmetic with + is not supported by the target dialect: {expr}",
        _detect_date_arithmetic,
        guard_recipe=(((0,), "has_type", "DATETIME"),),
    ),
    ErrorClass(
        "E007",
        "getdate-in-expression",
        "GETDATE inside a larger expression is not supported by the converter: {expr}",
        _detect_clock_in_expression,
    ),
    ErrorClass(
        "E008",
        "top-with-expression",
        "TOP with a non-literal row count is not supported by the converter: {expr}",
        _detect_limit_expression,
        guard_recipe=(((0,), "kind_is", "Identifier"),),
    ),
    ErrorClass(
        "E009",
        "bracketed-qualified-identifier",
        "Bracket-quoted identifiers in qualified names are not supported by the converter: {expr}",
        _detect_bracket_qualified,
    ),
    ErrorClass(
        "E010",
        "numeric-string-coercion-in-concat",
        "Implicit numeric to string coercion in concatenation is not supported by the converter: {expr}",
        _detect_numeric_coercion,
        guard_recipe=(((0,), "has_type", "INT"),),
    ),
    ErrorClass(
        "E011",
        "boolean-literal-comparison",
        "Boolean literal comparisons must be rewritten for the target dialect: {expr}",
        _detect_bool_literal,
    ),
)

ERROR_CLASSES: dict[str, ErrorClass] = {entry.code: entry for entry in ERROR_REGISTRY}

#: Error classes whose repair intentionally changes behavior on NULL inputs
#: (coalescing a nullable operand to the empty string).  The verifier accepts
#: NULL-grid divergences only for these codes.
INTENTIONAL_REPAIRS: dict[str, str] = {
    "E001": "nullable operand coalesced to empty string",
    "E002": "nullable chain head coalesced to empty string",
}


def gap_list() -> list[tuple[str, str]]:
    """The registered error classes, in registry order."""
    return [(entry.code, entry.slug) for entry in ERROR_REGISTRY]


def errors_to_jsonl(errors: list[ConversionError]) -> str:
    """One JSON object per line: segment_id, code, message, span."""
    import json

    return "".join(json.dumps(error.to_doc()) + "\n" for error in errors)


def detect(segment: SqlSegment) -> list[ConversionError]:
    """Flag every gap-list construct in a segment, outermost-first."""
    declarations = analysis.scan_declarations(segment.ast)
    errors: list[ConversionError] = []

    def visit(current: AstNode) -> None:
        for entry in ERROR_REGISTRY:
            if entry.detector(current, declarations, segment.text):
                errors.append(_make_error(entry, current, segment))
                return
        for child in current.children:
            visit(child)

    visit(segment.ast)
    return errors


def _make_error(entry: ErrorClass, construct: AstNode, segment: SqlSegment) -> ConversionError:
    message = entry.message
    if "{expr}" in message:
        message = message.replace("{expr}", print_sql(construct, SRC))
    return ConversionError(entry.code, message, construct.span, segment.segment_id, construct)


# -- built-in conversion rules -------------------------------------------------


def builtin_rules(src: DialectProfile = SRC, tgt: DialectProfile = TGT) -> list[TransformRule]:
    """Rules the baseline applies: catalog renames, pair-coalesce, plain concat."""
    rules: list[TransformRule] = []
    for canonical in sorted(src.function_catalog):
        src_entry = src.function_catalog[canonical]
        tgt_entry = tgt.function_catalog.get(canonical)
        if tgt_entry is None or src_entry.name == tgt_entry.name or src_entry.arity < 0:
            continue
        holes = tuple(Hole(f"a{index}") for index in range(src_entry.arity))
        rules.append(
            TransformRule(
                rule_id=f"builtin-rename-{src_entry.name.lower()}",
                pattern=PatternNode(NodeKind.FUNCTION_CALL, src_entry.name, holes),
                template=PatternNode(NodeKind.FUNCTION_CALL, tgt_entry.name, holes),
            )
        )
    chain = src.catalog_name("coalesce_chain")
    pair = tgt.catalog_name("coalesce_pair")
    if chain and pair and chain != pair:
        two = (Hole("a0"), Hole("a1"))
        rules.append(
            TransformRule(
                rule_id="builtin-coalesce-pair",
                pattern=PatternNode(NodeKind.FUNCTION_CALL, chain, two),
                template=PatternNode(NodeKind.FUNCTION_CALL, pair, two),
            )
        )
    concat = tgt.catalog_name("string_concat")
    if concat:
        sides = (Hole("a0"), Hole("a1"))
        for suffix, guarded in (("left", "a0"), ("right", "a1")):
            rules.append(
                TransformRule(
                    rule_id=f"builtin-concat-{suffix}",
                    pattern=PatternNode(NodeKind.BINARY_OP, "+", sides),
                    template=PatternNode(NodeKind.FUNCTION_CALL, concat, sides),
                    guards=(Guard(guarded, "is_string_expr"),),
                )
            )
    return rules


def _overlaps(a: Span, b: Span) -> bool:
    return a.byte_start < b.byte_end and b.byte_start < a.byte_end


def normalize(tree: AstNode, frozen: list[Span]) -> AstNode:
    """Apply the built-in rules everywhere except inside flagged regions."""
    allowed = None
    if frozen:
        def allowed(rule: TransformRule, span: Span) -> bool:
            return not any(_overlaps(span, region) for region in frozen)

    normalized, _ = apply_library(builtin_rules(), tree, allowed=allowed)
    return normalized


def baseline_convert(segment: SqlSegment, tgt: DialectProfile = TGT) -> BaselineOutcome:
    """Convert a SRC segment or fail with one error per offending construct."""
    errors = detect(segment)
    frozen = [error.construct.span for error in errors]
    residual = normalize(segment.ast, frozen)
    if errors:
        return BaselineOutcome(BaselineStatus.FAILED, None, tuple(errors), residual)
    text = print_sql(residual, tgt)
    converted = SqlSegment(text, tgt.name, parse(text, tgt), segment.segment_id)
    return BaselineOutcome(BaselineStatus.CONVERTED, converted, (), residual)
