"""Declaration scanning and lightweight static typing.

The converter, the rule guards and the verifier all need two facts that can
be read off a segment's tree alone: which identifiers may hold NULL, and the
value family each expression produces.  Nullability follows the declaration:
a variable declared without a NOT NULL marker is nullable.  Undeclared
identifiers are assumed to be non-nullable strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .nodes import COMPARISON_OPS, AstNode, NodeKind, walk


class ValueFamily(Enum):
    STRING = "string"
    NUMBER = "number"
    BOOL = "bool"
    DATETIME = "datetime"
    NULL = "null"


_STRING_TYPES = ("VARCHAR", "CHAR", "TEXT")
_NUMBER_TYPES = ("INT", "DECIMAL", "NUMERIC", "FLOAT", "SIGNED")
_BOOL_TYPES = ("BIT", "BOOL")
_DATE_TYPES = ("DATETIME", "DATE", "TIMESTAMP")

# Value families of function results, keyed by the union of both dialects'
# spellings; ISNULL/COALESCE take the family of their first argument.
_FUNCTION_FAMILIES = {
    "GETDATE": ValueFamily.DATETIME,
    "NOW": ValueFamily.DATETIME,
    "DATE_ADD": ValueFamily.DATETIME,
    "LEN": ValueFamily.NUMBER,
    "CHAR_LENGTH": ValueFamily.NUMBER,
    "UPPER": ValueFamily.STRING,
    "LOWER": ValueFamily.STRING,
    "CONCAT": ValueFamily.STRING,
}


@dataclass(frozen=True)
class Declaration:
    name: str
    type_token: str
    nullable: bool
    initializer: Optional[AstNode]

    @property
    def base_type(self) -> str:
        return self.type_token.split("(", 1)[0]

    @property
    def family(self) -> ValueFamily:
        return family_of_type(self.base_type)


def family_of_type(base_type: str) -> ValueFamily:
    if base_type in _STRING_TYPES:
        return ValueFamily.STRING
    if base_type in _NUMBER_TYPES:
        return ValueFamily.NUMBER
    if base_type in _BOOL_TYPES:
        return ValueFamily.BOOL
    if base_type in _DATE_TYPES:
        return ValueFamily.DATETIME
    return ValueFamily.STRING


def scan_declarations(root: AstNode) -> dict[str, Declaration]:
    """Collect DECLARE statements (last declaration of a name wins)."""
    declarations: dict[str, Declaration] = {}
    for _, current in walk(root):
        if current.kind is not NodeKind.DECLARE_STMT:
            continue
        name = current.children[0].token or ""
        declarations[name] = Declaration(
            name=name,
            type_token=current.children[1].token or "",
            nullable=current.token != "NOT NULL",
            initializer=current.children[2] if len(current.children) == 3 else None,
        )
    return declarations


def variable_name(identifier: AstNode) -> str:
    """Terminal name of a plain or dot-qualified identifier."""
    current = identifier
    while current.kind is NodeKind.BINARY_OP and current.token == ".":
        current = current.children[1]
    return current.token or ""


def is_nullable(expr: AstNode, declarations: dict[str, Declaration]) -> bool:
    """An expression may be NULL when it contains a NULL literal or any
    identifier declared without NOT NULL."""
    for _, current in walk(expr):
        if current.kind is NodeKind.NULL_LIT:
            return True
        if current.kind is NodeKind.IDENTIFIER:
            declaration = declarations.get(current.token or "")
            if declaration is not None and declaration.nullable:
                return True
    return False


def family_of(expr: AstNode, declarations: dict[str, Declaration]) -> ValueFamily:
    """Best-effort static value family used by gap detectors."""
    kind = expr.kind
    if kind is NodeKind.STRING_LIT:
        return ValueFamily.STRING
    if kind is NodeKind.NUMBER_LIT:
        return ValueFamily.NUMBER
    if kind is NodeKind.BOOL_LIT:
        return ValueFamily.BOOL
    if kind is NodeKind.NULL_LIT:
        return ValueFamily.NULL
    if kind is NodeKind.IDENTIFIER:
        declaration = declarations.get(expr.token or "")
        return declaration.family if declaration else ValueFamily.STRING
    if kind is NodeKind.CAST_EXPR:
        return family_of_type((expr.children[1].token or "").split("(", 1)[0])
    if kind is NodeKind.CASE_EXPR:
        branches = list(expr.children)
        then_expr = branches[1] if len(branches) > 1 else branches[-1]
        return family_of(then_expr, declarations)
    if kind is NodeKind.FUNCTION_CALL:
        name = expr.token or ""
        if name in _FUNCTION_FAMILIES:
            return _FUNCTION_FAMILIES[name]
        if name in ("ISNULL", "COALESCE", "IIF"):
            first = expr.children[1] if name == "IIF" else expr.children[0]
            return family_of(first, declarations)
        if name == "CONVERT":
            return family_of_type((expr.children[0].token or "").split("(", 1)[0])
        return ValueFamily.STRING
    if kind is NodeKind.BINARY_OP:
        op = expr.token or ""
        if op in COMPARISON_OPS:
            return ValueFamily.BOOL
        if op == ".":
            declaration = declarations.get(variable_name(expr))
            return declaration.family if declaration else ValueFamily.STRING
        if op == "||":
            return ValueFamily.STRING
        left = family_of(expr.children[0], declarations)
        right = family_of(expr.children[1], declarations)
        if op == "+":
            if ValueFamily.STRING in (left, right):
                return ValueFamily.STRING
            if left is ValueFamily.DATETIME:
                return ValueFamily.DATETIME
        return ValueFamily.NUMBER
    return ValueFamily.STRING


def declared_base_type(expr: AstNode, declarations: dict[str, Declaration]) -> Optional[str]:
    """Base type of a declared identifier, or None for anything else."""
    if expr.kind is not NodeKind.IDENTIFIER:
        return None
    declaration = declarations.get(expr.token or "")
    return declaration.base_type if declaration else None
