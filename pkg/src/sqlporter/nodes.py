"""Dialect-neutral syntax trees with source spans.

Every parsed statement becomes an immutable ``AstNode`` tree.  Nodes carry a
``kind``, an ordered tuple of children, an optional ``token`` (the lexeme for
leaves, the operator symbol for binary operations, the function name for
calls) and a source ``Span``.  Trees built by rewriting carry synthetic spans
stamped from the match site.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional


class NodeKind(str, Enum):
    SCRIPT = "Script"
    DECLARE_STMT = "DeclareStmt"
    SELECT_STMT = "SelectStmt"
    ALIAS = "Alias"
    BINARY_OP = "BinaryOp"
    FUNCTION_CALL = "FunctionCall"
    IDENTIFIER = "Identifier"
    STRING_LIT = "StringLit"
    NUMBER_LIT = "NumberLit"
    NULL_LIT = "NullLit"
    BOOL_LIT = "BoolLit"
    CASE_EXPR = "CaseExpr"
    CAST_EXPR = "CastExpr"
    TYPE_NAME = "TypeName"
    LIMIT_CLAUSE = "LimitClause"


#: Kinds that never have children.
LEAF_KINDS = frozenset(
    {
        NodeKind.IDENTIFIER,
        NodeKind.STRING_LIT,
        NodeKind.NUMBER_LIT,
        NodeKind.NULL_LIT,
        NodeKind.BOOL_LIT,
        NodeKind.TYPE_NAME,
    }
)

#: Kinds that form expressions (as opposed to statements and clauses).
EXPR_KINDS = frozenset(
    {
        NodeKind.ALIAS,
        NodeKind.BINARY_OP,
        NodeKind.FUNCTION_CALL,
        NodeKind.CASE_EXPR,
        NodeKind.CAST_EXPR,
    }
    | LEAF_KINDS
)

COMPARISON_OPS = frozenset({"=", "<>", "<", "<=", ">", ">="})


@dataclass(frozen=True)
class Span:
    """Half-open byte range plus the 1-based line of its first byte."""

    byte_start: int = 0
    byte_end: int = 0
    line: int = 1

    def contains(self, other: "Span") -> bool:
        return self.byte_start <= other.byte_start and other.byte_end <= self.byte_end


SYNTHETIC = Span()


class InvalidTreeError(Exception):
    """A tree violates a structural invariant."""


@dataclass(frozen=True)
class AstNode:
    kind: NodeKind
    children: tuple["AstNode", ...] = ()
    token: Optional[str] = None
    span: Span = SYNTHETIC

    def with_children(self, children: tuple["AstNode", ...]) -> "AstNode":
        return AstNode(self.kind, children, self.token, self.span)

    def __repr__(self) -> str:  # compact, for test failures
        return to_sexpr(self)


def node(kind: NodeKind, *children: AstNode, token: Optional[str] = None, span: Span = SYNTHETIC) -> AstNode:
    return AstNode(kind, tuple(children), token, span)


def walk(root: AstNode) -> Iterator[tuple[tuple[int, ...], AstNode]]:
    """Yield (path, node) pairs in pre-order; paths are child-index tuples."""
    stack: list[tuple[tuple[int, ...], AstNode]] = [((), root)]
    while stack:
        path, current = stack.pop()
        yield path, current
        for index in range(len(current.children) - 1, -1, -1):
            stack.append((path + (index,), current.children[index]))


def subtree_at(root: AstNode, path: tuple[int, ...]) -> AstNode:
    current = root
    for index in path:
        current = current.children[index]
    return current


def replace_at(root: AstNode, path: tuple[int, ...], replacement: AstNode) -> AstNode:
    if not path:
        return replacement
    head, rest = path[0], path[1:]
    children = list(root.children)
    children[head] = replace_at(children[head], rest, replacement)
    return root.with_children(tuple(children))


def node_count(root: AstNode) -> int:
    return sum(1 for _ in walk(root))


def structural_equal(a: AstNode, b: AstNode) -> bool:
    """True iff kinds, tokens and child lists match recursively; spans are ignored."""
    if a.kind is not b.kind or a.token != b.token or len(a.children) != len(b.children):
        return False
    return all(structural_equal(x, y) for x, y in zip(a.children, b.children))


def validate_tree(root: AstNode) -> None:
    """Raise InvalidTreeError on any structural violation.

    Checks leaf-ness, per-kind child arities, span sanity and span nesting.
    Synthetic spans (from rewriting) are exempt from the nesting check against
    non-synthetic ancestors only when both ends are zero.
    """
    for path, current in walk(root):
        kind = current.kind
        if kind in LEAF_KINDS and current.children:
            raise InvalidTreeError(f"{kind.value} at {path} must be a leaf")
        if current.span.byte_start > current.span.byte_end:
            raise InvalidTreeError(f"negative span on {kind.value} at {path}")
        if kind is NodeKind.BINARY_OP:
            if len(current.children) != 2 or not current.token:
                raise InvalidTreeError(f"BinaryOp at {path} needs an operator and 2 children")
        elif kind is NodeKind.FUNCTION_CALL:
            if not current.token:
                raise InvalidTreeError(f"FunctionCall at {path} needs a name")
        elif kind is NodeKind.ALIAS:
            if len(current.children) != 2 or current.children[1].kind is not NodeKind.IDENTIFIER:
                raise InvalidTreeError(f"Alias at {path} needs (expr, Identifier)")
        elif kind is NodeKind.CAST_EXPR:
            if len(current.children) != 2 or current.children[1].kind is not NodeKind.TYPE_NAME:
                raise InvalidTreeError(f"CastExpr at {path} needs (expr, TypeName)")
        elif kind is NodeKind.LIMIT_CLAUSE:
            if len(current.children) != 1:
                raise InvalidTreeError(f"LimitClause at {path} needs exactly 1 child")
        elif kind is NodeKind.DECLARE_STMT:
            if len(current.children) not in (2, 3):
                raise InvalidTreeError(f"DeclareStmt at {path} needs 2 or 3 children")
            if current.children[0].kind is not NodeKind.IDENTIFIER:
                raise InvalidTreeError(f"DeclareStmt at {path} must declare an Identifier")
            if current.children[1].kind is not NodeKind.TYPE_NAME:
                raise InvalidTreeError(f"DeclareStmt at {path} must declare a TypeName")
        elif kind is NodeKind.CASE_EXPR:
            if len(current.children) < 2:
                raise InvalidTreeError(f"CaseExpr at {path} needs at least WHEN/THEN")
        elif kind in (NodeKind.SCRIPT, NodeKind.SELECT_STMT):
            if not current.children:
                raise InvalidTreeError(f"{kind.value} at {path} must not be empty")
        for child in current.children:
            if current.span == SYNTHETIC or child.span == SYNTHETIC:
                continue
            if not current.span.contains(child.span):
                raise InvalidTreeError(
                    f"span of child {child.kind.value} escapes parent {kind.value} at {path}"
                )


def to_sexpr(root: AstNode) -> str:
    """Compact s-expression rendering used in traces and test output."""
    label = root.kind.value
    if root.token is not None:
        label += f" {root.token!r}"
    if not root.children:
        return f"({label})"
    inner = " ".join(to_sexpr(child) for child in root.children)
    return f"({label} {inner})"
