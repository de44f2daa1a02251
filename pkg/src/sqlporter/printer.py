"""Dialect-aware pretty-printer.

Output is canonical: uppercase keywords, single spaces, one statement per
line, minimal parentheses, and the profile's preferred quote styles.  The
printer refuses trees that use a variant point the profile lacks (e.g. a `+`
string concatenation printed for a ConcatFunction dialect).
"""

from __future__ import annotations

import re

from .dialects import (
    DeclareInitializer,
    DialectProfile,
    IdentifierQuote,
    RowLimit,
    StringConcat,
    StringQuote,
)
from .lexer import keywords_for
from .nodes import AstNode, NodeKind

__all__ = ["print_sql", "UnprintableNode"]


class UnprintableNode(Exception):
    """The tree uses a variant point the target dialect cannot express."""


_PLAIN_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# Binding strength; higher binds tighter.  "." is primary-like.
_PRECEDENCE = {
    "=": 10, "<>": 10, "<": 10, "<=": 10, ">": 10, ">=": 10,
    "+": 20, "-": 20, "||": 20,
    "*": 30, "/": 30,
    ".": 40,
}


def print_sql(ast: AstNode, profile: DialectProfile) -> str:
    """Render a tree as canonical source text for ``profile``."""
    printer = _Printer(profile)
    if ast.kind is NodeKind.SCRIPT:
        return "\n".join(printer.statement(child) for child in ast.children)
    if ast.kind in (NodeKind.DECLARE_STMT, NodeKind.SELECT_STMT):
        return printer.statement(ast)
    return printer.expr(ast, 0)


class _Printer:
    def __init__(self, profile: DialectProfile):
        self.profile = profile
        self.reserved = keywords_for(profile)

    def statement(self, stmt: AstNode) -> str:
        if stmt.kind is NodeKind.DECLARE_STMT:
            return self.declare(stmt)
        if stmt.kind is NodeKind.SELECT_STMT:
            return self.select(stmt)
        raise UnprintableNode(f"{stmt.kind.value} is not a statement")

    def declare(self, stmt: AstNode) -> str:
        name = self.identifier(stmt.children[0])
        type_name = stmt.children[1].token or ""
        parts = [f"DECLARE {name} {type_name}"]
        if stmt.token == "NOT NULL":
            parts.append("NOT NULL")
        if len(stmt.children) == 3:
            initializer = (
                "DEFAULT"
                if self.profile.declare_initializer is DeclareInitializer.DEFAULT_KEYWORD
                else "="
            )
            parts.append(f"{initializer} {self.expr(stmt.children[2], 0)}")
        return " ".join(parts)

    def select(self, stmt: AstNode) -> str:
        limit = None
        items = list(stmt.children)
        if items and items[-1].kind is NodeKind.LIMIT_CLAUSE:
            limit = items.pop()
        rendered = ", ".join(self.select_item(item) for item in items)
        out = "SELECT "
        if limit is not None and self.profile.row_limit is RowLimit.TOP_PREFIX:
            out += f"{self.top(limit)} "
        out += rendered
        if stmt.token:
            out += f" FROM {self.quote_identifier(stmt.token)}"
        if limit is not None and self.profile.row_limit is RowLimit.LIMIT_SUFFIX:
            out += f" LIMIT {self.expr(limit.children[0], 0)}"
        return out

    def top(self, limit: AstNode) -> str:
        child = limit.children[0]
        if child.kind is NodeKind.NUMBER_LIT:
            return f"TOP {child.token}"
        return f"TOP ({self.expr(child, 0)})"

    def select_item(self, item: AstNode) -> str:
        if item.kind is NodeKind.ALIAS:
            return f"{self.expr(item.children[0], 0)} AS {self.identifier(item.children[1])}"
        return self.expr(item, 0)

    # -- expressions -------------------------------------------------------

    def expr(self, current: AstNode, min_prec: int) -> str:
        kind = current.kind
        if kind is NodeKind.NUMBER_LIT:
            return current.token or "0"
        if kind is NodeKind.STRING_LIT:
            return self.string_literal(current.token or "")
        if kind is NodeKind.NULL_LIT:
            return "NULL"
        if kind is NodeKind.BOOL_LIT:
            return current.token or "TRUE"
        if kind is NodeKind.IDENTIFIER:
            return self.identifier(current)
        if kind is NodeKind.TYPE_NAME:
            return current.token or ""
        if kind is NodeKind.BINARY_OP:
            return self.binary(current, min_prec)
        if kind is NodeKind.FUNCTION_CALL:
            args = ", ".join(self.expr(child, 0) for child in current.children)
            return f"{current.token}({args})"
        if kind is NodeKind.CASE_EXPR:
            return self.case(current)
        if kind is NodeKind.CAST_EXPR:
            inner = self.expr(current.children[0], 0)
            return f"CAST({inner} AS {current.children[1].token})"
        if kind is NodeKind.LIMIT_CLAUSE:
            if self.profile.row_limit is RowLimit.TOP_PREFIX:
                return self.top(current)
            return f"LIMIT {self.expr(current.children[0], 0)}"
        raise UnprintableNode(f"cannot print {kind.value} as an expression")

    def binary(self, current: AstNode, min_prec: int) -> str:
        op = current.token or ""
        prec = _PRECEDENCE.get(op)
        if prec is None:
            raise UnprintableNode(f"unknown operator {op!r}")
        if op == "+" and self.profile.string_concat is not StringConcat.PLUS_OPERATOR:
            if any(child.kind is NodeKind.STRING_LIT for child in current.children):
                raise UnprintableNode(
                    f"dialect {self.profile.name} has no `+` string concatenation"
                )
        if op == "||" and self.profile.string_concat is not StringConcat.PIPES_OPERATOR:
            raise UnprintableNode(f"dialect {self.profile.name} has no `||` operator")
        left, right = current.children
        if op == ".":
            return f"{self.expr(left, prec)}.{self.expr(right, prec + 1)}"
        # Comparisons are non-associative: parenthesize comparison operands.
        left_floor = prec + 1 if prec == 10 else prec
        text = f"{self.expr(left, left_floor)} {op} {self.expr(right, prec + 1)}"
        if prec < min_prec:
            return f"({text})"
        return text

    def case(self, current: AstNode) -> str:
        children = list(current.children)
        has_else = len(children) % 2 == 1
        else_expr = children.pop() if has_else else None
        parts = ["CASE"]
        for index in range(0, len(children), 2):
            parts.append(f"WHEN {self.expr(children[index], 0)}")
            parts.append(f"THEN {self.expr(children[index + 1], 0)}")
        if else_expr is not None:
            parts.append(f"ELSE {self.expr(else_expr, 0)}")
        parts.append("END")
        return " ".join(parts)

    # -- lexical pieces ------------------------------------------------------

    def string_literal(self, value: str) -> str:
        quote = "'" if self.profile.string_quote is StringQuote.SINGLE else '"'
        return quote + value.replace(quote, quote * 2) + quote

    def identifier(self, ident: AstNode) -> str:
        return self.quote_identifier(ident.token or "")

    def quote_identifier(self, name: str) -> str:
        if _PLAIN_IDENT.match(name) and name.upper() not in self.reserved:
            return name
        style = self.profile.identifier_quote
        if style is IdentifierQuote.BRACKETS:
            return f"[{name}]"
        if style is IdentifierQuote.BACKTICKS:
            return f"`{name}`"
        return f'"{name}"'
