"""Recursive-descent parser producing dialect-neutral trees.

Grammar (variant points resolved through the active profile):

    script     := statement (";"* statement)* ";"*
    statement  := declare | select
    declare    := DECLARE ident type ["NOT" "NULL"] [init]
    init       := "=" expr            (EqualsSign profiles)
                | DEFAULT expr        (DefaultKeyword profiles)
    select     := SELECT [TOP limit_expr] item ("," item)* [FROM ident] [LIMIT expr]
    item       := expr [AS ident]
    expr       := additive [cmp_op additive]
    additive   := multiplicative ((concat_op | "+" | "-") multiplicative)*
    multiplicative := primary (("*" | "/") primary)*
    primary    := literal | CASE ... END | CAST "(" expr AS type ")"
                | name "(" args ")" | qualified_ident | "(" expr ")"

TOP belongs to TopPrefix profiles, LIMIT to LimitSuffix profiles; the `||`
spelling of string concatenation is only accepted by PipesOperator profiles.
Function calls are checked against the profile's catalog (name and arity);
CONVERT takes a type name as its first argument.
"""

from __future__ import annotations

from .dialects import DeclareInitializer, DialectProfile, RowLimit, StringConcat
from .lexer import ParseError, Token, TokType, tokenize
from .nodes import AstNode, NodeKind, Span, node

__all__ = ["parse", "parse_statements", "ParseError"]

_STATEMENT_STARTERS = ("DECLARE", "SELECT")


def _cover(start: Span, end: Span) -> Span:
    return Span(start.byte_start, end.byte_end, start.line)


class _Parser:
    def __init__(self, text: str, profile: DialectProfile):
        self.profile = profile
        self.tokens = tokenize(text, profile)
        self.index = 0

    # -- token plumbing ----------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        if token.type is not TokType.EOF:
            self.index += 1
        return token

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        token = self.current
        got = token.value or "end of input"
        return ParseError(f"unexpected {got!r}", token.span, expected=expected)

    def expect_kw(self, word: str) -> Token:
        if not self.current.is_kw(word):
            raise self.fail((word,))
        return self.advance()

    def expect_op(self, symbol: str) -> Token:
        if not self.current.is_op(symbol):
            raise self.fail((symbol,))
        return self.advance()

    def at_statement_start(self) -> bool:
        return self.current.type is TokType.KEYWORD and self.current.value in _STATEMENT_STARTERS

    def last_span(self) -> Span:
        return self.tokens[self.index - 1].span

    # -- statements --------------------------------------------------------

    def script(self) -> AstNode:
        statements = []
        while self.current.is_op(";"):
            self.advance()
        while self.current.type is not TokType.EOF:
            statements.append(self.statement())
            while self.current.is_op(";"):
                self.advance()
        if not statements:
            raise ParseError("empty input", Span(0, 0, 1), expected=_STATEMENT_STARTERS)
        return node(
            NodeKind.SCRIPT, *statements, span=_cover(statements[0].span, statements[-1].span)
        )

    def statement(self) -> AstNode:
        if self.current.is_kw("DECLARE"):
            return self.declare()
        if self.current.is_kw("SELECT"):
            return self.select()
        raise self.fail(_STATEMENT_STARTERS)

    def declare(self) -> AstNode:
        start = self.expect_kw("DECLARE")
        name = self.identifier()
        type_name = self.type_name()
        marker = None
        if self.current.is_kw("NOT"):
            self.advance()
            self.expect_kw("NULL")
            marker = "NOT NULL"
        children = [name, type_name]
        wants_default = self.profile.declare_initializer is DeclareInitializer.DEFAULT_KEYWORD
        if wants_default and self.current.is_kw("DEFAULT"):
            self.advance()
            children.append(self.expr())
        elif not wants_default and self.current.is_op("="):
            self.advance()
            children.append(self.expr())
        elif not (self.at_statement_start() or self.current.type is TokType.EOF or self.current.is_op(";")):
            initializer = "DEFAULT" if wants_default else "="
            raise self.fail((initializer, ";", *_STATEMENT_STARTERS, "end of input"))
        span = _cover(start.span, self.last_span())
        return node(NodeKind.DECLARE_STMT, *children, token=marker, span=span)

    def select(self) -> AstNode:
        start = self.expect_kw("SELECT")
        limit = None
        if self.profile.row_limit is RowLimit.TOP_PREFIX and self.current.is_kw("TOP"):
            limit = self.top_clause()
        items = [self.select_item()]
        while self.current.is_op(","):
            self.advance()
            items.append(self.select_item())
        from_table = None
        if self.current.is_kw("FROM"):
            self.advance()
            from_table = self.identifier().token
        if self.profile.row_limit is RowLimit.LIMIT_SUFFIX and self.current.is_kw("LIMIT"):
            kw = self.advance()
            child = self.expr()
            limit = node(NodeKind.LIMIT_CLAUSE, child, span=_cover(kw.span, child.span))
        children = items + ([limit] if limit is not None else [])
        span = _cover(start.span, self.last_span())
        return node(NodeKind.SELECT_STMT, *children, token=from_table, span=span)

    def top_clause(self) -> AstNode:
        kw = self.expect_kw("TOP")
        if self.current.type is TokType.NUMBER:
            child = self.advance()
            expr = node(NodeKind.NUMBER_LIT, token=child.value, span=child.span)
            return node(NodeKind.LIMIT_CLAUSE, expr, span=_cover(kw.span, child.span))
        self.expect_op("(")
        expr = self.expr()
        closer = self.expect_op(")")
        return node(NodeKind.LIMIT_CLAUSE, expr, span=_cover(kw.span, closer.span))

    def select_item(self) -> AstNode:
        expr = self.expr()
        if self.current.is_kw("AS"):
            self.advance()
            alias = self.identifier()
            return node(NodeKind.ALIAS, expr, alias, span=_cover(expr.span, alias.span))
        return expr

    # -- expressions -------------------------------------------------------

    def expr(self) -> AstNode:
        left = self.additive()
        if self.current.type is TokType.OP and self.current.value in ("=", "<>", "<", "<=", ">", ">="):
            op = self.advance()
            right = self.additive()
            return node(NodeKind.BINARY_OP, left, right, token=op.value, span=_cover(left.span, right.span))
        return left

    def additive(self) -> AstNode:
        allowed = ["+", "-"]
        if self.profile.string_concat is StringConcat.PIPES_OPERATOR:
            allowed.append("||")
        left = self.multiplicative()
        while self.current.type is TokType.OP and self.current.value in allowed:
            op = self.advance()
            right = self.multiplicative()
            left = node(NodeKind.BINARY_OP, left, right, token=op.value, span=_cover(left.span, right.span))
        return left

    def multiplicative(self) -> AstNode:
        left = self.primary()
        while self.current.type is TokType.OP and self.current.value in ("*", "/"):
            op = self.advance()
            right = self.primary()
            left = node(NodeKind.BINARY_OP, left, right, token=op.value, span=_cover(left.span, right.span))
        return left

    def primary(self) -> AstNode:
        token = self.current
        if token.type is TokType.NUMBER:
            self.advance()
            return node(NodeKind.NUMBER_LIT, token=token.value, span=token.span)
        if token.type is TokType.STRING:
            self.advance()
            return node(NodeKind.STRING_LIT, token=token.value, span=token.span)
        if token.is_kw("NULL"):
            self.advance()
            return node(NodeKind.NULL_LIT, span=token.span)
        if token.is_kw("TRUE") or token.is_kw("FALSE"):
            self.advance()
            return node(NodeKind.BOOL_LIT, token=token.value, span=token.span)
        if token.is_kw("CASE"):
            return self.case_expr()
        if token.is_kw("CAST"):
            return self.cast_expr()
        if token.type is TokType.IDENT:
            if self.tokens[self.index + 1].is_op("(") and token.text == token.value:
                return self.function_call()
            return self.qualified_identifier()
        if token.is_op("("):
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise self.fail(("expression",))

    def case_expr(self) -> AstNode:
        start = self.expect_kw("CASE")
        children: list[AstNode] = []
        if not self.current.is_kw("WHEN"):
            raise self.fail(("WHEN",))
        while self.current.is_kw("WHEN"):
            self.advance()
            children.append(self.expr())
            self.expect_kw("THEN")
            children.append(self.expr())
        if self.current.is_kw("ELSE"):
            self.advance()
            children.append(self.expr())
        end = self.expect_kw("END")
        return node(NodeKind.CASE_EXPR, *children, span=_cover(start.span, end.span))

    def cast_expr(self) -> AstNode:
        start = self.expect_kw("CAST")
        self.expect_op("(")
        inner = self.expr()
        self.expect_kw("AS")
        type_name = self.type_name()
        end = self.expect_op(")")
        return node(NodeKind.CAST_EXPR, inner, type_name, span=_cover(start.span, end.span))

    def function_call(self) -> AstNode:
        name_token = self.advance()
        name = name_token.value.upper()
        arity = self.profile.known_functions.get(name)
        if arity is None:
            raise ParseError(
                f"unknown function {name!r} in dialect {self.profile.name}",
                name_token.span,
                expected=("known function name",),
            )
        self.expect_op("(")
        args: list[AstNode] = []
        if name == self.profile.catalog_name("convert_type"):
            args.append(self.type_name())
            self.expect_op(",")
            args.append(self.expr())
        elif not self.current.is_op(")"):
            args.append(self.expr())
            while self.current.is_op(","):
                self.advance()
                args.append(self.expr())
        closer = self.expect_op(")")
        if arity >= 0 and len(args) != arity:
            raise ParseError(
                f"{name} expects {arity} argument(s), got {len(args)}",
                _cover(name_token.span, closer.span),
                expected=(f"{arity} argument(s)",),
            )
        if arity == -1 and len(args) < 2:
            raise ParseError(
                f"{name} expects at least 2 arguments, got {len(args)}",
                _cover(name_token.span, closer.span),
                expected=("at least 2 arguments",),
            )
        return node(NodeKind.FUNCTION_CALL, *args, token=name, span=_cover(name_token.span, closer.span))

    def qualified_identifier(self) -> AstNode:
        left = self.identifier()
        while self.current.is_op(".") and self.tokens[self.index + 1].type is TokType.IDENT:
            self.advance()
            right = self.identifier()
            left = node(NodeKind.BINARY_OP, left, right, token=".", span=_cover(left.span, right.span))
        return left

    def identifier(self) -> AstNode:
        token = self.current
        if token.type is not TokType.IDENT:
            raise self.fail(("identifier",))
        self.advance()
        return node(NodeKind.IDENTIFIER, token=token.value, span=token.span)

    def type_name(self) -> AstNode:
        token = self.current
        if token.type is not TokType.IDENT or token.text != token.value:
            raise self.fail(("type name",))
        self.advance()
        name = token.value.upper()
        end_span = token.span
        if self.current.is_op("("):
            self.advance()
            params = []
            while True:
                number = self.current
                if number.type is not TokType.NUMBER:
                    raise self.fail(("number",))
                self.advance()
                params.append(number.value)
                if self.current.is_op(","):
                    self.advance()
                    continue
                break
            closer = self.expect_op(")")
            end_span = closer.span
            name = f"{name}({','.join(params)})"
        return node(NodeKind.TYPE_NAME, token=name, span=_cover(token.span, end_span))


def parse(text: str, profile: DialectProfile) -> AstNode:
    """Parse source text into a Script node; raise ParseError outside the grammar."""
    if not text.strip():
        raise ParseError("empty input", Span(0, 0, 1), expected=_STATEMENT_STARTERS)
    parser = _Parser(text, profile)
    return parser.script()


def parse_statements(text: str, profile: DialectProfile) -> list[AstNode]:
    return list(parse(text, profile).children)
