"""Dialect-aware tokenizer.

Quoting rules come from the profile: bracket/backtick/double-quote identifier
quoting, single/double string quoting.  Whitespace and comments are trivia;
their spans are kept on the lexer so tests can prove full source coverage.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from .dialects import DialectProfile, IdentifierQuote, RowLimit
from .nodes import Span


class TokType(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    STRING = "string"
    NUMBER = "number"
    OP = "op"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    type: TokType
    text: str
    value: str
    span: Span

    def is_kw(self, word: str) -> bool:
        return self.type is TokType.KEYWORD and self.value == word

    def is_op(self, symbol: str) -> bool:
        return self.type is TokType.OP and self.value == symbol


class ParseError(Exception):
    """Token stream falls outside the dialect grammar."""

    def __init__(self, message: str, span: Span, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected


CORE_KEYWORDS = frozenset(
    {
        "DECLARE",
        "SELECT",
        "AS",
        "FROM",
        "NULL",
        "NOT",
        "CASE",
        "WHEN",
        "THEN",
        "ELSE",
        "END",
        "CAST",
        "DEFAULT",
        "TRUE",
        "FALSE",
    }
)

_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\d+(?:\.\d+)?")
# Longest match first.
_OPERATORS = ("||", "<=", ">=", "<>", "=", "<", ">", "+", "-", "*", "/", "(", ")", ",", ".", ";")


def keywords_for(profile: DialectProfile) -> frozenset[str]:
    extra = "TOP" if profile.row_limit is RowLimit.TOP_PREFIX else "LIMIT"
    return CORE_KEYWORDS | {extra}


class Lexer:
    def __init__(self, text: str, profile: DialectProfile):
        self.text = text
        self.profile = profile
        self.keywords = keywords_for(profile)
        self.pos = 0
        self.line = 1
        self.trivia: list[Span] = []

    def tokenize(self) -> list[Token]:
        tokens: list[Token] = []
        while True:
            self._skip_trivia()
            if self.pos >= len(self.text):
                tokens.append(Token(TokType.EOF, "", "", Span(self.pos, self.pos, self.line)))
                return tokens
            tokens.append(self._next_token())

    # -- internals ---------------------------------------------------------

    def _skip_trivia(self) -> None:
        while self.pos < len(self.text):
            start, start_line = self.pos, self.line
            ch = self.text[self.pos]
            if ch.isspace():
                while self.pos < len(self.text) and self.text[self.pos].isspace():
                    if self.text[self.pos] == "\n":
                        self.line += 1
                    self.pos += 1
            elif self.text.startswith("--", self.pos):
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self.pos += 1
            elif self.text.startswith("/*", self.pos):
                end = self.text.find("*/", self.pos + 2)
                if end < 0:
                    raise ParseError("unterminated block comment", Span(start, len(self.text), start_line))
                self.line += self.text.count("\n", self.pos, end)
                self.pos = end + 2
            else:
                break
            self.trivia.append(Span(start, self.pos, start_line))

    def _next_token(self) -> Token:
        ch = self.text[self.pos]
        if ch == "[" and self.profile.identifier_quote is IdentifierQuote.BRACKETS:
            return self._quoted_ident("]", opener="[")
        if ch == "`" and self.profile.identifier_quote is IdentifierQuote.BACKTICKS:
            return self._quoted_ident("`", opener="`")
        if ch == '"':
            if self.profile.identifier_quote is IdentifierQuote.DOUBLE_QUOTES:
                return self._quoted_ident('"', opener='"')
            return self._string('"')
        if ch == "'":
            return self._string("'")
        if match := _NUMBER.match(self.text, self.pos):
            return self._emit(TokType.NUMBER, match.group(), match.group())
        if match := _WORD.match(self.text, self.pos):
            word = match.group()
            if word.upper() in self.keywords:
                return self._emit(TokType.KEYWORD, word, word.upper())
            return self._emit(TokType.IDENT, word, word)
        for op in _OPERATORS:
            if self.text.startswith(op, self.pos):
                return self._emit(TokType.OP, op, op)
        raise ParseError(
            f"unexpected character {ch!r}", Span(self.pos, self.pos + 1, self.line), expected=("token",)
        )

    def _emit(self, toktype: TokType, text: str, value: str) -> Token:
        span = Span(self.pos, self.pos + len(text), self.line)
        self.pos += len(text)
        return Token(toktype, text, value, span)

    def _string(self, quote: str) -> Token:
        start, start_line = self.pos, self.line
        self.pos += 1
        parts: list[str] = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == quote:
                if self.text.startswith(quote * 2, self.pos):
                    parts.append(quote)
                    self.pos += 2
                    continue
                self.pos += 1
                raw = self.text[start : self.pos]
                return Token(TokType.STRING, raw, "".join(parts), Span(start, self.pos, start_line))
            if ch == "\n":
                self.line += 1
            parts.append(ch)
            self.pos += 1
        raise ParseError("unterminated string literal", Span(start, len(self.text), start_line))

    def _quoted_ident(self, closer: str, opener: str) -> Token:
        start, start_line = self.pos, self.line
        end = self.text.find(closer, self.pos + 1)
        if end < 0:
            raise ParseError(
                f"unterminated quoted identifier (missing {closer!r})",
                Span(start, len(self.text), start_line),
            )
        name = self.text[start + 1 : end]
        if not name:
            raise ParseError("empty quoted identifier", Span(start, end + 1, start_line))
        self.pos = end + 1
        raw = self.text[start : self.pos]
        return Token(TokType.IDENT, raw, name, Span(start, self.pos, start_line))


def tokenize(text: str, profile: DialectProfile) -> list[Token]:
    return Lexer(text, profile).tokenize()
