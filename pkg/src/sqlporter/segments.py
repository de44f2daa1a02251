"""Statement segmentation.

A segment is one effective statement together with the DECLARE run that
immediately precedes it, so declarations travel with the statement that uses
them.  A file ``[DECLARE, DECLARE, SELECT, SELECT]`` therefore yields two
segments: ``[DECLARE DECLARE SELECT]`` and ``[SELECT]``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dialects import DialectProfile
from .nodes import AstNode, NodeKind
from .parser import parse


@dataclass(frozen=True)
class SqlSegment:
    text: str
    dialect: str
    ast: AstNode
    segment_id: str


def segment_source(text: str, profile: DialectProfile, origin: str = "<memory>") -> list[SqlSegment]:
    """Split source text into segments; ids are ``origin:ordinal``."""
    script = parse(text, profile)
    groups: list[list[AstNode]] = []
    current: list[AstNode] = []
    for stmt in script.children:
        current.append(stmt)
        if stmt.kind is not NodeKind.DECLARE_STMT:
            groups.append(current)
            current = []
    if current:
        groups.append(current)

    segments = []
    for ordinal, group in enumerate(groups):
        start = group[0].span.byte_start
        end = group[-1].span.byte_end
        slice_text = text[start:end]
        segment_ast = parse(slice_text, profile)
        segments.append(
            SqlSegment(
                text=slice_text,
                dialect=profile.name,
                ast=segment_ast,
                segment_id=f"{origin}:{ordinal}",
            )
        )
    return segments


def segment_from_text(text: str, profile: DialectProfile, segment_id: str = "<memory>:0") -> SqlSegment:
    """Wrap one source text as a single segment (used for fixtures and demos)."""
    return SqlSegment(text=text, dialect=profile.name, ast=parse(text, profile), segment_id=segment_id)
