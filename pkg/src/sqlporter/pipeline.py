"""Full conversion pipeline: baseline, then error-scoped learned rules.

Learned rules are repairs, not general rewrites: a rule fires only inside the
span of a residual error carrying its trigger code.  After each round of
learned rewriting the gap detectors run again; once nothing is flagged the
tree is fully normalized and printed under the target dialect, and the
conversion is verified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .baseline import (
    ERROR_REGISTRY,
    INTENTIONAL_REPAIRS,
    BaselineStatus,
    ConversionError,
    baseline_convert,
    detect,
    normalize,
)
from .dialects import TGT, DialectProfile
from .nodes import Span
from .printer import print_sql
from .rewrite import TransformRule, apply_library
from .segments import SqlSegment
from .verifier import VerificationReport, verify


@dataclass(frozen=True)
class SegmentConversion:
    segment: SqlSegment
    status: BaselineStatus
    converted_text: Optional[str]
    errors: tuple[ConversionError, ...]
    baseline_errors: tuple[ConversionError, ...]
    applied_rules: tuple[tuple[str, Span], ...]
    by_learned: bool
    verification: Optional[VerificationReport]

    @property
    def converted(self) -> bool:
        return self.status is BaselineStatus.CONVERTED


def _repair_code(applied_codes: list[str]) -> Optional[str]:
    for code in applied_codes:
        if code in INTENTIONAL_REPAIRS:
            return code
    return applied_codes[0] if applied_codes else None


def convert_segment(
    segment: SqlSegment,
    rules: list[TransformRule],
    tgt: DialectProfile = TGT,
    seed: int = 42,
    verify_conversions: bool = True,
) -> SegmentConversion:
    """Convert one segment with the baseline plus a learned-rule library."""
    base = baseline_convert(segment, tgt)
    if base.status is BaselineStatus.CONVERTED:
        assert base.converted is not None
        report = (
            verify(segment, base.converted.text, repair_code=None, seed=seed, tgt=tgt)
            if verify_conversions
            else None
        )
        return SegmentConversion(
            segment=segment,
            status=BaselineStatus.CONVERTED,
            converted_text=base.converted.text,
            errors=(),
            baseline_errors=(),
            applied_rules=(),
            by_learned=False,
            verification=report,
        )

    errors = list(base.errors)
    tree = base.residual_ast
    applied: list[tuple[str, Span]] = []
    applied_codes: list[str] = []
    for _ in range(len(ERROR_REGISTRY) + 1):
        codes = {error.code for error in errors}
        triggered = [rule for rule in rules if rule.trigger in codes]
        if not triggered:
            break
        flagged: dict[str, list[Span]] = {}
        for error in errors:
            flagged.setdefault(error.code, []).append(error.span)

        def allowed(rule: TransformRule, span: Span) -> bool:
            regions = flagged.get(rule.trigger or "", [])
            return any(region.contains(span) for region in regions)

        tree_after, trace = apply_library(triggered, tree, allowed=allowed)
        if not trace:
            break
        applied.extend(trace)
        applied_codes.extend(
            rule.trigger or "" for entry, _ in trace for rule in triggered if rule.rule_id == entry
        )
        tree = tree_after
        errors = detect(SqlSegment(segment.text, segment.dialect, tree, segment.segment_id))
        if not errors:
            break

    if errors:
        return SegmentConversion(
            segment=segment,
            status=BaselineStatus.FAILED,
            converted_text=None,
            errors=tuple(errors),
            baseline_errors=base.errors,
            applied_rules=tuple(applied),
            by_learned=False,
            verification=None,
        )

    final = normalize(tree, [])
    text = print_sql(final, tgt)
    report = (
        verify(segment, text, repair_code=_repair_code(applied_codes), seed=seed, tgt=tgt)
        if verify_conversions
        else None
    )
    return SegmentConversion(
        segment=segment,
        status=BaselineStatus.CONVERTED,
        converted_text=text,
        errors=(),
        baseline_errors=base.errors,
        applied_rules=tuple(applied),
        by_learned=True,
        verification=report,
    )
