"""Evaluation corpus loading and the resolution-metrics harness.

Corpus layout on disk::

    corpus/E0NN/demo-*.json       expert demonstrations (1-2 per class)
    corpus/E0NN/holdout-*.sql     held-out failing segments (>= 3 per class)
    corpus/E0NN/expected-*.sql    expert targets for the holdouts, same index
    corpus/convertible/fixture-*.sql + expected-*.sql   regression set

A class counts as resolved when the rule induced from its demonstrations
alone converts every holdout byte-exactly and the conversion verifies.  The
convertible fixtures guard against regressions: with every induced rule
loaded they must still convert byte-identically to their expected output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .baseline import baseline_convert
from .dialects import SRC, TGT
from .induction import Demonstration, InductionConflict, UnboundTemplateHole, induce
from .rewrite import TransformRule
from .pipeline import convert_segment
from .segments import SqlSegment, segment_from_text


@dataclass(frozen=True)
class CorpusCase:
    code: str
    demos: tuple[Demonstration, ...]
    holdouts: tuple[SqlSegment, ...]
    expected_targets: tuple[str, ...]


@dataclass(frozen=True)
class ConvertibleFixture:
    name: str
    segment: SqlSegment
    expected: str


@dataclass(frozen=True)
class Corpus:
    cases: tuple[CorpusCase, ...]
    convertible: tuple[ConvertibleFixture, ...]


@dataclass(frozen=True)
class CaseResult:
    code: str
    resolved: bool
    demos_used: int
    holdouts: int
    holdouts_resolved: int
    failure: Optional[str] = None


@dataclass(frozen=True)
class EvalResult:
    cases: tuple[CaseResult, ...]
    resolved_count: int
    total_cases: int
    regression_count: int
    rules: tuple[TransformRule, ...]

    def to_doc(self) -> dict:
        return {
            "cases": [
                {
                    "code": case.code,
                    "resolved": case.resolved,
                    "demos_used": case.demos_used,
                    "holdouts": case.holdouts,
                    "holdouts_resolved": case.holdouts_resolved,
                    "failure": case.failure,
                }
                for case in self.cases
            ],
            "resolved_count": self.resolved_count,
            "total_cases": self.total_cases,
            "regression_count": self.regression_count,
        }


def load_demonstration(path: Path, code: str) -> Demonstration:
    doc = json.loads(path.read_text())
    if doc["error_code"] != code:
        raise ValueError(f"{path}: demo error code {doc['error_code']} does not match case {code}")
    source = segment_from_text(doc["source"], SRC, segment_id=f"{code}/{doc['demo_id']}")
    outcome = baseline_convert(source)
    matching = [error for error in outcome.errors if error.code == code]
    if not matching:
        raise ValueError(f"{path}: baseline does not raise {code} on the demo source")
    expert = segment_from_text(doc["expert_target"], TGT, segment_id=source.segment_id)
    return Demonstration(doc["demo_id"], matching[0], source, expert)


def _read_sql(path: Path) -> str:
    return path.read_text().rstrip("\n")


def load_corpus(root: str | Path) -> Corpus:
    root = Path(root)
    cases = []
    for case_dir in sorted(root.glob("E[0-9][0-9][0-9]")):
        code = case_dir.name
        demos = tuple(
            load_demonstration(path, code) for path in sorted(case_dir.glob("demo-*.json"))
        )
        holdout_paths = sorted(case_dir.glob("holdout-*.sql"))
        expected_paths = sorted(case_dir.glob("expected-*.sql"))
        if len(holdout_paths) != len(expected_paths):
            raise ValueError(f"{case_dir}: holdout/expected file counts differ")
        holdouts = tuple(
            segment_from_text(_read_sql(path), SRC, segment_id=f"{code}/{path.stem}")
            for path in holdout_paths
        )
        expected = tuple(_read_sql(path) for path in expected_paths)
        cases.append(CorpusCase(code, demos, holdouts, expected))

    convertible = []
    convertible_dir = root / "convertible"
    if convertible_dir.is_dir():
        for fixture_path in sorted(convertible_dir.glob("fixture-*.sql")):
            expected_path = convertible_dir / fixture_path.name.replace("fixture-", "expected-")
            convertible.append(
                ConvertibleFixture(
                    name=fixture_path.stem,
                    segment=segment_from_text(
                        _read_sql(fixture_path), SRC, segment_id=f"convertible/{fixture_path.stem}"
                    ),
                    expected=_read_sql(expected_path),
                )
            )
    return Corpus(tuple(cases), tuple(convertible))


def run_eval(corpus: Corpus, seed: int = 42) -> EvalResult:
    """Induce per case from demos only, then score holdouts and regressions."""
    case_results = []
    induced: list[TransformRule] = []
    for case in corpus.cases:
        rule: Optional[TransformRule] = None
        failure: Optional[str] = None
        try:
            rule = induce(list(case.demos))
            induced.append(rule)
        except (InductionConflict, UnboundTemplateHole) as exc:
            failure = f"{type(exc).__name__}: {exc}"

        holdouts_resolved = 0
        if rule is not None:
            for holdout, expected in zip(case.holdouts, case.expected_targets):
                conversion = convert_segment(holdout, [rule], seed=seed)
                if (
                    conversion.converted
                    and conversion.converted_text == expected
                    and conversion.verification is not None
                    and conversion.verification.accepted
                ):
                    holdouts_resolved += 1
        resolved = bool(case.holdouts) and holdouts_resolved == len(case.holdouts)
        case_results.append(
            CaseResult(
                code=case.code,
                resolved=resolved,
                demos_used=len(case.demos),
                holdouts=len(case.holdouts),
                holdouts_resolved=holdouts_resolved,
                failure=failure,
            )
        )

    regression_count = 0
    for fixture in corpus.convertible:
        conversion = convert_segment(fixture.segment, induced, seed=seed)
        if not conversion.converted or conversion.converted_text != fixture.expected:
            regression_count += 1

    return EvalResult(
        cases=tuple(case_results),
        resolved_count=sum(1 for case in case_results if case.resolved),
        total_cases=len(case_results),
        regression_count=regression_count,
        rules=tuple(induced),
    )


def render_table(result: EvalResult) -> str:
    lines = [
        f"{'case':<6} {'resolved':<9} {'demos':<6} {'holdouts':<9} note",
        "-" * 60,
    ]
    for case in result.cases:
        note = case.failure or ""
        lines.append(
            f"{case.code:<6} {'yes' if case.resolved else 'NO':<9} "
            f"{case.demos_used:<6} {case.holdouts_resolved}/{case.holdouts:<7} {note}"
        )
    lines.append("-" * 60)
    lines.append(
        f"resolved {result.resolved_count}/{result.total_cases}, "
        f"regressions {result.regression_count}"
    )
    return "\n".join(lines)
