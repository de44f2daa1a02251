"""Migration session: pipeline orchestration, state, and the teach loop.

A session runs the conversion pipeline over a directory of source files,
tracks residual errors by code, and mediates the human-in-the-loop workflow:
an expert submits a corrected target for one residual, the session induces a
rule and previews its blast radius (every residual site it would rewrite,
each with a verification report), and only an explicit accept inserts the
rule and re-converts.  Every state change appends to a history log; replaying
the log against the same inputs reproduces the session.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .baseline import ConversionError
from .dialects import SRC, TGT
from .induction import Demonstration, induce
from .lexer import ParseError
from .nodes import Span
from .pipeline import SegmentConversion, convert_segment
from .rewrite import Provenance, TransformRule, rule_from_doc, rule_to_doc
from .segments import SqlSegment, segment_from_text, segment_source


class StalePreview(Exception):
    """The session changed after this preview was produced."""


class TargetParseError(Exception):
    """The expert's target text does not parse under the target dialect."""

    def __init__(self, cause: ParseError):
        super().__init__(str(cause))
        self.cause = cause


class NoResidualError(Exception):
    """No residual error with the requested code exists."""


@dataclass(frozen=True)
class HistoryEvent:
    kind: str  # SegmentConverted | ErrorRaised | DemoSubmitted | RuleInduced | RuleApplied | RuleRejected
    payload: dict


@dataclass(frozen=True)
class PreviewSite:
    segment_id: str
    before: str
    after: Optional[str]
    verification: Optional[dict]


@dataclass(frozen=True)
class RulePreview:
    preview_id: str
    version: int
    code: str
    rule: TransformRule
    demo: Demonstration
    sites: tuple[PreviewSite, ...]

    def to_doc(self) -> dict:
        return {
            "preview_id": self.preview_id,
            "version": self.version,
            "error_code": self.code,
            "rule": rule_to_doc(self.rule),
            "sites": [
                {
                    "segment_id": site.segment_id,
                    "before": site.before,
                    "after": site.after,
                    "verification": site.verification,
                }
                for site in self.sites
            ],
        }


class MigrationSession:
    """Mutable session state; mutations are serialized through one lock."""

    def __init__(self, root: str | Path, rules: Optional[list[TransformRule]] = None, seed: int = 42):
        self.root = Path(root)
        self.seed = seed
        self.session_id = "session-" + hashlib.sha256(str(self.root).encode()).hexdigest()[:12]
        self.version = 0
        self.learned_rules: list[TransformRule] = list(rules or [])
        self.segments: list[SqlSegment] = []
        self.file_order: list[str] = []
        self.segments_by_file: dict[str, list[str]] = {}
        self.outcomes: dict[str, SegmentConversion] = {}
        self.parse_failures: dict[str, str] = {}
        self.io_failures: dict[str, str] = {}
        self.history: list[HistoryEvent] = []
        self.demos_by_code: dict[str, list[Demonstration]] = {}
        self.previews: dict[str, RulePreview] = {}
        self._preview_counter = 0
        self._lock = threading.Lock()
        self._load_inputs()
        self._convert_all()

    # -- setup -------------------------------------------------------------

    def _load_inputs(self) -> None:
        if not self.root.is_dir():
            raise FileNotFoundError(f"input root {self.root} is not a directory")
        paths = sorted(self.root.rglob("*.sql"))
        if not paths:
            raise FileNotFoundError(f"no .sql files under {self.root}")
        for path in paths:
            relative = path.relative_to(self.root).as_posix()
            self.file_order.append(relative)
            try:
                text = path.read_text()
            except OSError as exc:
                self.io_failures[relative] = str(exc)
                continue
            try:
                segments = segment_source(text.rstrip("\n"), SRC, origin=relative)
            except ParseError as exc:
                self.parse_failures[relative] = f"{exc.message} at byte {exc.span.byte_start}"
                continue
            self.segments.extend(segments)
            self.segments_by_file[relative] = [segment.segment_id for segment in segments]

    def _convert_all(self) -> None:
        self.outcomes = {}
        for segment in self.segments:
            self._convert_one(segment)

    def _convert_one(self, segment: SqlSegment) -> None:
        conversion = convert_segment(segment, self.learned_rules, seed=self.seed)
        self.outcomes[segment.segment_id] = conversion
        if conversion.converted:
            self._log("SegmentConverted", {
                "segment_id": segment.segment_id,
                "by": "learned" if conversion.by_learned else "baseline",
            })
        for error in conversion.errors:
            self._log("ErrorRaised", error.to_doc())

    def _log(self, kind: str, payload: dict) -> None:
        self.history.append(HistoryEvent(kind, payload))

    # -- queries -------------------------------------------------------------

    @property
    def residuals(self) -> dict[str, list[ConversionError]]:
        grouped: dict[str, list[ConversionError]] = {}
        for segment in self.segments:
            conversion = self.outcomes[segment.segment_id]
            for error in conversion.errors:
                grouped.setdefault(error.code, []).append(error)
        for relative, message in sorted(self.parse_failures.items()):
            grouped.setdefault("E000", []).append(
                ConversionError("E000", f"parse failure: {message}", Span(), relative, None)
            )
        return grouped

    def residual_count(self) -> int:
        return sum(len(errors) for errors in self.residuals.values())

    def segment(self, segment_id: str) -> SqlSegment:
        for candidate in self.segments:
            if candidate.segment_id == segment_id:
                return candidate
        raise KeyError(segment_id)

    def report(self) -> dict:
        by_baseline = sum(
            1 for conv in self.outcomes.values() if conv.converted and not conv.by_learned
        )
        by_learned = sum(1 for conv in self.outcomes.values() if conv.converted and conv.by_learned)
        residual_segments = sum(1 for conv in self.outcomes.values() if not conv.converted)
        residual_by_code: dict[str, int] = {}
        for code, errors in sorted(self.residuals.items()):
            residual_by_code[code] = len(errors)
        verifications = [
            conv.verification for conv in self.outcomes.values() if conv.verification is not None
        ]
        return {
            "session_id": self.session_id,
            "version": self.version,
            "seed": self.seed,
            "total_segments": len(self.segments),
            "converted_by_baseline": by_baseline,
            "converted_by_learned": by_learned,
            "residual_segments": residual_segments + len(self.parse_failures),
            "residual_errors_by_code": residual_by_code,
            "io_failures": dict(sorted(self.io_failures.items())),
            "verification": {
                "checked": len(verifications),
                "accepted": sum(1 for report in verifications if report.accepted),
            },
            "segments": [
                {
                    "segment_id": segment.segment_id,
                    "status": self.outcomes[segment.segment_id].status.value,
                    "by": "learned"
                    if self.outcomes[segment.segment_id].by_learned
                    else "baseline",
                    "errors": [
                        error.to_doc() for error in self.outcomes[segment.segment_id].errors
                    ],
                    "verification": (
                        self.outcomes[segment.segment_id].verification.to_doc()
                        if self.outcomes[segment.segment_id].verification is not None
                        else None
                    ),
                }
                for segment in self.segments
            ],
        }

    # -- teach loop ------------------------------------------------------------

    def submit_demonstration(self, code: str, target_text: str) -> RulePreview:
        """Induce from the first residual of ``code`` plus prior demos; no mutation."""
        with self._lock:
            residuals = self.residuals.get(code, [])
            residuals = [error for error in residuals if error.construct is not None]
            if not residuals:
                raise NoResidualError(f"no residual errors with code {code}")
            error = residuals[0]
            source = self.segment(error.segment_id)
            try:
                expert = segment_from_text(target_text, TGT, segment_id=source.segment_id)
            except ParseError as exc:
                raise TargetParseError(exc) from None
            demo_id = f"{self.session_id}-{code.lower()}-{len(self.demos_by_code.get(code, [])) + 1}"
            demo = Demonstration(demo_id, error, source, expert)
            demos = self.demos_by_code.get(code, []) + [demo]
            rule = induce(demos)  # InductionConflict / UnboundTemplateHole surface verbatim

            sites = []
            for candidate in self.segments:
                conversion = self.outcomes[candidate.segment_id]
                if conversion.converted or all(e.code != code for e in conversion.errors):
                    continue
                repaired = convert_segment(
                    candidate, self._rules_with(rule), seed=self.seed
                )
                sites.append(
                    PreviewSite(
                        segment_id=candidate.segment_id,
                        before=candidate.text,
                        after=repaired.converted_text,
                        verification=(
                            repaired.verification.to_doc()
                            if repaired.verification is not None
                            else None
                        ),
                    )
                )
            self._preview_counter += 1
            preview = RulePreview(
                preview_id=f"preview-{self._preview_counter}",
                version=self.version,
                code=code,
                rule=rule,
                demo=demo,
                sites=tuple(sites),
            )
            self.previews[preview.preview_id] = preview
            return preview

    def _rules_with(self, rule: TransformRule) -> list[TransformRule]:
        kept = [existing for existing in self.learned_rules if existing.trigger != rule.trigger]
        return kept + [rule]

    def accept_rule(self, preview: RulePreview) -> None:
        """Insert the previewed rule, re-run affected segments, log history."""
        with self._lock:
            if preview.version != self.version or preview.preview_id not in self.previews:
                raise StalePreview(f"session moved past preview {preview.preview_id}")
            rule = preview.rule
            ordered = TransformRule(
                rule_id=rule.rule_id,
                pattern=rule.pattern,
                template=rule.template,
                guards=rule.guards,
                trigger=rule.trigger,
                provenance=Provenance.LEARNED,
                demo_ids=rule.demo_ids,
                priority=100 + len(self.learned_rules),
            )
            self.learned_rules = self._rules_with(ordered)
            self.demos_by_code.setdefault(preview.code, []).append(preview.demo)
            self._log("DemoSubmitted", {
                "demo_id": preview.demo.demo_id,
                "error_code": preview.code,
                "source": preview.demo.source.text,
                "expert_target": preview.demo.expert_target.text,
            })
            self._log("RuleInduced", rule_to_doc(ordered))
            affected = [site.segment_id for site in preview.sites]
            for segment_id in affected:
                self._convert_one(self.segment(segment_id))
            self._log("RuleApplied", {"rule_id": ordered.rule_id, "segments": affected})
            self.version += 1
            self.previews.clear()

    def reject_rule(self, preview: RulePreview) -> None:
        with self._lock:
            if preview.version != self.version or preview.preview_id not in self.previews:
                raise StalePreview(f"session moved past preview {preview.preview_id}")
            self._log("RuleRejected", {"preview_id": preview.preview_id, "rule_id": preview.rule.rule_id})
            del self.previews[preview.preview_id]

    # -- outputs -----------------------------------------------------------------

    def write_outputs(self, out_dir: str | Path) -> None:
        """Mirror the input tree; residual segments keep their source text."""
        out_root = Path(out_dir)
        for relative in self.file_order:
            if relative in self.io_failures:
                continue
            destination = out_root / relative
            destination.parent.mkdir(parents=True, exist_ok=True)
            if relative in self.parse_failures:
                destination.write_text((self.root / relative).read_text())
                continue
            pieces = []
            for segment_id in self.segments_by_file[relative]:
                conversion = self.outcomes[segment_id]
                pieces.append(
                    conversion.converted_text if conversion.converted else conversion.segment.text
                )
            destination.write_text("\n".join(pieces) + "\n")


def run_migration(
    root: str | Path, rules: Optional[list[TransformRule]] = None, seed: int = 42
) -> MigrationSession:
    """Parse, convert and verify every segment under ``root``."""
    return MigrationSession(root, rules=rules, seed=seed)


def replay_history(root: str | Path, history: list[HistoryEvent], seed: int = 42) -> MigrationSession:
    """Rebuild a session from its inputs and the accepted rules in its log."""
    rules = [rule_from_doc(event.payload) for event in history if event.kind == "RuleInduced"]
    return MigrationSession(root, rules=rules, seed=seed)
