"""sqlporter: SQL dialect transpiler with a teachable rule engine.

The baseline converter handles the mechanical dialect differences and flags
eleven registered construct classes it refuses to convert.  Rules induced
from expert demonstrations resolve those residuals; every emitted segment is
checked for target-dialect grammaticality and semantics preservation.
"""

from .baseline import (
    BaselineOutcome,
    BaselineStatus,
    ConversionError,
    baseline_convert,
    builtin_rules,
    gap_list,
)
from .dialects import SRC, TGT, DialectProfile, get_profile, load_profile
from .induction import (
    Demonstration,
    InductionConflict,
    UnboundTemplateHole,
    induce,
    lgg_oracle,
    tree_diff,
)
from .nodes import AstNode, NodeKind, Span, structural_equal
from .parser import ParseError, parse
from .pipeline import SegmentConversion, convert_segment
from .printer import UnprintableNode, print_sql
from .rewrite import (
    Guard,
    Hole,
    NonTermination,
    PatternNode,
    TransformRule,
    apply,
    apply_library,
    load_rules,
    match,
    save_rules,
)
from .segments import SqlSegment, segment_from_text, segment_source
from .session import MigrationSession, StalePreview, run_migration
from .verifier import Environment, EvalError, VerificationReport, evaluate, verify

__version__ = "0.1.0"

__all__ = [
    "AstNode",
    "BaselineOutcome",
    "BaselineStatus",
    "ConversionError",
    "Demonstration",
    "DialectProfile",
    "Environment",
    "EvalError",
    "Guard",
    "Hole",
    "InductionConflict",
    "MigrationSession",
    "NodeKind",
    "NonTermination",
    "ParseError",
    "PatternNode",
    "SRC",
    "SegmentConversion",
    "Span",
    "SqlSegment",
    "StalePreview",
    "TGT",
    "TransformRule",
    "UnboundTemplateHole",
    "UnprintableNode",
    "VerificationReport",
    "apply",
    "apply_library",
    "baseline_convert",
    "builtin_rules",
    "convert_segment",
    "evaluate",
    "gap_list",
    "get_profile",
    "induce",
    "lgg_oracle",
    "load_profile",
    "load_rules",
    "match",
    "parse",
    "print_sql",
    "run_migration",
    "save_rules",
    "segment_from_text",
    "segment_source",
    "structural_equal",
    "tree_diff",
    "verify",
]
