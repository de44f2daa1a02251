"""Tree-transform engine: patterns with typed holes, guards, templates.

A rule's pattern is a tree whose positions are either concrete nodes (kind +
token + child patterns) or named holes, optionally constrained to a set of
node kinds.  The same hole name occurring twice must bind structurally equal
subtrees.  Application is a bottom-up pass: children are rewritten before
their parent, rules are tried at each node in (priority, rule_id) order, and
the first guard-satisfying match rewrites the node.  ``apply_library``
repeats passes to a fixpoint, bounded by 10x the input node count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Union

from . import analysis
from .nodes import (
    AstNode,
    NodeKind,
    Span,
    node_count,
    structural_equal,
    validate_tree,
    walk,
)


class NonTermination(Exception):
    """Fixpoint rewriting exceeded its pass bound."""


@dataclass(frozen=True)
class Hole:
    name: str
    kinds: Optional[frozenset[NodeKind]] = None

    def admits(self, candidate: AstNode) -> bool:
        return self.kinds is None or candidate.kind in self.kinds


@dataclass(frozen=True)
class PatternNode:
    kind: NodeKind
    token: Optional[str] = None
    children: tuple["Pattern", ...] = ()


Pattern = Union[PatternNode, Hole]


class Provenance(str, Enum):
    BUILTIN = "Builtin"
    LEARNED = "Learned"


@dataclass(frozen=True)
class Guard:
    """Predicate over one hole's binding.

    Predicates: ``is_nullable``, ``kind_is``, ``token_equals``, ``has_type``
    plus ``is_string_expr``, which only built-in rules use.
    """

    hole: str
    predicate: str
    arg: Optional[str] = None


@dataclass(frozen=True)
class TransformRule:
    rule_id: str
    pattern: Pattern
    template: Pattern
    guards: tuple[Guard, ...] = ()
    trigger: Optional[str] = None
    provenance: Provenance = Provenance.BUILTIN
    demo_ids: tuple[str, ...] = ()
    priority: int = 0

    def __post_init__(self) -> None:
        unbound = template_holes(self.template) - pattern_holes(self.pattern)
        if unbound:
            raise ValueError(f"rule {self.rule_id}: template holes {sorted(unbound)} not bound by pattern")


@dataclass(frozen=True)
class Binding:
    mapping: dict[str, AstNode]
    match_span: Span
    path: tuple[int, ...]


def pattern_of(tree: AstNode) -> PatternNode:
    """Concrete pattern matching exactly this tree (modulo spans)."""
    return PatternNode(tree.kind, tree.token, tuple(pattern_of(child) for child in tree.children))


def pattern_holes(pattern: Pattern) -> set[str]:
    if isinstance(pattern, Hole):
        return {pattern.name}
    names: set[str] = set()
    for child in pattern.children:
        names |= pattern_holes(child)
    return names


template_holes = pattern_holes


def match_at(pattern: Pattern, tree: AstNode) -> Optional[dict[str, AstNode]]:
    """Match rooted at ``tree``; returns hole bindings or None."""
    bindings: dict[str, AstNode] = {}

    def go(p: Pattern, n: AstNode) -> bool:
        if isinstance(p, Hole):
            if not p.admits(n):
                return False
            if p.name in bindings:
                return structural_equal(bindings[p.name], n)
            bindings[p.name] = n
            return True
        if p.kind is not n.kind or p.token != n.token or len(p.children) != len(n.children):
            return False
        return all(go(pc, nc) for pc, nc in zip(p.children, n.children))

    return bindings if go(pattern, tree) else None


def match(pattern: Pattern, tree: AstNode) -> list[Binding]:
    """All subtrees of ``tree`` (pre-order) the pattern matches."""
    results = []
    for path, subtree in walk(tree):
        bindings = match_at(pattern, subtree)
        if bindings is not None:
            results.append(Binding(bindings, subtree.span, path))
    return results


def instantiate(template: Pattern, bindings: dict[str, AstNode], span: Span) -> AstNode:
    """Substitute bindings into the template; new nodes carry the match span."""
    if isinstance(template, Hole):
        return bindings[template.name]
    children = tuple(instantiate(child, bindings, span) for child in template.children)
    return AstNode(template.kind, children, template.token, span)


def check_guards(
    rule: TransformRule,
    bindings: dict[str, AstNode],
    declarations: dict[str, analysis.Declaration],
) -> bool:
    for guard in rule.guards:
        bound = bindings.get(guard.hole)
        if bound is None:
            return False
        if not _guard_holds(guard, bound, declarations):
            return False
    return True


def _guard_holds(guard: Guard, bound: AstNode, declarations: dict[str, analysis.Declaration]) -> bool:
    if guard.predicate == "is_nullable":
        return analysis.is_nullable(bound, declarations)
    if guard.predicate == "kind_is":
        return bound.kind.value == guard.arg
    if guard.predicate == "token_equals":
        return bound.token == guard.arg
    if guard.predicate == "has_type":
        return analysis.declared_base_type(bound, declarations) == guard.arg
    if guard.predicate == "is_string_expr":
        return analysis.family_of(bound, declarations) is analysis.ValueFamily.STRING
    raise ValueError(f"unknown guard predicate {guard.predicate!r}")


#: Optional filter deciding whether a rule may rewrite at a given span.
SpanFilter = Callable[[TransformRule, Span], bool]


def _one_pass(
    rules: list[TransformRule],
    tree: AstNode,
    declarations: dict[str, analysis.Declaration],
    allowed: Optional[SpanFilter],
    trace: list[tuple[str, Span]],
) -> AstNode:
    def go(current: AstNode) -> AstNode:
        rebuilt = current
        if current.children:
            new_children = tuple(go(child) for child in current.children)
            if any(new is not old for new, old in zip(new_children, current.children)):
                rebuilt = current.with_children(new_children)
        for rule in rules:
            if allowed is not None and not allowed(rule, rebuilt.span):
                continue
            bindings = match_at(rule.pattern, rebuilt)
            if bindings is None or not check_guards(rule, bindings, declarations):
                continue
            trace.append((rule.rule_id, rebuilt.span))
            return instantiate(rule.template, bindings, rebuilt.span)
        return rebuilt

    return go(tree)


def apply(rule: TransformRule, tree: AstNode) -> tuple[AstNode, int]:
    """One bottom-up pass of a single rule; returns (new tree, rewrite count)."""
    declarations = analysis.scan_declarations(tree)
    trace: list[tuple[str, Span]] = []
    result = _one_pass([rule], tree, declarations, None, trace)
    return (result if trace else tree), len(trace)


def apply_library(
    rules: list[TransformRule],
    tree: AstNode,
    allowed: Optional[SpanFilter] = None,
) -> tuple[AstNode, list[tuple[str, Span]]]:
    """Apply passes of all rules until none fires; bounded fixpoint.

    The optional ``allowed`` filter lets callers fence rules into source
    regions (the conversion pipeline confines learned rules to the spans
    their trigger error flagged).
    """
    ordered = sorted(rules, key=lambda rule: (rule.priority, rule.rule_id))
    declarations = analysis.scan_declarations(tree)
    bound = 10 * max(1, node_count(tree))
    trace: list[tuple[str, Span]] = []
    current = tree
    for _ in range(bound):
        before = len(trace)
        current = _one_pass(ordered, current, declarations, allowed, trace)
        if len(trace) == before:
            return current, trace
        validate_tree(current)
    probe: list[tuple[str, Span]] = []
    _one_pass(ordered, current, declarations, allowed, probe)
    if probe:
        raise NonTermination(f"rewriting did not reach a fixpoint within {bound} passes")
    return current, trace


# -- persistence -------------------------------------------------------------


def pattern_to_doc(pattern: Pattern) -> dict:
    if isinstance(pattern, Hole):
        doc: dict = {"hole": pattern.name}
        if pattern.kinds is not None:
            doc["kinds"] = sorted(kind.value for kind in pattern.kinds)
        return doc
    return {
        "kind": pattern.kind.value,
        "token": pattern.token,
        "children": [pattern_to_doc(child) for child in pattern.children],
    }


def pattern_from_doc(doc: dict) -> Pattern:
    if "hole" in doc:
        kinds = doc.get("kinds")
        return Hole(doc["hole"], frozenset(NodeKind(kind) for kind in kinds) if kinds else None)
    return PatternNode(
        NodeKind(doc["kind"]),
        doc.get("token"),
        tuple(pattern_from_doc(child) for child in doc.get("children", [])),
    )


def rule_to_doc(rule: TransformRule) -> dict:
    return {
        "rule_id": rule.rule_id,
        "trigger": rule.trigger,
        "pattern": pattern_to_doc(rule.pattern),
        "guard": [
            {"hole": guard.hole, "predicate": guard.predicate, "arg": guard.arg}
            for guard in rule.guards
        ],
        "template": pattern_to_doc(rule.template),
        "provenance": {"kind": rule.provenance.value, "demo_ids": list(rule.demo_ids)},
        "priority": rule.priority,
    }


def rule_from_doc(doc: dict) -> TransformRule:
    return TransformRule(
        rule_id=doc["rule_id"],
        trigger=doc.get("trigger"),
        pattern=pattern_from_doc(doc["pattern"]),
        guards=tuple(
            Guard(entry["hole"], entry["predicate"], entry.get("arg")) for entry in doc.get("guard", [])
        ),
        template=pattern_from_doc(doc["template"]),
        provenance=Provenance(doc["provenance"]["kind"]),
        demo_ids=tuple(doc["provenance"].get("demo_ids", [])),
        priority=doc.get("priority", 0),
    )


def save_rules(rules: list[TransformRule], path: str | Path) -> None:
    Path(path).write_text(json.dumps([rule_to_doc(rule) for rule in rules], indent=2) + "\n")


def load_rules(path: str | Path) -> list[TransformRule]:
    return [rule_from_doc(doc) for doc in json.loads(Path(path).read_text())]
