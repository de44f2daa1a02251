"""Rule induction from expert demonstrations.

A demonstration pairs a failed source segment (and its conversion error) with
the expert's corrected target text.  Induction proceeds in five steps:

1. run the source through the baseline so the demonstration teaches only the
   residual fix, not conversions the tool already performs;
2. diff the normalized source tree against the expert tree and scope both to
   the flagged construct (widened from the minimal changed subtree when the
   error's construct encloses it);
3. anti-unify the scoped source subtrees into a pattern: positions where the
   demos disagree become holes, as do positions whose subtree the expert
   reused verbatim in the target (checked top-down, so reuse holes are
   maximal) and identifier/type-name leaves; positions holding the same
   binding in every demo share one hole, which is what makes patterns
   nonlinear;
4. anti-unify the targets into a template over the same holes; target
   material not derivable from a hole or shared constant is an error, never a
   guess;
5. attach the error class's guard recipe and set the trigger.

``lgg_oracle`` answers the same question by brute force: it enumerates every
antichain of hole positions over the demos' changed subtrees, keeps the
candidates that replay all demonstrations byte-exactly and contain the
policy-mandated holes, and returns the one with fewest holes.  It exists to
cross-check ``induce`` in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .baseline import ERROR_CLASSES, ConversionError, baseline_convert
from .nodes import AstNode, NodeKind, node_count, structural_equal, subtree_at, to_sexpr, walk
from .rewrite import Guard, Hole, Pattern, PatternNode, Provenance, TransformRule
from .segments import SqlSegment


class InductionConflict(Exception):
    """The demonstrations admit no single consistent rule."""


class UnboundTemplateHole(Exception):
    """The expert target contains material not derivable from the pattern."""


@dataclass(frozen=True)
class Demonstration:
    demo_id: str
    error: ConversionError
    source: SqlSegment
    expert_target: SqlSegment


# -- tree diffing -------------------------------------------------------------


@dataclass(frozen=True)
class Replace:
    path: tuple[int, ...]
    old: AstNode
    new: AstNode


@dataclass(frozen=True)
class Insert:
    path: tuple[int, ...]
    index: int
    subtree: AstNode


@dataclass(frozen=True)
class Delete:
    path: tuple[int, ...]
    index: int


Edit = Union[Replace, Insert, Delete]


def tree_diff(source: AstNode, target: AstNode) -> list[Edit]:
    """Edit script turning ``source`` into ``target``; replay-exact by construction."""
    edits: list[Edit] = []

    def go(a: AstNode, b: AstNode, path: tuple[int, ...]) -> None:
        if structural_equal(a, b):
            return
        if a.kind is not b.kind or a.token != b.token:
            edits.append(Replace(path, a, b))
            return
        if len(a.children) == len(b.children):
            for index, (ca, cb) in enumerate(zip(a.children, b.children)):
                go(ca, cb, path + (index,))
            return
        # Unequal child counts: trim structurally equal prefix/suffix, then
        # greedily delete the remaining old children and insert the new ones.
        la, lb = len(a.children), len(b.children)
        prefix = 0
        while prefix < min(la, lb) and structural_equal(a.children[prefix], b.children[prefix]):
            prefix += 1
        suffix = 0
        while (
            suffix < min(la, lb) - prefix
            and structural_equal(a.children[la - 1 - suffix], b.children[lb - 1 - suffix])
        ):
            suffix += 1
        mid_a = range(prefix, la - suffix)
        mid_b = range(prefix, lb - suffix)
        if len(mid_a) == len(mid_b):
            for offset in range(len(mid_a)):
                go(a.children[prefix + offset], b.children[prefix + offset], path + (prefix + offset,))
            return
        for index in reversed(mid_a):
            edits.append(Delete(path, index))
        for index in mid_b:
            edits.append(Insert(path, index, b.children[index]))

    go(source, target, ())
    return edits


def replay_diff(source: AstNode, edits: list[Edit]) -> AstNode:
    """Apply an edit script; used to prove diff correctness."""
    current = source
    for edit in edits:
        parent = subtree_at(current, edit.path)
        if isinstance(edit, Replace):
            current = _replace(current, edit.path, edit.new)
        elif isinstance(edit, Delete):
            children = parent.children[: edit.index] + parent.children[edit.index + 1 :]
            current = _replace(current, edit.path, parent.with_children(children))
        else:
            children = parent.children[: edit.index] + (edit.subtree,) + parent.children[edit.index :]
            current = _replace(current, edit.path, parent.with_children(children))
    return current


def _replace(root: AstNode, path: tuple[int, ...], new: AstNode) -> AstNode:
    if not path:
        return new
    children = list(root.children)
    children[path[0]] = _replace(children[path[0]], path[1:], new)
    return root.with_children(tuple(children))


# -- changed-region scoping ----------------------------------------------------


def changed_region(demo: Demonstration) -> tuple[AstNode, AstNode]:
    """The (source, target) subtree pair the demonstration actually changes.

    Computed on the baseline-normalized source versus the expert tree, then
    widened to the flagged construct when the construct encloses every edit.
    """
    outcome = baseline_convert(demo.source)
    normalized = outcome.residual_ast
    expert = demo.expert_target.ast
    edits = tree_diff(normalized, expert)
    if not edits:
        raise InductionConflict(
            f"demonstration {demo.demo_id} shows no change beyond the baseline conversion"
        )
    paths = [edit.path for edit in edits]
    scope = paths[0]
    for path in paths[1:]:
        scope = _common_prefix(scope, path)
    construct_path = _construct_path(normalized, demo.error)
    if construct_path is not None:
        if scope[: len(construct_path)] == construct_path:
            scope = construct_path
        else:
            scope = _common_prefix(scope, construct_path)
    return subtree_at(normalized, scope), subtree_at(expert, scope)


def _common_prefix(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    prefix: list[int] = []
    for x, y in zip(a, b):
        if x != y:
            break
        prefix.append(x)
    return tuple(prefix)


def _construct_path(tree: AstNode, error: ConversionError) -> Optional[tuple[int, ...]]:
    for path, current in walk(tree):
        if current.span == error.span and structural_equal(current, error.construct):
            return path
    return None


# -- anti-unification ----------------------------------------------------------


def _key(subtrees: tuple[AstNode, ...]) -> tuple[str, ...]:
    return tuple(to_sexpr(tree) for tree in subtrees)


def _occurs_in(needle: AstNode, haystack: AstNode) -> bool:
    return any(structural_equal(needle, candidate) for _, candidate in walk(haystack))


def _structures_agree(subtrees: tuple[AstNode, ...]) -> bool:
    first = subtrees[0]
    return all(
        tree.kind is first.kind and tree.token == first.token and len(tree.children) == len(first.children)
        for tree in subtrees[1:]
    )


def _reused_everywhere(sources: tuple[AstNode, ...], targets: tuple[AstNode, ...]) -> bool:
    return all(_occurs_in(source, target) for source, target in zip(sources, targets))


_GENERALIZED_LEAVES = frozenset({NodeKind.IDENTIFIER, NodeKind.TYPE_NAME})


def hole_positions(sources: tuple[AstNode, ...], targets: tuple[AstNode, ...]) -> list[tuple[int, ...]]:
    """Positions that must generalize, walking the common structure top-down.

    A position becomes a hole when the demos disagree there, when every demo
    reuses its subtree verbatim in the target, or when it is an identifier or
    type-name leaf in every demo.  Descent stops at a hole, so reuse holes
    are maximal.
    """
    positions: list[tuple[int, ...]] = []

    def go(nodes: tuple[AstNode, ...], path: tuple[int, ...]) -> None:
        if not _structures_agree(nodes):
            positions.append(path)
            return
        if _reused_everywhere(nodes, targets):
            positions.append(path)
            return
        first = nodes[0]
        if not first.children:
            if first.kind in _GENERALIZED_LEAVES:
                positions.append(path)
            return
        for index in range(len(first.children)):
            go(tuple(node.children[index] for node in nodes), path + (index,))

    go(sources, ())
    return positions


def _hole_constraint(
    subtrees: tuple[AstNode, ...], targets: tuple[AstNode, ...]
) -> Optional[frozenset[NodeKind]]:
    if _reused_everywhere(subtrees, targets):
        return None
    kinds = {tree.kind for tree in subtrees}
    if kinds <= _GENERALIZED_LEAVES and len(kinds) == 1 and not subtrees[0].children:
        return frozenset(kinds)
    return None


def build_pattern(
    sources: tuple[AstNode, ...],
    targets: tuple[AstNode, ...],
    positions: list[tuple[int, ...]],
) -> tuple[Pattern, dict[tuple[str, ...], Hole]]:
    """Pattern with holes at ``positions``; co-varying positions share a hole."""
    holes: dict[tuple[str, ...], Hole] = {}
    wanted = set(positions)

    def go(nodes: tuple[AstNode, ...], path: tuple[int, ...]) -> Pattern:
        if path in wanted:
            key = _key(nodes)
            if key not in holes:
                holes[key] = Hole(f"h{len(holes) + 1}", _hole_constraint(nodes, targets))
            return holes[key]
        first = nodes[0]
        children = tuple(
            go(tuple(node.children[index] for node in nodes), path + (index,))
            for index in range(len(first.children))
        )
        return PatternNode(first.kind, first.token, children)

    return go(sources, ()), holes


def build_template(
    targets: tuple[AstNode, ...],
    sources: tuple[AstNode, ...],
    holes: dict[tuple[str, ...], Hole],
) -> Pattern:
    """Template over the pattern's holes, hole-first and top-down.

    Raises InductionConflict when identical sources demand different targets
    and UnboundTemplateHole when target material has no hole to come from.
    """

    def go(nodes: tuple[AstNode, ...]) -> Pattern:
        key = _key(nodes)
        if key in holes:
            return holes[key]
        first = nodes[0]
        if not _structures_agree(nodes):
            if all(structural_equal(sources[0], source) for source in sources[1:]):
                raise InductionConflict("identical sources demand different targets")
            raise UnboundTemplateHole(
                f"target material at {to_sexpr(first)} is not derivable from the pattern"
            )
        children = tuple(
            go(tuple(node.children[index] for node in nodes)) for index in range(len(first.children))
        )
        return PatternNode(first.kind, first.token, children)

    return go(targets)


def _all_equal(nodes: tuple[AstNode, ...]) -> bool:
    return all(structural_equal(nodes[0], other) for other in nodes[1:])


def _recipe_guards(code: str, pattern: Pattern) -> tuple[Guard, ...]:
    guards = []
    for path, predicate, arg in ERROR_CLASSES[code].guard_recipe:
        target = pattern
        for index in path:
            if isinstance(target, Hole):
                target = None
                break
            target = target.children[index] if index < len(target.children) else None
            if target is None:
                break
        if isinstance(target, Hole):
            guards.append(Guard(target.name, predicate, arg))
    return tuple(guards)


def induce(demos: list[Demonstration]) -> TransformRule:
    """Induce one rule from 1-8 demonstrations of the same error class."""
    if not 1 <= len(demos) <= 8:
        raise ValueError("induction needs between one and eight demonstrations")
    codes = {demo.error.code for demo in demos}
    if len(codes) != 1:
        raise ValueError(f"demonstrations span several error codes: {sorted(codes)}")
    code = codes.pop()

    regions = [changed_region(demo) for demo in demos]
    sources = tuple(region[0] for region in regions)
    targets = tuple(region[1] for region in regions)

    positions = hole_positions(sources, targets)
    pattern, holes = build_pattern(sources, targets, positions)
    template = build_template(targets, sources, holes)
    rule = TransformRule(
        rule_id=f"learned-{code.lower()}",
        pattern=pattern,
        template=template,
        guards=_recipe_guards(code, pattern),
        trigger=code,
        provenance=Provenance.LEARNED,
        demo_ids=tuple(demo.demo_id for demo in demos),
        priority=100,
    )
    _check_replay(rule, demos)
    return rule


def _check_replay(rule: TransformRule, demos: list[Demonstration]) -> None:
    from .pipeline import convert_segment  # deferred: pipeline builds on induction's types

    for demo in demos:
        conversion = convert_segment(demo.source, [rule], verify_conversions=False)
        if conversion.converted_text != demo.expert_target.text:
            raise InductionConflict(
                f"induced rule does not replay demonstration {demo.demo_id}: "
                f"got {conversion.converted_text!r}"
            )


# -- brute-force oracle ---------------------------------------------------------


def lgg_oracle(demos: list[Demonstration]) -> TransformRule:
    """Enumerative twin of ``induce``; see the module docstring."""
    if not 1 <= len(demos) <= 8:
        raise ValueError("induction needs between one and eight demonstrations")
    codes = {demo.error.code for demo in demos}
    if len(codes) != 1:
        raise ValueError(f"demonstrations span several error codes: {sorted(codes)}")
    code = codes.pop()

    regions = [changed_region(demo) for demo in demos]
    sources = tuple(region[0] for region in regions)
    targets = tuple(region[1] for region in regions)
    for source in sources:
        if node_count(source) > 25:
            raise ValueError("oracle precondition: changed subtrees must have <= 25 nodes")

    mandated = set(hole_positions(sources, targets))
    forced = _forced_positions(sources)

    candidates: list[tuple[int, tuple, TransformRule]] = []
    saw_conflict: Optional[Exception] = None
    for antichain in _antichains(sources, forced):
        if not mandated <= antichain:
            continue
        pattern, holes = build_pattern(sources, targets, sorted(antichain))
        try:
            template = build_template(targets, sources, holes)
        except (InductionConflict, UnboundTemplateHole) as failure:
            saw_conflict = failure
            continue
        rule = TransformRule(
            rule_id=f"learned-{code.lower()}",
            pattern=pattern,
            template=template,
            guards=_recipe_guards(code, pattern),
            trigger=code,
            provenance=Provenance.LEARNED,
            demo_ids=tuple(demo.demo_id for demo in demos),
            priority=100,
        )
        if _replays(rule, demos):
            candidates.append((len(antichain), tuple(sorted(antichain)), rule))
    if not candidates:
        if saw_conflict is not None:
            raise type(saw_conflict)(str(saw_conflict))
        raise InductionConflict("no hole assignment replays every demonstration")
    candidates.sort(key=lambda entry: (entry[0], entry[1]))
    return candidates[0][2]


def _forced_positions(sources: tuple[AstNode, ...]) -> set[tuple[int, ...]]:
    """Positions where the demos structurally disagree; these must be holes."""
    forced: set[tuple[int, ...]] = set()

    def go(nodes: tuple[AstNode, ...], path: tuple[int, ...]) -> None:
        if not _structures_agree(nodes):
            forced.add(path)
            return
        first = nodes[0]
        if not first.children and not _all_equal(nodes):
            forced.add(path)
            return
        for index in range(len(first.children)):
            go(tuple(node.children[index] for node in nodes), path + (index,))

    go(sources, ())
    return forced


def _antichains(sources: tuple[AstNode, ...], forced: set[tuple[int, ...]]):
    """Every antichain of common-structure positions (holes prune descendants)."""

    def options(nodes: tuple[AstNode, ...], path: tuple[int, ...]) -> list[frozenset[tuple[int, ...]]]:
        with_hole = [frozenset({path})]
        if path in forced or not _structures_agree(nodes):
            return with_hole
        first = nodes[0]
        if not first.children:
            return with_hole + [frozenset()]
        per_child = [
            options(tuple(node.children[index] for node in nodes), path + (index,))
            for index in range(len(first.children))
        ]
        concrete: list[frozenset[tuple[int, ...]]] = []
        for combo in itertools.product(*per_child):
            concrete.append(frozenset().union(*combo))
        return with_hole + concrete

    return options(sources, ())


def _replays(rule: TransformRule, demos: list[Demonstration]) -> bool:
    from .pipeline import convert_segment

    return all(
        convert_segment(demo.source, [rule], verify_conversions=False).converted_text
        == demo.expert_target.text
        for demo in demos
    )
