"""Semantic verification of emitted segments.

Grammaticality is parse success under the target dialect.  Equivalence is
checked by evaluating source and candidate over randomized environments with
no NULL bindings, plus an exhaustive NULL/non-NULL grid over at most three
variables.  NULL-grid divergences are recorded and accepted only when the
conversion declares a registered intentional repair (the coalesce-to-empty
fixes change NULL behavior on purpose; everything else must agree exactly).

Values are Python-native: ``None`` for NULL, ``str``, exact ``Decimal``
numbers and ``bool``.  Evaluation models a three-valued logic: any comparison
with NULL is NULL, string concatenation and arithmetic propagate NULL, the
conditional's NULL condition selects the else branch.  The clock functions
return a fixed day number so runs are reproducible.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Optional, Union

from . import analysis
from .analysis import ValueFamily
from .baseline import INTENTIONAL_REPAIRS
from .dialects import TGT, DialectProfile, NullConcatSemantics, get_profile
from .lexer import ParseError
from .nodes import COMPARISON_OPS, AstNode, NodeKind
from .parser import parse
from .segments import SqlSegment

Value = Union[None, str, Decimal, bool]

#: Day number returned by GETDATE/NOW; a constant keeps evaluation pure.
CLOCK_DAY = Decimal(739000)

DEFAULT_SEED = 42
DEFAULT_RUNS = 100
GRID_VARIABLE_CAP = 3


class EvalError(Exception):
    """Operands are type-incompatible for the attempted operation."""


@dataclass(frozen=True)
class Environment:
    bindings: dict[str, Value]
    seeded_by: int = DEFAULT_SEED

    def get(self, name: str) -> Value:
        return self.bindings[name]

    def __contains__(self, name: str) -> bool:
        return name in self.bindings


@dataclass(frozen=True)
class Divergence:
    environment: Environment
    source_values: tuple
    target_values: tuple


@dataclass(frozen=True)
class VerificationReport:
    grammatical: bool
    equivalent_non_null: bool
    divergences: tuple[Divergence, ...]
    intentional_repair: Optional[str] = None

    @property
    def accepted(self) -> bool:
        if not self.grammatical or not self.equivalent_non_null:
            return False
        return not self.divergences or self.intentional_repair is not None

    def to_doc(self) -> dict:
        return {
            "grammatical": self.grammatical,
            "equivalent_non_null": self.equivalent_non_null,
            "intentional_repair": self.intentional_repair,
            "divergences": [
                {
                    "environment": {
                        name: _render_doc_value(value)
                        for name, value in sorted(entry.environment.bindings.items())
                    },
                    "source": [_render_doc_value(value) for value in entry.source_values],
                    "target": [_render_doc_value(value) for value in entry.target_values],
                }
                for entry in self.divergences
            ],
        }


def _render_doc_value(value) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, Decimal):
        return render_number(value)
    return str(value)


# -- evaluation ----------------------------------------------------------------


def render_number(value: Decimal) -> str:
    if value == value.to_integral_value():
        return str(value.to_integral_value())
    return str(value.normalize())


def _render_for_concat(value: Value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, Decimal):
        return render_number(value)
    raise EvalError(f"cannot use {value!r} in string context")


def evaluate(segment: SqlSegment, env: Environment) -> list[Value]:
    """Values of the segment's output columns (limit expressions included).

    Identifiers resolve to the environment first; declared variables missing
    from the environment fall back to their initializer.
    """
    profile = get_profile(segment.dialect)
    declarations = analysis.scan_declarations(segment.ast)
    evaluator = _Evaluator(profile, declarations, env)
    outputs: list[Value] = []
    for statement in segment.ast.children:
        if statement.kind is not NodeKind.SELECT_STMT:
            continue
        for child in statement.children:
            if child.kind is NodeKind.LIMIT_CLAUSE:
                outputs.append(evaluator.expr(child.children[0]))
            elif child.kind is NodeKind.ALIAS:
                outputs.append(evaluator.expr(child.children[0]))
            else:
                outputs.append(evaluator.expr(child))
    return outputs


class _Evaluator:
    def __init__(self, profile: DialectProfile, declarations, env: Environment):
        self.profile = profile
        self.declarations = declarations
        self.env = env

    def resolve(self, name: str) -> Value:
        if name in self.env:
            return self.env.get(name)
        declaration = self.declarations.get(name)
        if declaration is not None:
            if declaration.initializer is None:
                return None
            return self.expr(declaration.initializer)
        raise EvalError(f"unbound identifier {name!r}")

    def expr(self, node: AstNode) -> Value:
        kind = node.kind
        if kind is NodeKind.NUMBER_LIT:
            return Decimal(node.token or "0")
        if kind is NodeKind.STRING_LIT:
            return node.token or ""
        if kind is NodeKind.NULL_LIT:
            return None
        if kind is NodeKind.BOOL_LIT:
            return node.token == "TRUE"
        if kind is NodeKind.IDENTIFIER:
            return self.resolve(node.token or "")
        if kind is NodeKind.ALIAS:
            return self.expr(node.children[0])
        if kind is NodeKind.BINARY_OP:
            return self.binary(node)
        if kind is NodeKind.FUNCTION_CALL:
            return self.call(node)
        if kind is NodeKind.CASE_EXPR:
            return self.case(node)
        if kind is NodeKind.CAST_EXPR:
            return self.cast(self.expr(node.children[0]), node.children[1].token or "")
        raise EvalError(f"cannot evaluate {kind.value}")

    def binary(self, node: AstNode) -> Value:
        op = node.token or ""
        if op == ".":
            return self.resolve(analysis.variable_name(node))
        left = self.expr(node.children[0])
        right = self.expr(node.children[1])
        if op in COMPARISON_OPS:
            return self.compare(op, left, right)
        if op == "||":
            return self.concat([left, right])
        if op == "+" and (isinstance(left, str) or isinstance(right, str)):
            return self.concat([left, right])
        return self.arithmetic(op, left, right)

    def arithmetic(self, op: str, left: Value, right: Value) -> Value:
        if left is None or right is None:
            return None
        if not isinstance(left, Decimal) or not isinstance(right, Decimal):
            raise EvalError(f"operator {op} needs numeric operands")
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise EvalError("division by zero")
            return left / right
        raise EvalError(f"unknown operator {op!r}")

    def compare(self, op: str, left: Value, right: Value) -> Value:
        if left is None or right is None:
            return None
        if isinstance(left, bool) and isinstance(right, Decimal):
            left = Decimal(1 if left else 0)
        if isinstance(right, bool) and isinstance(left, Decimal):
            right = Decimal(1 if right else 0)
        if isinstance(left, bool) != isinstance(right, bool):
            raise EvalError("cannot compare boolean with non-numeric value")
        if type(left) is not type(right) and not (
            isinstance(left, Decimal) and isinstance(right, Decimal)
        ):
            raise EvalError(f"cannot compare {type(left).__name__} with {type(right).__name__}")
        if op == "=":
            return left == right
        if op == "<>":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right

    def concat(self, values: list[Value]) -> Value:
        if any(value is None for value in values):
            if self.profile.null_concat_semantics is NullConcatSemantics.PROPAGATE_NULL:
                return None
            values = [value if value is not None else "" for value in values]
        return "".join(_render_for_concat(value) for value in values)

    def call(self, node: AstNode) -> Value:
        name = node.token or ""
        if name == "CONVERT":
            return self.cast(self.expr(node.children[1]), node.children[0].token or "")
        args = [self.expr(child) for child in node.children]
        if name in ("GETDATE", "NOW"):
            return CLOCK_DAY
        if name in ("LEN", "CHAR_LENGTH"):
            if args[0] is None:
                return None
            if not isinstance(args[0], str):
                raise EvalError(f"{name} needs a string")
            return Decimal(len(args[0]))
        if name in ("UPPER", "LOWER"):
            if args[0] is None:
                return None
            if not isinstance(args[0], str):
                raise EvalError(f"{name} needs a string")
            return args[0].upper() if name == "UPPER" else args[0].lower()
        if name == "ISNULL":
            return args[0] if args[0] is not None else args[1]
        if name == "COALESCE":
            for value in args:
                if value is not None:
                    return value
            return None
        if name == "CONCAT":
            return self.concat(args)
        if name == "DATE_ADD":
            if args[0] is None or args[1] is None:
                return None
            if not isinstance(args[0], Decimal) or not isinstance(args[1], Decimal):
                raise EvalError("DATE_ADD needs numeric operands")
            return args[0] + args[1]
        if name == "IIF":
            condition = args[0]
            if condition is None or condition is False:
                return args[2]
            if condition is True:
                return args[1]
            raise EvalError("IIF needs a boolean condition")
        raise EvalError(f"unknown function {name!r}")

    def case(self, node: AstNode) -> Value:
        children = list(node.children)
        has_else = len(children) % 2 == 1
        else_expr = children.pop() if has_else else None
        for index in range(0, len(children), 2):
            condition = self.expr(children[index])
            if condition is True:
                return self.expr(children[index + 1])
            if condition is None or condition is False:
                continue
            raise EvalError("CASE needs boolean conditions")
        return self.expr(else_expr) if else_expr is not None else None

    def cast(self, value: Value, type_token: str) -> Value:
        if value is None:
            return None
        base = type_token.split("(", 1)[0]
        family = analysis.family_of_type(base)
        if family is ValueFamily.STRING:
            text = _render_for_concat(value)
            if "(" in type_token:
                width = int(type_token.split("(", 1)[1].rstrip(")").split(",")[0])
                text = text[:width]
            return text
        if family is ValueFamily.NUMBER:
            if isinstance(value, bool):
                return Decimal(1 if value else 0)
            if isinstance(value, Decimal):
                if base in ("INT", "SIGNED"):
                    return value.to_integral_value(rounding="ROUND_DOWN")
                return value
            try:
                return Decimal(value)
            except InvalidOperation:
                raise EvalError(f"cannot cast {value!r} to {type_token}") from None
        if family is ValueFamily.BOOL:
            if isinstance(value, bool):
                return value
            if isinstance(value, Decimal):
                return value != 0
            raise EvalError(f"cannot cast {value!r} to {type_token}")
        if family is ValueFamily.DATETIME:
            if isinstance(value, Decimal):
                return value
            raise EvalError(f"cannot cast {value!r} to {type_token}")
        raise EvalError(f"unknown cast target {type_token!r}")


# -- environment generation ------------------------------------------------------


def segment_variables(segment: SqlSegment) -> list[str]:
    """Referenced variable names, sorted; qualified names count by last part."""
    names: set[str] = set()
    alias_names: set[str] = set()

    def visit(current: AstNode) -> None:
        if current.kind is NodeKind.BINARY_OP and current.token == ".":
            names.add(analysis.variable_name(current))
            return
        if current.kind is NodeKind.IDENTIFIER:
            names.add(current.token or "")
            return
        if current.kind is NodeKind.ALIAS:
            visit(current.children[0])
            alias_names.add(current.children[1].token or "")
            return
        for child in current.children:
            visit(child)

    visit(segment.ast)
    return sorted(names - alias_names)


def _variable_families(segments: list[SqlSegment]) -> dict[str, ValueFamily]:
    families: dict[str, ValueFamily] = {}
    for segment in segments:
        declarations = analysis.scan_declarations(segment.ast)
        for name in segment_variables(segment):
            declaration = declarations.get(name)
            families.setdefault(name, declaration.family if declaration else ValueFamily.STRING)
    return families


def _draw(rng: random.Random, family: ValueFamily, base_type: Optional[str]) -> Value:
    if family is ValueFamily.STRING:
        return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(0, 8)))
    if family is ValueFamily.BOOL:
        return rng.random() < 0.5
    if family is ValueFamily.DATETIME:
        return Decimal(rng.randint(0, 73000))
    if base_type == "INT":
        return Decimal(rng.randint(-100, 100))
    return Decimal(rng.randint(-10000, 10000)) / Decimal(100)


def generate_environments(
    segments: list[SqlSegment], seed: int = DEFAULT_SEED, runs: int = DEFAULT_RUNS
) -> list[Environment]:
    """``runs`` all-non-NULL environments covering every referenced variable."""
    families = _variable_families(segments)
    types = {}
    for segment in segments:
        for name, declaration in analysis.scan_declarations(segment.ast).items():
            types.setdefault(name, declaration.base_type)
    rng = random.Random(seed)
    environments = []
    for _ in range(runs):
        bindings = {
            name: _draw(rng, families[name], types.get(name)) for name in sorted(families)
        }
        environments.append(Environment(bindings, seeded_by=seed))
    return environments


def null_grid(
    segments: list[SqlSegment], seed: int = DEFAULT_SEED
) -> list[Environment]:
    """Exhaustive NULL/non-NULL grid over the first GRID_VARIABLE_CAP variables."""
    families = _variable_families(segments)
    types = {}
    for segment in segments:
        for name, declaration in analysis.scan_declarations(segment.ast).items():
            types.setdefault(name, declaration.base_type)
    names = sorted(families)
    grid_names = names[:GRID_VARIABLE_CAP]
    rng = random.Random(seed + 1)
    sample = {name: _draw(rng, families[name], types.get(name)) for name in names}
    environments = []
    for mask in range(1 << len(grid_names)):
        bindings = dict(sample)
        for position, name in enumerate(grid_names):
            if mask & (1 << position):
                bindings[name] = None
        environments.append(Environment(bindings, seeded_by=seed))
    return environments


# -- verification -----------------------------------------------------------------


def _outcome(segment: SqlSegment, env: Environment) -> tuple:
    try:
        return tuple(evaluate(segment, env))
    except EvalError:
        return ("<eval-error>",)


def verify(
    source: SqlSegment,
    candidate_text: str,
    repair_code: Optional[str] = None,
    seed: int = DEFAULT_SEED,
    runs: int = DEFAULT_RUNS,
    tgt: DialectProfile = TGT,
) -> VerificationReport:
    """Check a candidate conversion for grammaticality and semantics preservation."""
    try:
        candidate_ast = parse(candidate_text, tgt)
    except ParseError:
        return VerificationReport(grammatical=False, equivalent_non_null=False, divergences=())
    candidate = SqlSegment(candidate_text, tgt.name, candidate_ast, source.segment_id)

    equivalent = True
    for env in generate_environments([source, candidate], seed=seed, runs=runs):
        if _outcome(source, env) != _outcome(candidate, env):
            equivalent = False
            break

    divergences = []
    for env in null_grid([source, candidate], seed=seed):
        if not any(value is None for value in env.bindings.values()):
            continue
        source_values = _outcome(source, env)
        candidate_values = _outcome(candidate, env)
        if source_values != candidate_values:
            divergences.append(Divergence(env, source_values, candidate_values))

    intentional = repair_code if (divergences and repair_code in INTENTIONAL_REPAIRS) else None
    return VerificationReport(
        grammatical=True,
        equivalent_non_null=equivalent,
        divergences=tuple(divergences),
        intentional_repair=intentional,
    )
