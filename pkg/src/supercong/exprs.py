"""Tiny exact evaluator for the arithmetic expressions used in the registry.

Registry fields such as bounds ("(n-1)/2"), Pochhammer exponents ("d-1"),
shifts ("-(n-1)*(d-1)/(2*d)") and applicability conditions
("n % (2*d) == 1") are strings.  They are evaluated here with Fraction
arithmetic over an explicit allowlist of AST nodes, so the registry can
never execute anything beyond integer arithmetic and comparisons.
"""

from __future__ import annotations

import ast
from fractions import Fraction


class ExpressionError(ValueError):
    """Malformed, disallowed, or non-integral registry expression."""


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.FloorDiv: lambda a, b: a // b,
    ast.Mod: lambda a, b: a % b,
    ast.Pow: lambda a, b: a ** b,
}

_CMPOPS = {
    ast.Eq: lambda a, b: a == b,
    ast.NotEq: lambda a, b: a != b,
    ast.Lt: lambda a, b: a < b,
    ast.LtE: lambda a, b: a <= b,
    ast.Gt: lambda a, b: a > b,
    ast.GtE: lambda a, b: a >= b,
}


def _eval_node(node: ast.AST, names: dict) -> Fraction | bool:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, names)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ExpressionError(f"only integer literals allowed, got {node.value!r}")
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise ExpressionError(f"unbound name {node.id!r}")
        value = names[node.id]
        if value is None:
            raise ExpressionError(f"name {node.id!r} required but not supplied")
        return Fraction(value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _eval_node(node.left, names)
        right = _eval_node(node.right, names)
        if isinstance(left, bool) or isinstance(right, bool):
            raise ExpressionError("boolean operand in arithmetic expression")
        op = type(node.op)
        if op in (ast.FloorDiv, ast.Mod):
            left, right = _as_int(left), _as_int(right)
        if op is ast.Pow:
            right = _as_int(right)
            if right < 0:
                raise ExpressionError("negative exponent in registry expression")
        try:
            return Fraction(_BINOPS[op](left, right))
        except ZeroDivisionError as exc:
            raise ExpressionError("division by zero in registry expression") from exc
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return -_eval_node(node.operand, names)
        if isinstance(node.op, ast.UAdd):
            return +_eval_node(node.operand, names)
        if isinstance(node.op, ast.Not):
            return not _eval_node(node.operand, names)
    if isinstance(node, ast.BoolOp):
        values = [_eval_node(v, names) for v in node.values]
        return all(values) if isinstance(node.op, ast.And) else any(values)
    if isinstance(node, ast.Compare):
        left = _eval_node(node.left, names)
        for op, comparator in zip(node.ops, node.comparators):
            if type(op) not in _CMPOPS:
                raise ExpressionError(f"comparison {type(op).__name__} not allowed")
            right = _eval_node(comparator, names)
            if not _CMPOPS[type(op)](left, right):
                return False
            left = right
        return True
    raise ExpressionError(f"disallowed syntax: {type(node).__name__}")


def _as_int(value: Fraction) -> int:
    if isinstance(value, bool):
        raise ExpressionError("boolean where integer expected")
    if value.denominator != 1:
        raise ExpressionError(f"non-integral value {value}")
    return value.numerator


def eval_expr(text: str, **names) -> Fraction | bool:
    """Evaluate ``text`` with the given name bindings, exactly."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from exc
    return _eval_node(tree, names)


def eval_fraction(text: str, **names) -> Fraction:
    value = eval_expr(text, **names)
    if isinstance(value, bool):
        raise ExpressionError(f"{text!r} is boolean, expected a number")
    return value


def eval_int(text: str, **names) -> int:
    """Evaluate ``text`` and require an integer result.

    Non-integrality signals a mis-registered case (for instance a closed-form
    length used outside its congruence class), so it is an error, never a
    silent rounding.
    """
    return _as_int(eval_fraction(text, **names))


def eval_bool(text: str, **names) -> bool:
    value = eval_expr(text, **names)
    if not isinstance(value, bool):
        raise ExpressionError(f"{text!r} is numeric, expected a condition")
    return value
