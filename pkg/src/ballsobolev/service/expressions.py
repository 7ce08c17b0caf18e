"""Safe arithmetic-expression evaluation for non-polynomial inputs.

Expressions are parsed with the ast module and restricted to arithmetic,
the coordinate names x1..xd, the constant pi, and a small whitelist of
numpy functions, then evaluated vectorized over point arrays.
"""

from __future__ import annotations

import ast
import math

import numpy as np

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
    ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub,
    ast.UAdd,
)


class ExpressionError(ValueError):
    """Expression is syntactically invalid or uses forbidden constructs."""


def compile_expression(text: str, d: int):
    """Compile an expression in x1..xd into a vectorized evaluator over an
    (m, d) array of points."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression: {exc}") from exc
    names = set()
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ExpressionError(
                f"forbidden construct {type(node).__name__} in expression")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ExpressionError("only whitelisted functions are allowed")
            if node.keywords:
                raise ExpressionError("keyword arguments are not allowed")
        if isinstance(node, ast.Name):
            names.add(node.id)
    coords = {f"x{i + 1}" for i in range(d)}
    unknown = names - coords - set(_FUNCTIONS) - {"pi"}
    if unknown:
        raise ExpressionError(f"unknown names in expression: {sorted(unknown)}")

    code = compile(tree, "<expression>", "eval")

    def evaluator(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        env = {f"x{i + 1}": pts[:, i] for i in range(d)}
        env["pi"] = math.pi
        env.update(_FUNCTIONS)
        out = eval(code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(out, dtype=float), (pts.shape[0],)).copy()

    return evaluator
