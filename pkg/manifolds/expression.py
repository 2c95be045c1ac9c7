"""
User-defined manifolds written as formulas in the virtual coordinates w1..wm.

Formulas are parsed into sympy expression trees, differentiated symbolically,
and compiled to numpy functions, so user manifolds get analytic partials.
"""

import ast
import logging
import re
from typing import List, Optional

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from manifolds.spec import ManifoldSpec
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

ALLOWED_FUNCTIONS = {
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "exp": sp.exp,
    "sqrt": sp.sqrt,
    "pow": sp.Pow,
}
ALLOWED_CONSTANTS = {"pi": sp.pi, "E": sp.E}

_VARIABLE = re.compile(r"\bw(\d+)\b")
_BINARY_OPERATORS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.BitXor)
_UNARY_OPERATORS = (ast.UAdd, ast.USub)


def _infer_dimension(expressions: List[str]) -> int:
    indices = [int(idx) for text in expressions for idx in _VARIABLE.findall(text)]
    return max(indices) if indices else 1


def _check_syntax(node: ast.AST, names: set, text: str) -> None:
    """Walk the Python syntax tree of a formula, accepting only arithmetic on known names."""
    if isinstance(node, ast.Expression):
        _check_syntax(node.body, names, text)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, _BINARY_OPERATORS):
        _check_syntax(node.left, names, text)
        _check_syntax(node.right, names, text)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, _UNARY_OPERATORS):
        _check_syntax(node.operand, names, text)
    elif isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return
    elif isinstance(node, ast.Name):
        if node.id not in names:
            raise ConfigurationError(
                f"Formula '{text}' uses unknown name '{node.id}'; "
                f"allowed names are {', '.join(sorted(names))}"
            )
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        if node.func.id not in ALLOWED_FUNCTIONS:
            raise ConfigurationError(f"Formula '{text}' uses unsupported function '{node.func.id}'")
        for arg in node.args:
            _check_syntax(arg, names, text)
    else:
        raise ConfigurationError(f"Formula '{text}' uses unsupported syntax '{ast.unparse(node)}'")


def parse_formula(text: str, symbols: List[sp.Symbol]) -> sp.Expr:
    """
    Parse one formula, rejecting unknown names and functions.

    The text is checked against an arithmetic-only syntax tree before sympy
    sees it, since sympy evaluates its input as Python.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except (SyntaxError, ValueError) as e:
        raise ConfigurationError(f"Cannot parse manifold formula '{text}': {getattr(e, 'msg', e)}") from e
    _check_syntax(tree, {str(s) for s in symbols} | set(ALLOWED_CONSTANTS), text)

    namespace = {str(s): s for s in symbols}
    namespace.update(ALLOWED_FUNCTIONS)
    namespace.update(ALLOWED_CONSTANTS)

    try:
        expr = parse_expr(
            text,
            local_dict=namespace,
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
    except Exception as e:
        raise ConfigurationError(f"Cannot parse manifold formula '{text}': {e}") from e

    unknown = expr.free_symbols - set(symbols)
    if unknown:
        raise ConfigurationError(
            f"Formula '{text}' uses unknown names {sorted(map(str, unknown))}; "
            f"allowed variables are {', '.join(map(str, symbols))}"
        )

    allowed = {sp.sin, sp.cos, sp.tan, sp.exp}
    for call in expr.atoms(sp.Function):
        if call.func not in allowed:
            raise ConfigurationError(f"Formula '{text}' uses unsupported function '{call.func}'")
    return expr


def from_expressions(expressions: List[str], m: Optional[int] = None, name: str = "custom") -> ManifoldSpec:
    """
    Build a manifold from n formulas in w1..wm.

    When m is omitted it is the largest variable index used. The returned spec
    carries symbolic partials, already validated against central differences.
    """
    if not expressions:
        raise ConfigurationError("A manifold needs at least one formula")

    dim = m if m is not None else _infer_dimension(expressions)
    if dim < 1:
        raise ConfigurationError(f"Manifold '{name}' needs m >= 1, got {dim}")

    symbols = list(sp.symbols(f"w1:{dim + 1}", real=True))
    exprs = [parse_formula(text, symbols) for text in expressions]
    jacobian_exprs = sp.Matrix(exprs).jacobian(symbols)

    value_fn = sp.lambdify(symbols, exprs, modules="numpy")
    jacobian_fn = sp.lambdify(symbols, [list(row) for row in jacobian_exprs.tolist()], modules="numpy")

    def function(w):
        shape = w.shape[:-1]
        values = value_fn(*(w[..., l] for l in range(dim)))
        return np.stack([np.broadcast_to(np.asarray(v, dtype=float), shape) for v in values], axis=-1)

    def jacobian(w):
        shape = w.shape[:-1]
        rows = jacobian_fn(*(w[..., l] for l in range(dim)))
        return np.stack(
            [np.stack([np.broadcast_to(np.asarray(v, dtype=float), shape) for v in row], axis=-1) for row in rows],
            axis=-2,
        )

    spec = ManifoldSpec(name=name, n=len(exprs), m=dim, function=function, jacobian_function=jacobian)
    spec.validate_partials()
    logger.info(f"Registered manifold '{name}' with n={spec.n}, m={spec.m}")
    return spec
