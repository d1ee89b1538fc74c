"""
Expression AST for Tropiscope
Parses, prints and evaluates entire-function expressions over complex variables
"""

import cmath
import logging
import math
import re
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
import pyparsing as pp

from core.exceptions import (
    ExpressionSyntaxError,
    NegativePowerError,
    UnknownIdentifierError,
    VariableIndexError,
    ZeroCoordinateError,
)

logger = logging.getLogger(__name__)

FUNCTIONS = ("exp", "sin", "cos")

_VARIABLE = re.compile(r"^(?:z(\d+)|t(\d*))$")


@dataclass(frozen=True)
class Const:
    value: complex
    symbol: Optional[str] = None


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Sum:
    terms: Tuple["Node", ...]


@dataclass(frozen=True)
class Product:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"


Node = Union[Const, Var, Neg, Sum, Product, Power, Func]


class Evaluation(NamedTuple):
    value: complex
    finite: bool


@dataclass(frozen=True)
class Expression:
    """Parsed expression together with the arity it was declared with"""
    root: Node
    arity: int

    def __str__(self) -> str:
        return to_text(self.root)

    @property
    def is_polynomial(self) -> bool:
        return transcendental_depth(self.root) == 0

    @property
    def has_negative_powers(self) -> bool:
        return _has_negative_powers(self.root)

    def evaluate(self, points) -> Tuple[np.ndarray, np.ndarray]:
        return eval_points(self, points)


# Printing

def _format_const(node: Const) -> str:
    if node.symbol:
        return node.symbol
    value = complex(node.value)
    if value.imag == 0:
        real = value.real
        if real.is_integer() and abs(real) < 1e15:
            return str(int(real))
        return repr(real)
    return f"({value.real!r} + {value.imag!r}*i)"


def _wrap(node: Node, kinds) -> str:
    text = to_text(node)
    return f"({text})" if isinstance(node, kinds) else text


def to_text(node: Node) -> str:
    """Print the normal form of a node; the output re-parses to an equal AST"""
    if isinstance(node, Const):
        return _format_const(node)
    if isinstance(node, Var):
        return f"z{node.index}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, (Sum, Neg))
    if isinstance(node, Sum):
        parts: List[str] = []
        for position, term in enumerate(node.terms):
            if isinstance(term, Neg):
                inner = _wrap(term.arg, (Sum, Neg))
                parts.append(f"-{inner}" if position == 0 else f" - {inner}")
            else:
                text = _wrap(term, (Sum,))
                parts.append(text if position == 0 else f" + {text}")
        return "".join(parts)
    if isinstance(node, Product):
        return "*".join(_wrap(f, (Sum, Neg, Product)) for f in node.factors)
    if isinstance(node, Power):
        return f"{_wrap(node.base, (Sum, Neg, Product, Power))}^{node.exponent}"
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    raise TypeError(f"Unknown node {node!r}")


# Parsing

class ExpressionParser:
    """pyparsing grammar for the expression language"""

    def __init__(self, arity: int):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.arity = arity
        self.grammar = self._build_grammar()

    def _build_grammar(self) -> pp.ParserElement:
        number = pp.Regex(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
        number.set_parse_action(lambda s, loc, toks: Const(complex(float(toks[0]))))
        integer = pp.Regex(r"[+-]?\d+")
        name = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")

        expr = pp.Forward()
        call = name.copy() + pp.Suppress("(") + expr + pp.Suppress(")")
        call.set_parse_action(self._on_call)
        identifier = name.copy().set_parse_action(self._on_identifier)
        group = pp.Suppress("(") + expr + pp.Suppress(")")

        base = number | call | identifier | group
        factor = base + pp.Opt(pp.Suppress("^") + integer)
        factor.set_parse_action(self._on_factor)
        term = factor + pp.ZeroOrMore(pp.Suppress("*") + factor)
        term.set_parse_action(lambda s, loc, toks: toks[0] if len(toks) == 1 else Product(tuple(toks)))
        expr <<= pp.Opt(pp.Literal("-")) + term + pp.ZeroOrMore(pp.one_of("+ -") + term)
        expr.set_parse_action(self._on_expr)
        return expr

    def _on_identifier(self, text: str, loc: int, toks) -> Node:
        word = toks[0]
        if word == "pi":
            return Const(complex(math.pi), "pi")
        if word == "i":
            return Const(1j, "i")
        if word in FUNCTIONS:
            raise ExpressionSyntaxError(f"function '{word}' must be called with an argument", loc)
        match = _VARIABLE.match(word)
        if not match:
            raise UnknownIdentifierError(f"unknown identifier '{word}'", loc)
        digits = match.group(1) if match.group(1) is not None else (match.group(2) or "1")
        index = int(digits)
        if not 1 <= index <= self.arity:
            raise VariableIndexError(f"variable '{word}' outside 1..{self.arity}", loc)
        return Var(index)

    def _on_call(self, text: str, loc: int, toks) -> Node:
        word, arg = toks[0], toks[1]
        if word not in FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function '{word}'", loc)
        return Func(word, arg)

    def _on_factor(self, text: str, loc: int, toks) -> Node:
        if len(toks) == 1:
            return toks[0]
        base, exponent = toks[0], int(toks[1])
        if exponent < 0 and not isinstance(base, Var):
            raise NegativePowerError("negative powers are only allowed on variables", loc)
        return Power(base, exponent)

    def _on_expr(self, text: str, loc: int, toks) -> Node:
        items = list(toks)
        negate_first = isinstance(items[0], str) and items[0] == "-"
        if negate_first:
            items = items[1:]
        terms: List[Node] = [Neg(items[0]) if negate_first else items[0]]
        for sign, term in zip(items[1::2], items[2::2]):
            terms.append(Neg(term) if sign == "-" else term)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def parse(self, text: str) -> Expression:
        try:
            result = self.grammar.parse_string(text, parse_all=True)
        except pp.ParseBaseException as e:
            offset = len(text[: e.loc].encode("utf-8"))
            raise ExpressionSyntaxError(f"syntax error: {e.msg}", offset) from None
        except ExpressionSyntaxError as e:
            offset = len(text[: e.offset].encode("utf-8"))
            raise type(e)(str(e).rsplit(" (at offset", 1)[0], offset) from None
        return Expression(result[0], self.arity)


def parse_expression(text: str, n: int) -> Expression:
    """Parse `text` as an expression in the variables z1..zn (or t, t1..tn)"""
    return ExpressionParser(n).parse(text)


def split_top_level(text: str) -> List[str]:
    """Split '(t, exp(t))' style tuples at commas that are not nested in parentheses"""
    stripped = text.strip()
    if stripped.startswith("(") and stripped.endswith(")"):
        depth = 0
        for position, char in enumerate(stripped):
            depth += char == "("
            depth -= char == ")"
            if depth == 0 and position < len(stripped) - 1:
                break
        else:
            stripped = stripped[1:-1]
    parts, depth, current = [], 0, []
    for char in stripped:
        if char == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
            continue
        depth += char == "("
        depth -= char == ")"
        current.append(char)
    parts.append("".join(current).strip())
    return [p for p in parts if p]


# Structural queries

def transcendental_depth(node: Node) -> int:
    """Maximal number of nested exp/sin/cos nodes"""
    if isinstance(node, Func):
        return 1 + transcendental_depth(node.arg)
    if isinstance(node, (Neg, Power)):
        return transcendental_depth(node.arg if isinstance(node, Neg) else node.base)
    if isinstance(node, Sum):
        return max(transcendental_depth(t) for t in node.terms)
    if isinstance(node, Product):
        return max(transcendental_depth(f) for f in node.factors)
    return 0


def _has_negative_powers(node: Node) -> bool:
    if isinstance(node, Power):
        return node.exponent < 0 or _has_negative_powers(node.base)
    if isinstance(node, (Neg, Func)):
        return _has_negative_powers(node.arg)
    if isinstance(node, Sum):
        return any(_has_negative_powers(t) for t in node.terms)
    if isinstance(node, Product):
        return any(_has_negative_powers(f) for f in node.factors)
    return False


# Evaluation

def _as_points(points, arity: int) -> np.ndarray:
    Z = np.asarray(points, dtype=complex)
    if Z.ndim == 1:
        Z = Z.reshape(1, -1)
    if Z.shape[-1] != arity:
        raise ValueError(f"expected points with {arity} coordinates, got {Z.shape[-1]}")
    return Z


def _eval(node: Node, Z: np.ndarray):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return Z[:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.arg, Z)
    if isinstance(node, Sum):
        total = _eval(node.terms[0], Z)
        for term in node.terms[1:]:
            total = total + _eval(term, Z)
        return total
    if isinstance(node, Product):
        total = _eval(node.factors[0], Z)
        for factor in node.factors[1:]:
            total = total * _eval(factor, Z)
        return total
    if isinstance(node, Power):
        return np.power(_eval(node.base, Z), node.exponent)
    if isinstance(node, Func):
        return getattr(np, node.name)(_eval(node.arg, Z))
    raise TypeError(f"Unknown node {node!r}")


def eval_points(f: Expression, points) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate f at a batch of points; returns (values, finite mask)"""
    Z = _as_points(points, f.arity)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(_eval(f.root, Z), dtype=complex), (Z.shape[0],)).copy()
    return values, np.isfinite(values)


def eval_point(f: Expression, z) -> Evaluation:
    """Evaluate f at one point of the torus"""
    Z = _as_points(z, f.arity)
    if np.any(Z == 0):
        raise ZeroCoordinateError("evaluation point has a zero coordinate")
    values, finite = eval_points(f, Z)
    return Evaluation(complex(values[0]), bool(finite[0]))


def _eval_grad(node: Node, Z: np.ndarray):
    N, n = Z.shape
    if isinstance(node, Const):
        return np.full(N, node.value, dtype=complex), np.zeros((N, n), dtype=complex)
    if isinstance(node, Var):
        grad = np.zeros((N, n), dtype=complex)
        grad[:, node.index - 1] = 1.0
        return Z[:, node.index - 1].astype(complex), grad
    if isinstance(node, Neg):
        value, grad = _eval_grad(node.arg, Z)
        return -value, -grad
    if isinstance(node, Sum):
        value, grad = _eval_grad(node.terms[0], Z)
        for term in node.terms[1:]:
            v, g = _eval_grad(term, Z)
            value, grad = value + v, grad + g
        return value, grad
    if isinstance(node, Product):
        parts = [_eval_grad(f, Z) for f in node.factors]
        values = [v for v, _ in parts]
        prefix = [np.ones(N, dtype=complex)]
        for v in values[:-1]:
            prefix.append(prefix[-1] * v)
        suffix = np.ones(N, dtype=complex)
        grad = np.zeros((N, n), dtype=complex)
        for i in range(len(parts) - 1, -1, -1):
            grad += (prefix[i] * suffix)[:, None] * parts[i][1]
            suffix = suffix * values[i]
        return prefix[-1] * values[-1], grad
    if isinstance(node, Power):
        base, grad = _eval_grad(node.base, Z)
        k = node.exponent
        if k == 0:
            return np.ones(N, dtype=complex), np.zeros((N, n), dtype=complex)
        return np.power(base, k), (k * np.power(base, k - 1))[:, None] * grad
    if isinstance(node, Func):
        inner, grad = _eval_grad(node.arg, Z)
        if node.name == "exp":
            value = np.exp(inner)
            return value, value[:, None] * grad
        if node.name == "sin":
            return np.sin(inner), np.cos(inner)[:, None] * grad
        return np.cos(inner), -np.sin(inner)[:, None] * grad
    raise TypeError(f"Unknown node {node!r}")


def evaluate_with_gradient(f: Expression, points) -> Tuple[np.ndarray, np.ndarray]:
    """Forward-mode evaluation: values (N,) and complex partials (N, n)"""
    Z = _as_points(points, f.arity)
    with np.errstate(all="ignore"):
        return _eval_grad(f.root, Z)


def top_level_scale(f: Expression, points) -> np.ndarray:
    """Magnitude scale of f at points: sum of |top-level summands|"""
    Z = _as_points(points, f.arity)
    terms = f.root.terms if isinstance(f.root, Sum) else (f.root,)
    with np.errstate(all="ignore"):
        scale = np.zeros(Z.shape[0])
        for term in terms:
            scale = scale + np.abs(np.broadcast_to(_eval(term, Z), (Z.shape[0],)))
    return scale


def const_value(node: Node) -> Optional[complex]:
    """Value of a variable-free node, None otherwise"""
    if isinstance(node, Const):
        return complex(node.value)
    if isinstance(node, Var):
        return None
    if isinstance(node, Neg):
        inner = const_value(node.arg)
        return None if inner is None else -inner
    if isinstance(node, Func):
        inner = const_value(node.arg)
        return None if inner is None else getattr(cmath, node.name)(inner)
    if isinstance(node, Power):
        inner = const_value(node.base)
        return None if inner is None else inner ** node.exponent
    children = node.terms if isinstance(node, Sum) else node.factors
    values = [const_value(c) for c in children]
    if any(v is None for v in values):
        return None
    return sum(values) if isinstance(node, Sum) else math.prod(values)
