"""
Formal Taylor series for Tropiscope
Truncated power series of entire expressions by term-by-term composition
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from algebra.expr import Const, Expression, Func, Neg, Node, Power, Product, Sum, Var
from algebra.laurent import Exponent, LaurentPolynomial
from core.exceptions import NegativePowerInEntireContextError, SeriesDepthError

logger = logging.getLogger(__name__)

MAX_SERIES_DEPTH = 16
DROP_THRESHOLD = 1e-15

Series = Dict[Exponent, complex]


@dataclass(frozen=True)
class SeriesTruncation:
    """Taylor terms up to degree; tail_nonzero only reflects the terms of degree + 1"""
    payload: LaurentPolynomial
    degree: int
    tail_nonzero: bool

    def support(self) -> Tuple[Exponent, ...]:
        return self.payload.support()


def _order(exponent: Exponent):
    return (sum(exponent), exponent)


def _add(a: Series, b: Series) -> Series:
    out = dict(a)
    for exponent in sorted(b, key=_order):
        out[exponent] = out.get(exponent, 0j) + b[exponent]
    return out


def _scale(a: Series, factor: complex) -> Series:
    if factor == 0:
        return {}
    return {exponent: value * factor for exponent, value in a.items()}


def _mul(a: Series, b: Series, bound: int) -> Series:
    # Fixed summation order keeps low-degree coefficients independent of the bound
    left = sorted(a, key=_order)
    right = sorted(b, key=_order)
    out: Series = {}
    for ea in left:
        da = sum(ea)
        if da > bound:
            break
        for eb in right:
            if da + sum(eb) > bound:
                break
            exponent = tuple(x + y for x, y in zip(ea, eb))
            out[exponent] = out.get(exponent, 0j) + a[ea] * b[eb]
    return out


def _compose(name: str, g: Series, bound: int, arity: int) -> Series:
    zero = (0,) * arity
    g0 = complex(g.get(zero, 0j))
    h = {e: v for e, v in g.items() if e != zero}

    # h has no constant term, so h^m only reaches degree >= m
    powers: List[Series] = [{zero: 1.0 + 0j}]
    for _ in range(bound):
        nxt = _mul(powers[-1], h, bound)
        if not nxt:
            break
        powers.append(nxt)

    if name == "exp":
        out: Series = {}
        for m, hm in enumerate(powers):
            out = _add(out, _scale(hm, 1.0 / math.factorial(m)))
        return _scale(out, cmath.exp(g0))

    even: Series = {}
    odd: Series = {}
    for m, hm in enumerate(powers):
        sign = -1.0 if (m // 2) % 2 else 1.0
        term = _scale(hm, sign / math.factorial(m))
        if m % 2:
            odd = _add(odd, term)
        else:
            even = _add(even, term)
    if name == "sin":
        return _add(_scale(even, cmath.sin(g0)), _scale(odd, cmath.cos(g0)))
    return _add(_scale(even, cmath.cos(g0)), _scale(odd, -cmath.sin(g0)))


def _series(node: Node, bound: int, arity: int, depth: int) -> Series:
    zero = (0,) * arity
    if isinstance(node, Const):
        return {zero: complex(node.value)} if node.value != 0 else {}
    if isinstance(node, Var):
        exponent = [0] * arity
        exponent[node.index - 1] = 1
        return {tuple(exponent): 1.0 + 0j} if bound >= 1 else {}
    if isinstance(node, Neg):
        return _scale(_series(node.arg, bound, arity, depth), -1.0)
    if isinstance(node, Sum):
        out: Series = {}
        for term in node.terms:
            out = _add(out, _series(term, bound, arity, depth))
        return out
    if isinstance(node, Product):
        out = {zero: 1.0 + 0j}
        for factor in node.factors:
            out = _mul(out, _series(factor, bound, arity, depth), bound)
        return out
    if isinstance(node, Power):
        if node.exponent < 0:
            raise NegativePowerInEntireContextError("negative powers have no Taylor expansion at the origin")
        base = _series(node.base, bound, arity, depth)
        out = {zero: 1.0 + 0j}
        for _ in range(node.exponent):
            out = _mul(out, base, bound)
        return out
    if isinstance(node, Func):
        if depth + 1 > MAX_SERIES_DEPTH:
            raise SeriesDepthError(f"more than {MAX_SERIES_DEPTH} nested transcendental nodes")
        inner = _series(node.arg, bound, arity, depth + 1)
        return _compose(node.name, inner, bound, arity)
    raise TypeError(f"Unknown node {node!r}")


def truncate_series(f: Expression, D: int) -> SeriesTruncation:
    """All Taylor coefficients of f with total degree <= D

    tail_nonzero is True when a term of degree D + 1 is nonzero or a kept-degree
    coefficient fell below DROP_THRESHOLD. Higher degrees are not inspected, so
    sin(pi*z1*z2) at D = 4 reports False although its degree 6 term is nonzero.
    """
    if D < 0:
        raise ValueError("degree bound must be non-negative")
    if f.has_negative_powers:
        raise NegativePowerInEntireContextError("expression has negative powers; it is not entire")

    # One extra degree tells whether anything survives past D
    raw = _series(f.root, D + 1, f.arity, 0)
    kept: Series = {}
    tail = False
    for exponent, value in raw.items():
        if sum(exponent) > D:
            tail = tail or value != 0
        elif abs(value) < DROP_THRESHOLD:
            tail = tail or value != 0
        else:
            kept[exponent] = value
    logger.debug(f"Series of {f} to degree {D}: {len(kept)} terms, tail={tail}")
    return SeriesTruncation(LaurentPolynomial.from_dict(kept, f.arity), D, tail)
