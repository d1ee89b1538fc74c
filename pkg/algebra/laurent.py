"""
Laurent polynomials for Tropiscope
Sparse exponent -> coefficient maps and conversion from expression ASTs
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from algebra.expr import Const, Expression, Func, Neg, Node, Power, Product, Sum, Var
from core.exceptions import EmptySupportError, NotPolynomialError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite map from exponent vectors to nonzero complex coefficients"""
    arity: int
    terms: Tuple[Tuple[Exponent, complex], ...] = ()

    @classmethod
    def from_dict(cls, coefficients: Dict[Exponent, complex], arity: int) -> "LaurentPolynomial":
        items = []
        for exponent, value in coefficients.items():
            if len(exponent) != arity:
                raise ValueError(f"exponent {exponent} does not have {arity} entries")
            value = complex(value)
            if value != 0:
                items.append((tuple(int(a) for a in exponent), value))
        return cls(arity, tuple(sorted(items)))

    @classmethod
    def constant(cls, value: complex, arity: int) -> "LaurentPolynomial":
        return cls.from_dict({(0,) * arity: value}, arity)

    @classmethod
    def monomial(cls, exponent: Exponent, arity: int, value: complex = 1.0) -> "LaurentPolynomial":
        return cls.from_dict({tuple(exponent): value}, arity)

    def as_dict(self) -> Dict[Exponent, complex]:
        return dict(self.terms)

    def support(self) -> Tuple[Exponent, ...]:
        return tuple(exponent for exponent, _ in self.terms)

    def coefficient(self, exponent: Exponent) -> complex:
        return self.as_dict().get(tuple(exponent), 0j)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = self.as_dict()
        for exponent, value in other.terms:
            out[exponent] = out.get(exponent, 0j) + value
        return LaurentPolynomial.from_dict(out, self.arity)

    def __neg__(self) -> "LaurentPolynomial":
        return self.scale(-1.0)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: Dict[Exponent, complex] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                exponent = tuple(x + y for x, y in zip(ea, eb))
                out[exponent] = out.get(exponent, 0j) + ca * cb
        return LaurentPolynomial.from_dict(out, self.arity)

    def scale(self, factor: complex) -> "LaurentPolynomial":
        return LaurentPolynomial.from_dict({e: c * factor for e, c in self.terms}, self.arity)

    def shift(self, beta: Exponent) -> "LaurentPolynomial":
        """Multiply by the monomial z^beta"""
        return LaurentPolynomial.from_dict(
            {tuple(a + b for a, b in zip(e, beta)): c for e, c in self.terms}, self.arity)

    def power(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (exponent, value), = self.terms
            return LaurentPolynomial.monomial(tuple(a * k for a in exponent), self.arity, value ** k)
        result = LaurentPolynomial.constant(1.0, self.arity)
        for _ in range(k):
            result = result * self
        return result

    def evaluate(self, points) -> np.ndarray:
        Z = np.asarray(points, dtype=complex).reshape(-1, self.arity)
        return self.monomial_values(Z).sum(axis=1)

    def monomial_values(self, Z: np.ndarray) -> np.ndarray:
        """c_a z^a for each term, shape (N, number of terms)"""
        out = np.empty((Z.shape[0], len(self.terms)), dtype=complex)
        with np.errstate(all="ignore"):
            for column, (exponent, value) in enumerate(self.terms):
                term = np.full(Z.shape[0], value, dtype=complex)
                for j, a in enumerate(exponent):
                    if a:
                        term = term * np.power(Z[:, j], a)
                out[:, column] = term
        return out

    def univariate_coefficients(self, j: int, Z: np.ndarray) -> Tuple[np.ndarray, int]:
        """Coefficients in z_j with the other coordinates fixed by the rows of Z

        Returns (C, emin) where C[:, e - emin] multiplies z_j^e.
        """
        exponents = [e[j] for e, _ in self.terms]
        emin, emax = min(exponents), max(exponents)
        C = np.zeros((Z.shape[0], emax - emin + 1), dtype=complex)
        with np.errstate(all="ignore"):
            for exponent, value in self.terms:
                term = np.full(Z.shape[0], value, dtype=complex)
                for i, a in enumerate(exponent):
                    if i != j and a:
                        term = term * np.power(Z[:, i], a)
                C[:, exponent[j] - emin] += term
        return C, emin

    def newton_polytope(self):
        """Convex hull of the support, in exact arithmetic"""
        from polyhedra.polytope import RationalPolytope

        if self.is_zero():
            raise EmptySupportError("the zero polynomial has no Newton polytope")
        return RationalPolytope.from_points(self.support())

    def to_expression(self) -> Expression:
        """Expression AST with the same value; used when a polynomial is rewritten"""
        terms = []
        for exponent, value in self.terms:
            factors = []
            if value != 1 or not any(exponent):
                factors.append(Const(value.real if value.imag == 0 else value))
            for j, a in enumerate(exponent):
                if a == 1:
                    factors.append(Var(j + 1))
                elif a:
                    factors.append(Power(Var(j + 1), a))
            term = factors[0] if len(factors) == 1 else Product(tuple(factors))
            terms.append(term)
        root = terms[0] if len(terms) == 1 else Sum(tuple(terms))
        return Expression(root, self.arity)

    def __str__(self) -> str:
        return str(self.to_expression()) if self.terms else "0"


def newton_polytope(p: LaurentPolynomial):
    return p.newton_polytope()


def _convert(node: Node, arity: int) -> LaurentPolynomial:
    if isinstance(node, Const):
        return LaurentPolynomial.constant(node.value, arity)
    if isinstance(node, Var):
        exponent = [0] * arity
        exponent[node.index - 1] = 1
        return LaurentPolynomial.monomial(tuple(exponent), arity)
    if isinstance(node, Neg):
        return -_convert(node.arg, arity)
    if isinstance(node, Sum):
        result = LaurentPolynomial(arity)
        for term in node.terms:
            result = result + _convert(term, arity)
        return result
    if isinstance(node, Product):
        result = LaurentPolynomial.constant(1.0, arity)
        for factor in node.factors:
            result = result * _convert(factor, arity)
        return result
    if isinstance(node, Power):
        return _convert(node.base, arity).power(node.exponent)
    if isinstance(node, Func):
        raise NotPolynomialError(f"'{node.name}' is transcendental; the variety must be treated as analytic")
    raise TypeError(f"Unknown node {node!r}")


def to_laurent(f: Expression) -> LaurentPolynomial:
    """Exact Laurent form of a polynomial expression"""
    return _convert(f.root, f.arity)


def try_laurent(f: Expression) -> Optional[LaurentPolynomial]:
    if not f.is_polynomial:
        return None
    try:
        return to_laurent(f)
    except NotPolynomialError:
        return None


def random_laurent(rng: np.random.Generator, arity: int, max_terms: int = 6,
                   low: int = -3, high: int = 3) -> LaurentPolynomial:
    """Random non-monomial Laurent polynomial with small integer exponents"""
    while True:
        count = int(rng.integers(2, max_terms + 1))
        coefficients = {}
        for _ in range(count):
            exponent = tuple(int(a) for a in rng.integers(low, high + 1, size=arity))
            coefficients[exponent] = complex(rng.normal(), rng.normal())
        p = LaurentPolynomial.from_dict(coefficients, arity)
        if len(p) >= 2:
            return p
