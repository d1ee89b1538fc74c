"""
Exact polyhedral cones for Tropiscope
Integer double description of {x : A x <= 0} and small exact linear algebra helpers
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Sequence, Set, Tuple

import sympy

from core.exceptions import DimensionTooLargeError

logger = logging.getLogger(__name__)

MAX_EXACT_DIM = 6

IntVector = Tuple[int, ...]


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def primitive_int(vector: Sequence[int]) -> IntVector:
    g = reduce(math.gcd, (abs(int(v)) for v in vector), 0)
    return tuple(int(v) // g for v in vector) if g else tuple(int(v) for v in vector)


def integer_row(row: Sequence) -> IntVector:
    """Scale a rational vector by a positive integer so that it becomes integral"""
    fractions = [Fraction(x) for x in row]
    scale = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fractions), 1)
    return tuple(int(f * scale) for f in fractions)


def to_fraction(value) -> Fraction:
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def exact_rank(rows: Sequence[Sequence]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                         for r in rows]).rank()


def integer_nullspace(rows: Sequence[Sequence], n: int) -> List[IntVector]:
    """Primitive integer basis of {x : row . x = 0 for every row}"""
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    matrix = sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                           for r in rows])
    basis = []
    for column in matrix.nullspace():
        basis.append(primitive_int(integer_row([to_fraction(x) for x in column])))
    return basis


def project_onto_span(vector: Sequence, basis: Sequence[Sequence]) -> List[Fraction]:
    """Orthogonal projection of vector onto span(basis), exact"""
    if not basis:
        return [Fraction(0)] * len(vector)
    B = sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in b]
                      for b in basis])
    v = sympy.Matrix([sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in vector])
    coefficients = (B * B.T).LUsolve(B * v)
    projected = B.T * coefficients
    return [to_fraction(x) for x in projected]


@dataclass(frozen=True)
class ConeGenerators:
    """Extreme rays and a lineality basis of a cone"""
    rays: Tuple[IntVector, ...]
    lines: Tuple[IntVector, ...]


def cone_generators(constraints: Sequence[Sequence], n: int) -> ConeGenerators:
    """Double description of {x in R^n : a . x <= 0 for every row a}

    Lines are eliminated first; afterwards rays are combined pairwise under the
    combinatorial adjacency test. All arithmetic is on Python integers.
    """
    if n > MAX_EXACT_DIM + 1:
        raise DimensionTooLargeError(f"exact enumeration is limited to dimension {MAX_EXACT_DIM}")
    rows = [integer_row(a) for a in constraints]
    lines: List[IntVector] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: List[IntVector] = []
    zero_sets: List[Set[int]] = []
    processed: Set[int] = set()

    for index, a in enumerate(rows):
        if not any(a):
            continue
        values = [dot(a, line) for line in lines]
        pivot = next((i for i, v in enumerate(values) if v != 0), None)
        if pivot is not None:
            l_star = lines.pop(pivot)
            v_star = values.pop(pivot)
            sign = 1 if v_star > 0 else -1
            lines = [primitive_int([v_star * x - v * y for x, y in zip(line, l_star)])
                     for line, v in zip(lines, values)]
            new_rays = []
            for ray, zeros in zip(rays, zero_sets):
                ar = dot(a, ray)
                new_rays.append(primitive_int([abs(v_star) * x - sign * ar * y for x, y in zip(ray, l_star)]))
                zeros.add(index)
            new_rays.append(primitive_int([-sign * y for y in l_star]))
            zero_sets.append(set(processed))
            rays = new_rays
        else:
            values = [dot(a, ray) for ray in rays]
            positive = [i for i, v in enumerate(values) if v > 0]
            negative = [i for i, v in enumerate(values) if v < 0]
            kept = [i for i, v in enumerate(values) if v <= 0]
            new_rays = [rays[i] for i in kept]
            new_zeros = [zero_sets[i] | {index} if values[i] == 0 else zero_sets[i] for i in kept]
            for i in positive:
                for j in negative:
                    common = zero_sets[i] & zero_sets[j]
                    adjacent = not any(k != i and k != j and common <= zero_sets[k] for k in range(len(rays)))
                    if adjacent:
                        combined = [values[i] * y - values[j] * x for x, y in zip(rays[i], rays[j])]
                        new_rays.append(primitive_int(combined))
                        new_zeros.append(common | {index})
            rays, zero_sets = new_rays, new_zeros
        processed.add(index)

    unique_rays = list(dict.fromkeys(rays))
    return ConeGenerators(tuple(unique_rays), tuple(lines))


@dataclass(frozen=True)
class PolyhedralCone:
    """cone(rays) + span(lineality), rays primitive"""
    rays: Tuple[IntVector, ...]
    lineality: Tuple[IntVector, ...] = ()
    ambient: int = 0

    @property
    def dim(self) -> int:
        return exact_rank(list(self.rays) + list(self.lineality))

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    def pointed_pieces(self) -> List["PolyhedralCone"]:
        """Split the lineality space into sign orthants; the pieces cover the cone"""
        if not self.lineality:
            return [self]
        pieces = []
        for signs in itertools.product((1, -1), repeat=len(self.lineality)):
            extra = tuple(tuple(s * x for x in w) for s, w in zip(signs, self.lineality))
            pieces.append(PolyhedralCone(tuple(self.rays) + extra, (), self.ambient))
        return pieces

    def contains(self, x: Sequence) -> bool:
        """Exact membership via the H-description of the cone"""
        dual = cone_generators([[-v for v in r] for r in self.rays]
                               + [list(w) for w in self.lineality]
                               + [[-v for v in w] for w in self.lineality], self.ambient)
        # dual rays c satisfy c . r >= 0 for generators; x belongs iff c . x >= 0
        return all(dot(c, x) >= 0 for c in dual.rays) and all(dot(c, x) == 0 for c in dual.lines)
