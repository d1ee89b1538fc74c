"""
Rational polyhedra for Tropiscope
H- and V-representations, polytopes given by points, and the half-space machinery
used to bound supports of power series
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import FrozenSet, List, Optional, Sequence, Tuple

import sympy

from core.exceptions import DimensionTooLargeError
from polyhedra.cones import (
    MAX_EXACT_DIM,
    IntVector,
    PolyhedralCone,
    cone_generators,
    dot,
    exact_rank,
    integer_nullspace,
    integer_row,
    primitive_int,
    project_onto_span,
)

logger = logging.getLogger(__name__)

RationalVector = Tuple[Fraction, ...]


def _fractions(values: Sequence) -> RationalVector:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class RationalHalfspace:
    """{x : <q, x> <= a}"""
    q: RationalVector
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _fractions(self.q))
        object.__setattr__(self, "a", Fraction(self.a))
        if not any(self.q):
            raise ValueError("half-space normal must be nonzero")

    def contains(self, x: Sequence) -> bool:
        return dot(self.q, x) <= self.a


@dataclass(frozen=True)
class VRepresentation:
    vertices: Tuple[RationalVector, ...]
    rays: Tuple[IntVector, ...]
    lines: Tuple[IntVector, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices


class RationalConvexPolyhedron:
    """Finite intersection of rational half-spaces, with lazily computed vertices and rays"""

    def __init__(self, halfspaces: Sequence[RationalHalfspace], dimension: int,
                 span_vectors: Sequence[Sequence[int]] = ()):
        if dimension > MAX_EXACT_DIM:
            raise DimensionTooLargeError(f"exact enumeration is limited to n <= {MAX_EXACT_DIM}")
        self.dimension = dimension
        self.halfspaces = tuple(halfspaces)
        self.span_vectors = tuple(tuple(v) for v in span_vectors)
        self._vrep: Optional[VRepresentation] = None

    def vrep(self) -> VRepresentation:
        if self._vrep is None:
            self._vrep = self._enumerate()
        return self._vrep

    def _enumerate(self) -> VRepresentation:
        # Homogenize: (x, t) with q.x - a t <= 0 and t >= 0
        n = self.dimension
        rows = [list(h.q) + [-h.a] for h in self.halfspaces]
        rows.append([0] * n + [-1])
        generators = cone_generators(rows, n + 1)
        vertices = sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in generators.rays if r[-1] > 0)
        rays = sorted(primitive_int(r[:-1]) for r in generators.rays if r[-1] == 0)
        lines = sorted(primitive_int(line[:-1]) for line in generators.lines)
        return VRepresentation(tuple(vertices), tuple(rays), tuple(lines))

    @property
    def is_empty(self) -> bool:
        return self.vrep().is_empty

    @property
    def vertices(self) -> Tuple[RationalVector, ...]:
        return self.vrep().vertices

    def contains(self, x: Sequence) -> bool:
        return all(h.contains(x) for h in self.halfspaces)

    def contains_vrep(self, vrep: VRepresentation) -> bool:
        """Every generator of vrep lies in this polyhedron"""
        for h in self.halfspaces:
            if any(dot(h.q, v) > h.a for v in vrep.vertices):
                return False
            if any(dot(h.q, r) > 0 for r in vrep.rays):
                return False
            if any(dot(h.q, line) != 0 for line in vrep.lines):
                return False
        return True

    def compact_within(self, vectors: Sequence[Sequence]) -> bool:
        """Bounded after projection onto span(vectors)"""
        vrep = self.vrep()
        if vrep.is_empty:
            return True
        directions = list(vrep.rays) + list(vrep.lines)
        return all(dot(d, u) == 0 for d in directions for u in vectors)

    def compact_in_span(self) -> bool:
        """Compactness relative to the span of the slopes that built this polyhedron"""
        if not self.span_vectors:
            return is_compact(self)
        return self.compact_within(self.span_vectors)

    def to_dict(self) -> dict:
        vrep = self.vrep()
        return {
            "dimension": self.dimension,
            "empty": vrep.is_empty,
            "compact": is_compact(self),
            "halfspaces": [{"q": [str(x) for x in h.q], "a": str(h.a)} for h in self.halfspaces],
            "vertices": [[str(x) for x in v] for v in vrep.vertices],
            "rays": [list(r) for r in vrep.rays],
            "lines": [list(line) for line in vrep.lines],
        }


def halfspace_intersection(halfspaces: Sequence[RationalHalfspace],
                           dimension: Optional[int] = None) -> RationalConvexPolyhedron:
    """Intersection of half-spaces with its exact V-representation"""
    if dimension is None:
        if not halfspaces:
            raise ValueError("dimension is required for an empty half-space list")
        dimension = len(halfspaces[0].q)
    polyhedron = RationalConvexPolyhedron(halfspaces, dimension)
    vrep = polyhedron.vrep()
    if vrep.is_empty:
        logger.info("Half-space intersection is empty")
    return polyhedron


def is_compact(polyhedron: RationalConvexPolyhedron) -> bool:
    vrep = polyhedron.vrep()
    return not vrep.rays and not vrep.lines


def from_generators(vertices: Sequence[Sequence], rays: Sequence[Sequence] = (),
                    lines: Sequence[Sequence] = (), dimension: Optional[int] = None) -> RationalConvexPolyhedron:
    """H-representation of conv(vertices) + cone(rays) + span(lines)"""
    if not vertices:
        raise ValueError("at least one vertex is required")
    n = dimension if dimension is not None else len(vertices[0])
    rows = [list(integer_row(list(v) + [-1])) for v in (_fractions(v) for v in vertices)]
    rows += [list(r) + [0] for r in rays]
    rows += [list(line) + [0] for line in lines] + [[-x for x in line] + [0] for line in lines]
    dual = cone_generators(rows, n + 1)
    halfspaces = []
    for c in dual.rays:
        if any(c[:-1]):
            halfspaces.append(RationalHalfspace(c[:-1], c[-1]))
    for c in dual.lines:
        if any(c[:-1]):
            halfspaces.append(RationalHalfspace(c[:-1], c[-1]))
            halfspaces.append(RationalHalfspace(tuple(-x for x in c[:-1]), -c[-1]))
    return RationalConvexPolyhedron(halfspaces, n)


def same_set(first: RationalConvexPolyhedron, second: RationalConvexPolyhedron) -> bool:
    """Mutual containment of two H-described polyhedra"""
    a, b = first.vrep(), second.vrep()
    if a.is_empty or b.is_empty:
        return a.is_empty and b.is_empty
    return second.contains_vrep(a) and first.contains_vrep(b)


@dataclass(frozen=True)
class Face:
    vertices: FrozenSet[int]
    facets: FrozenSet[int]
    dim: int


@dataclass
class RationalPolytope:
    """Convex hull of finitely many rational points"""
    vertices: Tuple[RationalVector, ...]
    ambient: int
    dim: int
    facet_normals: Tuple[IntVector, ...] = ()
    facet_offsets: Tuple[Fraction, ...] = ()
    faces: Tuple[Face, ...] = ()
    lineality: Tuple[IntVector, ...] = ()
    span: Tuple[IntVector, ...] = ()

    @classmethod
    def from_points(cls, points: Sequence[Sequence]) -> "RationalPolytope":
        unique = sorted(set(_fractions(p) for p in points))
        if not unique:
            raise ValueError("no points given")
        n = len(unique[0])
        if n > MAX_EXACT_DIM:
            raise DimensionTooLargeError(f"exact enumeration is limited to n <= {MAX_EXACT_DIM}")
        scale = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for p in unique for x in p), 1)
        scaled = [tuple(int(x * scale) for x in p) for p in unique]
        origin = scaled[0]
        differences = [tuple(x - y for x, y in zip(p, origin)) for p in scaled[1:]]
        r = exact_rank(differences)
        lineality = tuple(integer_nullspace(differences, n)) if differences else \
            tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        if r == 0:
            face = Face(frozenset([0]), frozenset(), 0)
            return cls((unique[0],), n, 0, faces=(face,), lineality=lineality)

        span = tuple(integer_nullspace(list(lineality), n)) if lineality else \
            tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        pivots = _pivot_coordinates(differences, r)
        projected = [tuple(p[i] for i in pivots) for p in scaled]

        # Facets a.x <= c of the projected, full-dimensional point set
        generators = cone_generators([list(p) + [-1] for p in projected], r + 1)
        facets = [g for g in generators.rays if any(g[:-1])]

        tight = [frozenset(f for f, g in enumerate(facets) if dot(g[:-1], p) == g[-1]) for p in projected]
        vertex_ids = [i for i, t in enumerate(tight) if exact_rank([facets[f][:-1] for f in t]) == r]
        vertices = tuple(unique[i] for i in vertex_ids)
        tight_vertices = [tight[i] for i in vertex_ids]

        normals = []
        for g in facets:
            lifted = [0] * n
            for k, i in enumerate(pivots):
                lifted[i] = g[k]
            normals.append(primitive_int(lifted))
        offsets = tuple(Fraction(g[-1], scale) for g in facets)

        facet_sets = [frozenset(v for v, t in enumerate(tight_vertices) if f in t) for f in range(len(facets))]
        faces = _enumerate_faces(facet_sets, len(vertices), vertices, r)
        return cls(vertices, n, r, tuple(normals), offsets, faces, lineality, span)

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient

    def facets_of(self, face: Face) -> List[IntVector]:
        return [self.facet_normals[f] for f in sorted(face.facets)]

    def normal_cone(self, face: Face) -> PolyhedralCone:
        """Outer normal cone of a face: projected facet normals plus the orthogonal complement of the hull"""
        rays = []
        for normal in self.facets_of(face):
            if self.lineality and self.dim < self.ambient:
                rays.append(primitive_int(integer_row(project_onto_span(normal, self.span))))
            else:
                rays.append(normal)
        return PolyhedralCone(tuple(sorted(set(rays))), self.lineality if self.dim < self.ambient else (),
                              self.ambient)

    def face_of_vertex(self, index: int) -> Face:
        return next(f for f in self.faces if f.vertices == frozenset([index]))

    def as_polyhedron(self) -> RationalConvexPolyhedron:
        return from_generators(self.vertices, dimension=self.ambient)


def _pivot_coordinates(differences: Sequence[IntVector], rank: int) -> List[int]:
    # Coordinates on which projection of the affine hull is injective
    matrix = sympy.Matrix([list(d) for d in differences])
    _, pivots = matrix.rref()
    return list(pivots)[:rank]


def _affine_rank(points: Sequence[RationalVector]) -> int:
    if len(points) <= 1:
        return 0
    origin = points[0]
    return exact_rank([[x - y for x, y in zip(p, origin)] for p in points[1:]])


def _enumerate_faces(facet_sets: Sequence[FrozenSet[int]], vertex_count: int,
                     vertices: Sequence[RationalVector], dim: int) -> Tuple[Face, ...]:
    whole = frozenset(range(vertex_count))
    found = {whole}
    frontier = [s for s in facet_sets if s]
    for s in frontier:
        found.add(s)
    while frontier:
        new_frontier = []
        for s in frontier:
            for t in facet_sets:
                meet = s & t
                if meet and meet not in found:
                    found.add(meet)
                    new_frontier.append(meet)
        frontier = new_frontier
    for v in range(vertex_count):
        found.add(frozenset([v]))

    faces = []
    for s in found:
        containing = frozenset(f for f, fs in enumerate(facet_sets) if s <= fs)
        face_dim = dim if s == whole else _affine_rank([vertices[v] for v in sorted(s)])
        faces.append(Face(s, containing, face_dim))
    faces.sort(key=lambda f: (f.dim, sorted(f.vertices)))
    return tuple(faces)


# Support bounds for power series

def newton_bound_from_vertices(verts: Sequence[Tuple[Sequence[int], float]]) -> RationalConvexPolyhedron:
    """Intersection of {alpha : <u, alpha> <= -b} over (u, b) pairs"""
    if not verts:
        raise ValueError("at least one (slope, offset) pair is required")
    halfspaces = []
    for u, b in verts:
        vector = getattr(u, "vector", u)
        halfspaces.append(RationalHalfspace(_fractions(vector), -Fraction(b)))
    span = [tuple(getattr(u, "vector", u)) for u, _ in verts]
    polyhedron = RationalConvexPolyhedron(halfspaces, len(span[0]), span_vectors=span)
    polyhedron.vrep()
    return polyhedron


def support_halfspace_violations(series, u, b: float) -> List[Tuple[int, ...]]:
    """Exponents alpha of the truncated support with b + <u, alpha> > 0"""
    vector = getattr(u, "vector", u)
    offset = Fraction(b)
    return sorted(alpha for alpha in series.support() if offset + dot(vector, alpha) > 0)
