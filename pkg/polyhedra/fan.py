"""
Normal fans and the exact limit set of a hypersurface for Tropiscope
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np

from algebra.laurent import LaurentPolynomial
from core.exceptions import EmptySupportError, MonomialInputError, NotCompactError
from geometry.slopes import RationalSlope
from polyhedra.cones import IntVector, PolyhedralCone
from polyhedra.polytope import RationalConvexPolyhedron, RationalPolytope, is_compact
from polyhedra.spherical import ARC, CELL, VERTEX, SphericalCell, SphericalComplex

logger = logging.getLogger(__name__)


@dataclass
class Fan:
    """Normal cones of every face of a polytope with their face relations"""
    ambient: int
    cones: List[PolyhedralCone] = field(default_factory=list)
    face_dims: List[int] = field(default_factory=list)
    faces_of: Dict[int, List[int]] = field(default_factory=dict)

    def maximal_cones(self) -> List[PolyhedralCone]:
        return [c for c, d in zip(self.cones, self.face_dims) if d == 0]

    def cones_of_dim(self, dim: int) -> List[PolyhedralCone]:
        return [c for c in self.cones if c.dim == dim]

    def rays(self) -> List[IntVector]:
        """Rays of the one-dimensional cones"""
        found = []
        for cone in self.cones_of_dim(1):
            found.extend(cone.rays)
        return sorted(set(found))


def _as_polytope(P: Union[RationalPolytope, RationalConvexPolyhedron]) -> RationalPolytope:
    if isinstance(P, RationalPolytope):
        return P
    if P.is_empty or not is_compact(P):
        raise NotCompactError("normal fans are defined for nonempty bounded polyhedra")
    return RationalPolytope.from_points(P.vertices)


def normal_fan(P: Union[RationalPolytope, RationalConvexPolyhedron]) -> Fan:
    """Complete fan whose maximal cones are the outer normal cones of the vertices"""
    polytope = _as_polytope(P)
    fan = Fan(polytope.ambient)
    for face in polytope.faces:
        fan.cones.append(polytope.normal_cone(face))
        fan.face_dims.append(face.dim)
    for i, face in enumerate(polytope.faces):
        # N(G) is a face of N(F) exactly when F is contained in G
        fan.faces_of[i] = [j for j, other in enumerate(polytope.faces)
                           if j != i and face.vertices <= other.vertices]
    return fan


def _unit(vector) -> Tuple[float, ...]:
    v = np.asarray(vector, dtype=float)
    return tuple(float(x) for x in v / np.linalg.norm(v))


def _cell_for_cone(cone: PolyhedralCone) -> SphericalCell:
    slopes = tuple(RationalSlope.of(r) for r in cone.rays)
    dim = cone.dim - 1
    if dim == 0:
        return SphericalCell(VERTEX, 0, slopes[:1], (_unit(cone.rays[0]),))
    directions = [np.asarray(s.direction()) for s in slopes]
    centre = _unit(np.sum(directions, axis=0))
    if dim == 1:
        first, second = slopes
        return SphericalCell(ARC, 1, (first, second), (_unit(first.vector), centre, _unit(second.vector)))
    return SphericalCell(CELL, dim, slopes, tuple(_unit(s.vector) for s in slopes) + (centre,))


def tropical_limit_set(p: LaurentPolynomial) -> SphericalComplex:
    """Codimension-one skeleton of the normal fan of the Newton polytope, on the sphere"""
    if p.is_zero():
        raise EmptySupportError("the zero polynomial defines no variety")
    if p.is_monomial():
        raise MonomialInputError("a monomial has no zeros in the torus")
    polytope = p.newton_polytope()
    n = polytope.ambient

    cells: Dict[Tuple, SphericalCell] = {}
    vertex_rays = set()
    for face in polytope.faces:
        if face.dim < 1:
            continue
        for piece in polytope.normal_cone(face).pointed_pieces():
            if not piece.rays:
                # the top face of a full-dimensional polytope has normal cone {0}
                continue
            rays = tuple(sorted(piece.rays))
            cell = _cell_for_cone(PolyhedralCone(rays, (), n))
            cells[(cell.dim, rays)] = cell
            vertex_rays.update(rays)

    for ray in vertex_rays:
        key = (0, (ray,))
        if key not in cells:
            cells[key] = _cell_for_cone(PolyhedralCone((ray,), (), n))

    ordered = [cells[key] for key in sorted(cells)]
    logger.debug(f"Tropical limit set of {p}: {len(ordered)} cells")
    return SphericalComplex(n, ordered)
