"""
Newton bound certificates for Tropiscope
Empirical support bounds of an entire function from the slopes of its limit set
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from algebra.expr import Expression
from algebra.laurent import LaurentPolynomial, try_laurent
from algebra.series import truncate_series
from core.exceptions import TropiscopeError
from geometry.slopes import RationalSlope
from polyhedra.cones import dot
from polyhedra.polytope import (RationalConvexPolyhedron, is_compact, newton_bound_from_vertices,
                                support_halfspace_violations)
from polyhedra.spherical import VERTEX, SphericalComplex

logger = logging.getLogger(__name__)


@dataclass
class NewtonCertificate:
    slopes: List[RationalSlope]
    bounds: List[Fraction]
    polyhedron: RationalConvexPolyhedron
    degree: int
    base_degree: int
    violations: Dict[str, List[Tuple[int, ...]]] = field(default_factory=dict)
    newton_polytope_match: Optional[bool] = None

    @property
    def compact(self) -> bool:
        return is_compact(self.polyhedron)

    @property
    def compact_in_span(self) -> bool:
        return self.polyhedron.compact_in_span()

    @property
    def violation_count(self) -> int:
        return sum(len(v) for v in self.violations.values())

    def to_dict(self) -> Dict:
        data = {
            "degree": self.degree,
            "base_degree": self.base_degree,
            "slopes": [list(s.vector) for s in self.slopes],
            "bounds": [str(b) for b in self.bounds],
            "polyhedron": self.polyhedron.to_dict(),
            "compact": self.compact,
            "compact_in_span": self.compact_in_span,
            "violations": {k: [list(a) for a in v] for k, v in self.violations.items()},
            "violation_count": self.violation_count,
        }
        if self.newton_polytope_match is not None:
            data["newton_polytope_match"] = self.newton_polytope_match
        return data


def _slopes(estimate: Union[SphericalComplex, Sequence]) -> List[RationalSlope]:
    if isinstance(estimate, SphericalComplex):
        if any(c.kind != VERTEX or not c.rational for c in estimate.cells):
            raise TropiscopeError("a Newton bound needs a limit set of vertices with rational slopes")
        slopes = estimate.vertex_slopes()
    else:
        slopes = [s if isinstance(s, RationalSlope) else RationalSlope.of(s) for s in estimate]
    if not slopes:
        raise TropiscopeError("a Newton bound needs at least one slope")
    return slopes


def _support(f: Expression, polynomial: Optional[LaurentPolynomial], degree: int):
    if polynomial is not None:
        return polynomial
    return truncate_series(f, degree)


def certify_newton_bound(f: Expression, estimate: Union[SphericalComplex, Sequence], D: int,
                         base_degree: Optional[int] = None) -> NewtonCertificate:
    """Intersect {<u, alpha> <= max over the support of <u, alpha>} over the vertex slopes u

    The maxima come from the Taylor support truncated at base_degree (default D // 2);
    exponents up to degree D that break a bound are reported as violations. A polynomial
    uses its exact support at every degree.
    """
    if D < 1:
        raise ValueError("truncation degree must be positive")
    base_degree = D // 2 if base_degree is None else base_degree
    slopes = _slopes(estimate)
    polynomial = try_laurent(f)

    base = _support(f, polynomial, base_degree)
    full = _support(f, polynomial, D)
    if not base.support():
        raise TropiscopeError(f"{f} has no Taylor terms up to degree {base_degree}")

    bounds = [max(Fraction(dot(s.vector, alpha)) for alpha in base.support()) for s in slopes]
    polyhedron = newton_bound_from_vertices([(s, -b) for s, b in zip(slopes, bounds)])
    violations = {}
    for s, b in zip(slopes, bounds):
        bad = support_halfspace_violations(full, s, -b)
        if bad:
            violations[str(s)] = bad

    match = None
    if polynomial is not None:
        newton = polynomial.newton_polytope()
        match = {tuple(Fraction(x) for x in v) for v in newton.vertices} == set(polyhedron.vertices) and \
            not polyhedron.vrep().rays and not polyhedron.vrep().lines

    certificate = NewtonCertificate(slopes, bounds, polyhedron, D, base_degree, violations, match)
    logger.info(f"Newton bound of {f} from {len(slopes)} slopes: compact={certificate.compact}, "
                f"compact in span={certificate.compact_in_span}, {certificate.violation_count} violations at degree {D}")
    return certificate
