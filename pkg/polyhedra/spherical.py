"""
Spherical complexes for Tropiscope
Finite unions of vertex, arc and higher cells on the unit sphere, their dimension,
balance and distance
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space, svd
from scipy.optimize import linprog

from geometry.maps import angular_distance
from geometry.slopes import RationalSlope

logger = logging.getLogger(__name__)

VERTEX = "vertex"
ARC = "arc"
CELL = "cell"

RANDOM_BALANCE_TRIALS = 10_000
MAX_EXACT_SUBSETS = 20_000


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def slerp(a: np.ndarray, b: np.ndarray, count: int) -> np.ndarray:
    """Points along the minor geodesic from a to b, endpoints included"""
    a, b = _unit(a), _unit(b)
    angle = float(angular_distance(a, b))
    if angle < 1e-15:
        return np.tile(a, (count, 1))
    ts = np.linspace(0.0, 1.0, count)[:, None]
    return (np.sin((1 - ts) * angle) * a + np.sin(ts * angle) * b) / np.sin(angle)


@dataclass(frozen=True)
class SphericalCell:
    """One cell of a spherical complex

    slopes holds the rational data found for the cell: one slope for a vertex,
    two endpoint slopes for an arc, the ray slopes for a higher cell. A cell whose
    rational data could not be recognized keeps rational=False.
    """
    kind: str
    dim: int
    slopes: Tuple[RationalSlope, ...] = ()
    samples: Tuple[Tuple[float, ...], ...] = ()
    rational: bool = True
    low_confidence: bool = False
    box_dimension: Optional[float] = None

    def representatives(self) -> np.ndarray:
        """Directions standing for the cell in balance and distance tests"""
        if self.rational and self.slopes:
            reps = [s.direction() for s in self.slopes]
            if self.kind != VERTEX:
                reps.extend(_unit(s) for s in self.samples)
            return np.array(reps)
        return np.array([_unit(s) for s in self.samples])

    def dense_samples(self, count: int = 64) -> np.ndarray:
        if self.kind == VERTEX:
            return self.representatives()[:1]
        if self.kind == ARC and len(self.samples) >= 2:
            # samples are ordered along the arc, so antipodal endpoints stay unambiguous
            pieces = [slerp(a, b, max(2, count // (len(self.samples) - 1)))
                      for a, b in zip(self.samples[:-1], self.samples[1:])]
            return np.vstack(pieces)
        if self.rational and len(self.slopes) >= 2:
            rng = np.random.default_rng(0)
            rays = np.array([s.direction() for s in self.slopes])
            weights = rng.dirichlet(np.ones(len(rays)), size=count)
            points = weights @ rays
            return points / np.linalg.norm(points, axis=1, keepdims=True)
        return self.representatives()

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "slopes": [list(s.vector) for s in self.slopes],
            "samples": [[float(x) for x in s] for s in self.samples],
        }


@dataclass
class SphericalComplex:
    ambient: int
    cells: List[SphericalCell] = field(default_factory=list)

    def vertices(self) -> List[SphericalCell]:
        return [c for c in self.cells if c.kind == VERTEX]

    def arcs(self) -> List[SphericalCell]:
        return [c for c in self.cells if c.kind == ARC]

    def vertex_slopes(self) -> List[RationalSlope]:
        return [c.slopes[0] for c in self.vertices() if c.rational and c.slopes]

    def representatives(self) -> np.ndarray:
        if not self.cells:
            return np.zeros((0, self.ambient))
        return np.vstack([c.representatives() for c in self.cells])

    def dense_samples(self, count: int = 64) -> np.ndarray:
        if not self.cells:
            return np.zeros((0, self.ambient))
        return np.vstack([c.dense_samples(count) for c in self.cells])

    def to_json(self) -> Dict:
        return {"cells": [c.to_dict() for c in self.cells]}

    @classmethod
    def from_json(cls, data: Dict, ambient: Optional[int] = None) -> "SphericalComplex":
        cells = []
        for item in data.get("cells", []):
            slopes = tuple(RationalSlope(tuple(int(v) for v in s)) for s in item.get("slopes", []))
            samples = tuple(tuple(float(x) for x in s) for s in item.get("samples", []))
            expected = {VERTEX: 1, ARC: 2}.get(item["kind"], len(slopes))
            rational = len(slopes) == expected and len(slopes) > 0
            cells.append(SphericalCell(item["kind"], int(item["dim"]), slopes, samples, rational))
        if ambient is None:
            probe = next((c.samples[0] for c in cells if c.samples), None)
            ambient = len(probe) if probe else 0
        return cls(ambient, cells)


def complex_dim_and_homogeneity(S: SphericalComplex) -> Tuple[int, bool]:
    """Maximal cell dimension and whether every maximal cell has it"""
    if not S.cells:
        return -1, True
    dimension = max(c.dim for c in S.cells)
    endpoint_directions = []
    for cell in S.cells:
        if cell.kind != VERTEX:
            endpoint_directions.extend(cell.representatives())
    homogeneous = True
    for cell in S.cells:
        if cell.dim == dimension:
            continue
        if cell.kind == VERTEX and endpoint_directions:
            direction = cell.representatives()[0]
            distances = angular_distance(np.array(endpoint_directions), direction[None, :])
            if np.min(distances) < 1e-6:
                continue
        homogeneous = False
    return dimension, homogeneous


def positively_spans(vectors) -> bool:
    """True iff some combination with all coefficients >= 1 is zero, i.e. cone = span"""
    V = np.asarray(vectors, dtype=float)
    if V.ndim != 2 or len(V) == 0:
        return False
    result = linprog(np.zeros(len(V)), A_eq=V.T, b_eq=np.zeros(V.shape[1]),
                     bounds=[(1, None)] * len(V), method="highs")
    return bool(result.status == 0)


@dataclass
class BalanceReport:
    balanced: bool
    span_dim: int
    lp_feasible: bool
    hyperplane_test: bool
    random_test: bool
    failing_direction: Optional[List[float]] = None

    def to_dict(self) -> Dict:
        return {
            "balanced": self.balanced,
            "span_dim": self.span_dim,
            "lp_feasible": self.lp_feasible,
            "hyperplane_test": self.hyperplane_test,
            "random_test": self.random_test,
            "failing_direction": self.failing_direction,
        }


def _span_basis(V: np.ndarray, rank_tol: float) -> np.ndarray:
    _, s, vt = svd(V, full_matrices=False)
    if len(s) == 0 or s[0] == 0:
        return np.zeros((0, V.shape[1]))
    rank = int(np.sum(s > rank_tol * s[0]))
    return vt[:rank]


def _both_sides(coords: np.ndarray, u: np.ndarray, tol: float) -> bool:
    values = coords @ u
    return bool(np.max(values) > tol and np.min(values) < -tol)


def balance_check(S: SphericalComplex, rank_tol: float = 1e-9, seed: int = 0) -> BalanceReport:
    """Whether S meets both open hemispheres for every direction within its span"""
    V = S.representatives()
    if len(V) == 0:
        return BalanceReport(False, 0, False, False, False)
    basis = _span_basis(V, rank_tol)
    span_dim = len(basis)
    coords = V @ basis.T
    tol = 1e-12

    lp_ok = positively_spans(coords)

    hyperplane_ok = True
    failing = None
    unique = np.unique(np.round(coords, 12), axis=0)
    if span_dim == 1:
        candidates = [np.array([1.0])]
    else:
        subsets = itertools.combinations(range(len(unique)), span_dim - 1)
        candidates = []
        for subset in itertools.islice(subsets, MAX_EXACT_SUBSETS):
            normal = null_space(unique[list(subset)])
            if normal.shape[1] == 1:
                candidates.append(normal[:, 0])
    for u in candidates:
        for signed in (u, -u):
            if not _both_sides(coords, signed, tol):
                hyperplane_ok = False
                failing = (basis.T @ signed).tolist()
                break
        if not hyperplane_ok:
            break

    rng = np.random.default_rng(seed)
    U = rng.normal(size=(RANDOM_BALANCE_TRIALS, span_dim))
    values = coords @ U.T
    random_ok = bool(np.all(values.max(axis=0) > tol) and np.all(values.min(axis=0) < -tol))
    if not random_ok and failing is None:
        bad = int(np.argmax(~((values.max(axis=0) > tol) & (values.min(axis=0) < -tol))))
        failing = (basis.T @ U[bad]).tolist()

    balanced = lp_ok and hyperplane_ok and random_ok
    return BalanceReport(balanced, span_dim, lp_ok, hyperplane_ok, random_ok, failing)


def directed_hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    if len(A) == 0 or len(B) == 0:
        return float("inf")
    distances = angular_distance(A[:, None, :], B[None, :, :])
    return float(np.max(np.min(distances, axis=1)))


def hausdorff(first: SphericalComplex, second: SphericalComplex, count: int = 64) -> float:
    """Angular Hausdorff distance between densely sampled complexes"""
    A, B = first.dense_samples(count), second.dense_samples(count)
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


def vertex_hausdorff(first: SphericalComplex, second: SphericalComplex) -> float:
    A = np.array([c.representatives()[0] for c in first.vertices()]) if first.vertices() else np.zeros((0, 1))
    B = np.array([c.representatives()[0] for c in second.vertices()]) if second.vertices() else np.zeros((0, 1))
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


def cells_from_directions(directions: Sequence[Sequence[float]]) -> SphericalComplex:
    """Complex of bare vertex cells; used for synthetic inputs"""
    directions = [tuple(_unit(d)) for d in directions]
    n = len(directions[0]) if directions else 0
    return SphericalComplex(n, [SphericalCell(VERTEX, 0, (), (d,), rational=False) for d in directions])
