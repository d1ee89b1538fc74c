"""
Cell classification for Tropiscope
Decides whether a direction component is a vertex, a geodesic arc or a higher cell
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from core.exceptions import DegenerateScalesError
from geometry.maps import angular_distance, direction_of
from geometry.slopes import Irrational, RationalSlope, is_rational, rational_slope_of
from limitset.cloud import DirectionCloud
from polyhedra.spherical import ARC, CELL, VERTEX, SphericalCell

logger = logging.getLogger(__name__)

MIN_COMPONENT_POINTS = 10
MIN_BOX_POINTS = 100
MAX_DIAMETER_POINTS = 2000
ARC_SAMPLES = 9
CELL_SAMPLES = 256
MAX_REFINE_ANGLE = 0.3
MIN_REFINE_POINTS = 5


@dataclass
class ClassifierSettings:
    eps_point: float = 2e-2
    tol_arc: float = 1e-2
    vertex_q: int = 12
    vertex_tol: float = 5e-3
    arc_q: int = 4
    arc_tol: float = 0.1


@dataclass
class CellEstimate:
    """A classified component together with the evidence behind it"""
    cell: SphericalCell
    size: int
    diameter: float
    plane_residual: Optional[float] = None
    ambiguous: bool = False
    persistent_irrational: bool = False
    closed: bool = False
    shell_directions: List[List[float]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        data = self.cell.to_dict()
        data.update({
            "rational": self.cell.rational,
            "low_confidence": self.cell.low_confidence,
            "points": self.size,
            "diameter": self.diameter,
        })
        if self.plane_residual is not None:
            data["plane_residual"] = self.plane_residual
        if self.cell.box_dimension is not None:
            data["box_dimension"] = self.cell.box_dimension
            data["ambiguous"] = self.ambiguous
        if self.cell.kind == VERTEX:
            data["persistent_irrational"] = self.persistent_irrational
        if self.closed:
            data["closed"] = True
        return data


def box_counting_dim(points, scales: Sequence[float]) -> float:
    """Slope of log N(eps) against log(1/eps), N counting occupied grid cells of side eps"""
    points = np.asarray(points, dtype=float)
    scales = np.unique(np.asarray(scales, dtype=float))
    if len(points) < MIN_BOX_POINTS:
        raise DegenerateScalesError(f"box counting needs at least {MIN_BOX_POINTS} points, got {len(points)}")
    if len(scales) < 3 or np.any(scales <= 0):
        raise DegenerateScalesError("box counting needs at least three distinct positive scales")
    counts = [len(np.unique(np.floor(points / eps).astype(np.int64), axis=0)) for eps in scales]
    slope, _ = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)
    return float(slope)


def angular_diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    if len(points) > MAX_DIAMETER_POINTS:
        points = points[np.linspace(0, len(points) - 1, MAX_DIAMETER_POINTS).astype(int)]
    chord = float(np.max(pdist(points)))
    return 2.0 * float(np.arcsin(min(chord / 2.0, 1.0)))


def great_circle_fit(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Best plane through the origin (2 x n basis) and the angular residual of each point"""
    _, _, vt = np.linalg.svd(points, full_matrices=False)
    plane = vt[:2]
    off_plane = points - (points @ plane.T) @ plane
    residual = np.arcsin(np.clip(np.linalg.norm(off_plane, axis=1), 0.0, 1.0))
    return plane, residual


def _orient(plane: np.ndarray, points: np.ndarray) -> np.ndarray:
    # deterministic sign: the mean of the component has a non-negative first coordinate
    mean = points.mean(axis=0) @ plane.T
    if mean[0] < 0:
        plane = -plane
    return plane


def _arc_extent(points: np.ndarray, plane: np.ndarray) -> Tuple[float, float, float]:
    """Start angle, angular length, and largest gap of the points along the fitted circle"""
    coords = points @ plane.T
    theta = np.sort(np.arctan2(coords[:, 1], coords[:, 0]))
    gaps = np.diff(np.concatenate([theta, theta[:1] + 2 * np.pi]))
    g = int(np.argmax(gaps))
    start = theta[(g + 1) % len(theta)]
    length = 2 * np.pi - gaps[g]
    return float(start), float(length), float(gaps[g])


def _on_circle(plane: np.ndarray, angles: np.ndarray) -> np.ndarray:
    return np.cos(angles)[:, None] * plane[0] + np.sin(angles)[:, None] * plane[1]


def refine_vertex(cloud: DirectionCloud, direction: np.ndarray, reach: float) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Direction of the line through the Log centroids at the innermost and outermost shells

    At shell R the component is looked up within reach * Rmax / R of its direction,
    since a tentacle with constant offset drifts from its limit like 1/R.
    """
    radii = cloud.shell_radii()
    r_max = radii[-1]
    centroids = []
    for R in radii:
        angle = min(reach * r_max / R, MAX_REFINE_ANGLE)
        near = (cloud.radii == R) & (angular_distance(cloud.directions, direction[None, :]) <= angle)
        if np.count_nonzero(near) >= MIN_REFINE_POINTS:
            centroids.append(cloud.log_points[near].mean(axis=0))
    if len(centroids) < 2:
        return direction, [direction_of(c) for c in centroids]
    difference = centroids[-1] - centroids[0]
    if np.linalg.norm(difference) == 0:
        return direction, [direction_of(c) for c in centroids]
    return direction_of(difference), [direction_of(c) for c in centroids]


class CellClassifier:
    """Classifies the components of the outermost shell of a direction cloud"""

    def __init__(self, settings: Optional[ClassifierSettings] = None):
        self.settings = settings or ClassifierSettings()
        self.logger = logging.getLogger(__name__)

    def classify(self, cloud: DirectionCloud, component: np.ndarray, eps: float) -> CellEstimate:
        points = cloud.directions[component]
        size = len(points)
        diameter = angular_diameter(points)
        if size < MIN_COMPONENT_POINTS:
            self.logger.warning(f"Component of {size} points classified as a low-confidence vertex")
            return self._vertex(cloud, points, diameter, eps, low_confidence=True)
        if diameter <= 2 * self.settings.eps_point:
            return self._vertex(cloud, points, diameter, eps)

        plane, residual = great_circle_fit(points)
        plane_residual = float(np.percentile(residual, 99))
        if plane_residual <= self.settings.tol_arc:
            return self._arc(points, _orient(plane, points), diameter, plane_residual, eps)
        return self._higher(points, diameter, plane_residual)

    def _vertex(self, cloud: DirectionCloud, points: np.ndarray, diameter: float, eps: float,
                low_confidence: bool = False) -> CellEstimate:
        s = self.settings
        mean = direction_of(points.mean(axis=0))
        reach = max(eps, 2 * diameter)
        refined, per_shell = refine_vertex(cloud, mean, reach)
        slope = rational_slope_of(refined, s.vertex_q, s.vertex_tol)
        persistent = False
        if isinstance(slope, Irrational):
            # irrational from the refined direction and from each of the two outermost shells
            outer = per_shell[-2:] if len(per_shell) >= 2 else []
            persistent = bool(outer) and all(
                not is_rational(rational_slope_of(d, s.vertex_q, s.vertex_tol)) for d in outer)
            self.logger.info(f"Vertex near {np.round(refined, 4).tolist()} has no slope within {s.vertex_tol} "
                             f"(best {slope.best} at {slope.angle:.3g} rad)")
        cell = SphericalCell(VERTEX, 0, (slope,) if is_rational(slope) else (), (tuple(float(x) for x in refined),),
                             rational=is_rational(slope), low_confidence=low_confidence)
        return CellEstimate(cell, len(points), diameter, persistent_irrational=persistent,
                            shell_directions=[d.tolist() for d in per_shell])

    def _arc(self, points: np.ndarray, plane: np.ndarray, diameter: float, plane_residual: float,
             eps: float) -> CellEstimate:
        s = self.settings
        start, length, largest_gap = _arc_extent(points, plane)
        if largest_gap <= 2 * eps:
            self.logger.info("Component covers a whole great circle")
            samples = _on_circle(plane, start + np.linspace(0, 2 * np.pi, ARC_SAMPLES, endpoint=False))
            cell = SphericalCell(ARC, 1, (), tuple(tuple(float(x) for x in p) for p in samples), rational=False)
            return CellEstimate(cell, len(points), diameter, plane_residual, closed=True)

        ends = _on_circle(plane, np.array([start, start + length]))
        end_slopes = [rational_slope_of(e, s.arc_q, s.arc_tol) for e in ends]
        rational = all(is_rational(e) for e in end_slopes)
        samples = _on_circle(plane, start + np.linspace(0.0, length, ARC_SAMPLES))
        cell = SphericalCell(ARC, 1, tuple(end_slopes) if rational else (),
                             tuple(tuple(float(x) for x in p) for p in samples), rational=rational)
        self.logger.info(f"Arc of length {length:.3f} rad with endpoints "
                         f"{[str(e) if is_rational(e) else 'irrational' for e in end_slopes]}")
        return CellEstimate(cell, len(points), diameter, plane_residual)

    def _higher(self, points: np.ndarray, diameter: float, plane_residual: float) -> CellEstimate:
        n = points.shape[1]
        box_dimension = None
        ambiguous = True
        try:
            box_dimension = box_counting_dim(points, component_scales(points, diameter))
            ambiguous = abs(box_dimension - round(box_dimension)) >= 0.25
        except DegenerateScalesError as e:
            self.logger.warning(f"Higher cell dimension unavailable: {e}")
        dim = int(np.clip(round(box_dimension), 1, n - 1)) if box_dimension is not None else 1
        picks = points[np.linspace(0, len(points) - 1, min(CELL_SAMPLES, len(points))).astype(int)]
        cell = SphericalCell(CELL, dim, (), tuple(tuple(float(x) for x in p) for p in picks),
                             rational=False, low_confidence=ambiguous, box_dimension=box_dimension)
        self.logger.info(f"Higher cell: box dimension {box_dimension}, ambiguous={ambiguous}")
        return CellEstimate(cell, len(points), diameter, plane_residual, ambiguous=ambiguous)


def component_scales(points: np.ndarray, diameter: float, count: int = 4) -> np.ndarray:
    """Box sizes between diameter/16 and diameter/2, floored at twice the typical point spacing"""
    upper = diameter / 2
    lower = diameter / 16
    distances, _ = cKDTree(points).query(points, k=2)
    spacing = float(np.median(distances[:, 1]))
    lower = max(lower, 2 * spacing)
    if lower >= upper:
        raise DegenerateScalesError("component too sparse for box counting")
    return np.geomspace(lower, upper, count)


def classify_component(cloud: DirectionCloud, component: np.ndarray, eps: float,
                       settings: Optional[ClassifierSettings] = None) -> CellEstimate:
    return CellClassifier(settings).classify(cloud, component, eps)


def slopes_of(estimates: Sequence[CellEstimate]) -> List[RationalSlope]:
    return [s for e in estimates for s in e.cell.slopes]
