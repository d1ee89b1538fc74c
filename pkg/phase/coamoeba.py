"""
Coamoebas and phase limit sets for Tropiscope
Phase clouds, geodesic circle detection and box-counting dimension on the flat torus
"""

import io
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DegenerateScalesError, EmptyAfterCutoffError, EmptySampleError
from geometry.maps import TWO_PI, angular_distance, arg_angles, direction_of, wrapped_difference
from geometry.slopes import RationalSlope, primitive
from polyhedra.cones import integer_nullspace
from sampling.variety import ShellSample

logger = logging.getLogger(__name__)

MIN_CLOSURE_POINTS = 1000
MAX_CENTRES = 500
UNIFORM_FACTOR = 3.0
TORUS_SCALES = TWO_PI / np.array([64.0, 32.0, 16.0, 8.0])


@dataclass
class PhaseCloud:
    """Phases in [0, 2pi)^n with the shell radius each point came from"""
    angles: np.ndarray
    radii: np.ndarray

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def ambient(self) -> int:
        return self.angles.shape[1]

    def translated(self, shift: Sequence[float]) -> "PhaseCloud":
        return PhaseCloud(np.mod(self.angles + np.asarray(shift, dtype=float), TWO_PI), self.radii)

    def to_lines(self) -> str:
        out = io.StringIO()
        for radius, row in zip(self.radii, self.angles):
            out.write(" ".join([repr(float(radius))] + [repr(float(a)) for a in row]) + "\n")
        return out.getvalue()

    @classmethod
    def from_lines(cls, text: str) -> "PhaseCloud":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows:
            raise EmptySampleError("no phase lines")
        data = np.array([[float(x) for x in row] for row in rows])
        return cls(data[:, 1:], data[:, 0])


def phase_cloud(samples: Sequence[ShellSample], R0: float = 0.0, direction=None,
                eps: Optional[float] = None) -> PhaseCloud:
    """Arg of every sample point with ||Log z|| >= R0

    With a direction, only points whose Log-direction lies within eps of it are
    kept, which isolates a single tentacle.
    """
    if not samples:
        raise EmptySampleError("phase cloud needs shell samples")
    points = np.vstack([s.points for s in samples])
    radii = np.concatenate([np.full(len(s), s.radius) for s in samples])
    X = np.log(np.abs(points))
    norms = np.linalg.norm(X, axis=1)
    keep = (norms >= R0) & (norms > 0)
    if direction is not None:
        if eps is None:
            raise ValueError("a tentacle restriction needs eps")
        d = direction_of(direction)
        with np.errstate(invalid="ignore", divide="ignore"):
            directions = X / norms[:, None]
        keep &= angular_distance(directions, d[None, :]) <= eps
    if not np.any(keep):
        raise EmptyAfterCutoffError(f"no sample point left after cutoff {R0}")
    return PhaseCloud(arg_angles(points[keep]), radii[keep])


@dataclass
class GeodesicCircle:
    """Coset {theta0 + t*slope} found in a phase cloud"""
    slope: RationalSlope
    invariants: Tuple[Tuple[int, ...], ...]
    offset: Tuple[float, ...]
    count: int
    coverage: float
    uniform_coverage: float

    def to_dict(self) -> Dict:
        return {
            "slope": list(self.slope.vector),
            "invariants": [list(w) for w in self.invariants],
            "offset": list(self.offset),
            "count": self.count,
            "coverage": self.coverage,
            "uniform_coverage": self.uniform_coverage,
        }


def candidate_slopes(n: int, Q: int) -> List[RationalSlope]:
    """Sign-normalized primitive vectors with entries in [-Q, Q], smallest first"""
    found = set()
    for vector in itertools.product(range(-Q, Q + 1), repeat=n):
        if not any(vector):
            continue
        if primitive(vector) != vector:
            continue
        found.add(RationalSlope(vector).sign_normalized())
    return sorted(found, key=lambda s: (max(abs(v) for v in s.vector), s.vector))


class CircleDetector:
    """Greedy extraction of rational geodesic circles from a phase cloud"""

    def __init__(self, Q: int = 3, tol: float = 5e-2, min_coverage: float = 0.05):
        self.Q = Q
        self.tol = tol
        self.min_coverage = min_coverage
        self.logger = logging.getLogger(__name__)

    def _best_band(self, angles: np.ndarray, W: np.ndarray) -> Tuple[int, np.ndarray, np.ndarray]:
        """Largest band |<w_i, theta> - c_i| <= tol*||w_i|| centred at a cloud point"""
        values = np.mod(angles @ W.T, TWO_PI)
        half_widths = self.tol * np.linalg.norm(W, axis=1)
        centres = values[np.linspace(0, len(values) - 1, min(MAX_CENTRES, len(values))).astype(int)]
        best_count, best_mask = -1, None
        for centre in centres:
            mask = np.all(np.abs(wrapped_difference(values, centre[None, :])) <= half_widths, axis=1)
            count = int(np.count_nonzero(mask))
            if count > best_count:
                best_count, best_mask = count, mask
        # circular mean of the band refines the offset
        band = values[best_mask]
        offset = np.mod(np.angle(np.exp(1j * band).mean(axis=0)), TWO_PI)
        return best_count, best_mask, offset

    def detect(self, cloud: PhaseCloud) -> List[GeodesicCircle]:
        if len(cloud) == 0:
            raise EmptySampleError("circle detection needs a nonempty phase cloud")
        n = cloud.ambient
        total = len(cloud)
        candidates = []
        for slope in candidate_slopes(n, self.Q):
            W = np.array(integer_nullspace([slope.vector], n), dtype=float)
            uniform = float(np.prod(self.tol * np.linalg.norm(W, axis=1) / np.pi))
            candidates.append((slope, W, uniform))

        remaining = np.ones(total, dtype=bool)
        circles: List[GeodesicCircle] = []
        while np.count_nonzero(remaining) > 0:
            index = np.flatnonzero(remaining)
            best = None
            for slope, W, uniform in candidates:
                count, mask, offset = self._best_band(cloud.angles[index], W)
                coverage = count / total
                if coverage < max(self.min_coverage, UNIFORM_FACTOR * uniform):
                    continue
                if best is None or count > best[1]:
                    best = (slope, count, mask, offset, W, coverage, uniform)
            if best is None:
                break
            slope, count, mask, offset, W, coverage, uniform = best
            circles.append(GeodesicCircle(slope, tuple(tuple(int(v) for v in w) for w in W),
                                          tuple(float(c) for c in offset), count, coverage, uniform))
            remaining[index[mask]] = False
            self.logger.info(f"Circle with slope {slope} at offset {np.round(offset, 4).tolist()} "
                             f"covers {coverage:.1%} of the cloud")
        return circles


def detect_geodesic_circles(cloud: PhaseCloud, Q: int = 3, tol: float = 5e-2,
                            min_coverage: float = 0.05) -> List[GeodesicCircle]:
    return CircleDetector(Q, tol, min_coverage).detect(cloud)


def closure_dimension(cloud: PhaseCloud, scales: Optional[Sequence[float]] = None) -> float:
    """Box-counting dimension of the cloud in the max metric of the flat torus"""
    if len(cloud) < MIN_CLOSURE_POINTS:
        raise DegenerateScalesError(f"closure dimension needs at least {MIN_CLOSURE_POINTS} points")
    scales = np.unique(np.asarray(TORUS_SCALES if scales is None else scales, dtype=float))
    if len(scales) < 3 or np.any(scales <= 0):
        raise DegenerateScalesError("closure dimension needs at least three distinct positive scales")
    counts = []
    for eps in scales:
        boxes = np.floor(cloud.angles / eps).astype(np.int64)
        # the last column of boxes is glued to the first
        boxes[boxes >= int(np.ceil(TWO_PI / eps))] = 0
        counts.append(len(np.unique(boxes, axis=0)))
    slope, _ = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)
    return float(slope)
