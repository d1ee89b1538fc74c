"""
Direction clouds for Tropiscope
Log-directions of shell samples and their eps-neighbourhood clustering
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.spatial import cKDTree

from core.exceptions import EmptyAfterCutoffError, EmptySampleError
from sampling.probes import single_linkage
from sampling.variety import ShellSample

logger = logging.getLogger(__name__)

MAX_CLUSTER_EPS = 0.2


@dataclass
class DirectionCloud:
    """Unit directions of Log points with their shell of origin"""
    directions: np.ndarray
    radii: np.ndarray
    weights: np.ndarray
    log_points: np.ndarray
    seed: int = 0

    def __len__(self) -> int:
        return len(self.directions)

    @property
    def ambient(self) -> int:
        return self.directions.shape[1]

    def shell_radii(self) -> List[float]:
        return sorted(set(float(r) for r in self.radii))

    def restrict(self, mask: np.ndarray) -> "DirectionCloud":
        return DirectionCloud(self.directions[mask], self.radii[mask], self.weights[mask],
                              self.log_points[mask], self.seed)

    def outermost(self) -> "DirectionCloud":
        return self.restrict(self.radii == max(self.radii))


def direction_cloud(samples: Sequence[ShellSample], cutoff: float = 0.0) -> DirectionCloud:
    """Directions of every sample point with ||Log z|| >= cutoff, weight 1"""
    if not samples:
        raise EmptySampleError("direction cloud needs shell samples")
    X = np.vstack([s.log_points() for s in samples])
    radii = np.concatenate([np.full(len(s), s.radius) for s in samples])
    norms = np.linalg.norm(X, axis=1)
    keep = (norms >= cutoff) & (norms > 0)
    if not np.any(keep):
        raise EmptyAfterCutoffError(f"no sample point has log-norm >= {cutoff}")
    X, radii, norms = X[keep], radii[keep], norms[keep]
    seed = samples[0].seed
    logger.debug(f"Direction cloud of {len(X)} points from {len(samples)} shells")
    return DirectionCloud(X / norms[:, None], radii, np.ones(len(X)), X, seed)


def lexicographic_order(points: np.ndarray) -> np.ndarray:
    return np.lexsort(points.T[::-1])


def default_cluster_eps(cloud: DirectionCloud, eps_point: float) -> float:
    """3x the median nearest-neighbour gap at the largest shell, clipped to [eps_point/2, 0.2]"""
    outer = cloud.outermost().directions
    if len(outer) < 2:
        return eps_point / 2
    distances, _ = cKDTree(outer).query(outer, k=2)
    gap = float(np.median(distances[:, 1]))
    return float(np.clip(3.0 * gap, eps_point / 2, MAX_CLUSTER_EPS))


def cluster_directions(cloud: DirectionCloud, eps: float) -> List[np.ndarray]:
    """Connected components of the eps-neighbourhood graph, as index arrays into the cloud

    Points are snapped to an eps/4 grid first; one representative per occupied cell
    (the lexicographically first point) carries the linkage. Components are ordered
    by their lexicographically first point.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if len(cloud) == 0:
        return []
    order = lexicographic_order(cloud.directions)
    ordered = cloud.directions[order]
    cells = np.floor(ordered / (eps / 4)).astype(np.int64)
    _, first, cell_of = np.unique(cells, axis=0, return_index=True, return_inverse=True)
    cell_of = cell_of.reshape(-1)
    labels = single_linkage(ordered[first], eps)[cell_of]

    components: List[np.ndarray] = []
    seen = {}
    for position, label in enumerate(labels):
        if label not in seen:
            seen[label] = len(components)
            components.append([])
        components[seen[label]].append(order[position])
    logger.debug(f"{len(components)} direction components at eps={eps:.3g}")
    return [np.array(c, dtype=int) for c in components]
