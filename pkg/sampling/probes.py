"""
Probes on shell samples for Tropiscope
Rank of the Log differential along the variety, and ends over a limiting direction
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from algebra.expr import evaluate_with_gradient
from core.exceptions import EmptySampleError, NoPointsNearDirectionError
from geometry.maps import angular_distance, direction_of
from sampling.variety import PARAMETRIZED, ShellSample, VarietySpec

logger = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-8
END_LINKAGE = 0.02
STABILITY_WINDOW = 3


@dataclass
class GenericityReport:
    max_rank: int
    fraction_maximal: float
    ranks: Dict[int, int] = field(default_factory=dict)
    points: int = 0

    def to_dict(self) -> Dict:
        return {
            "max_rank": self.max_rank,
            "fraction_maximal": self.fraction_maximal,
            "ranks": {str(k): v for k, v in sorted(self.ranks.items())},
            "points": self.points,
        }


def _tangent_vectors(spec: VarietySpec, sample: ShellSample) -> np.ndarray:
    """Complex tangent vectors of V at each point, shape (N, n, k)"""
    if spec.mode == PARAMETRIZED:
        if sample.parameters is None:
            raise EmptySampleError("parametrized samples must carry their parameters")
        columns = [evaluate_with_gradient(e, sample.parameters)[1] for e in spec.expressions]
        return np.stack(columns, axis=1)
    _, gradient = evaluate_with_gradient(spec.expressions[0], sample.points)
    N, n = gradient.shape
    pivot = np.argmax(np.abs(gradient), axis=1)
    tangents = np.zeros((N, n, n - 1), dtype=complex)
    rows = np.arange(N)
    for column, offset in enumerate(range(1, n)):
        i = (pivot + offset) % n
        tangents[rows, i, column] = 1.0
        tangents[rows, pivot, column] = -gradient[rows, i] / gradient[rows, pivot]
    return tangents


def genericity_probe(spec: VarietySpec, sample: ShellSample) -> GenericityReport:
    """Numerical rank of d(Log) restricted to V at each sample point"""
    if len(sample) == 0:
        raise EmptySampleError("genericity probe needs sample points")
    W = _tangent_vectors(spec, sample)
    ratio = W / sample.points[:, :, None]
    # real tangent directions w and i*w map to Re(w/z) and Re(i w/z)
    J = np.concatenate([ratio.real, (1j * ratio).real], axis=2)
    singular = np.linalg.svd(J, compute_uv=False)
    top = singular[:, :1]
    ranks = np.sum(singular > RANK_THRESHOLD * np.where(top > 0, top, 1.0), axis=1)
    n, k = sample.ambient, W.shape[2]
    max_rank = min(n, 2 * k)
    values, counts = np.unique(ranks, return_counts=True)
    fraction = float(np.mean(ranks == max_rank))
    logger.info(f"Genericity of '{spec}': {fraction:.3f} of {len(ranks)} points have rank {max_rank}")
    return GenericityReport(max_rank, fraction, {int(v): int(c) for v, c in zip(values, counts)}, len(ranks))


@dataclass
class EndsReport:
    count: int
    stable: bool
    per_shell: List[int]
    representatives: List[List[float]]

    def to_dict(self) -> Dict:
        return {
            "count": self.count,
            "stable": self.stable,
            "per_shell": self.per_shell,
            "representatives": self.representatives,
        }


def single_linkage(points: np.ndarray, threshold: float) -> np.ndarray:
    """Cluster labels of the threshold-neighbourhood graph"""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    pairs = np.asarray(cKDTree(points).query_pairs(threshold, output_type="ndarray"), dtype=int).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
    _, labels = connected_components(graph, directed=False)
    return labels


def ends_at_direction(samples: Sequence[ShellSample], x, eps: float, min_size: int = 3) -> EndsReport:
    """Number of ends of V over direction x, stable across the outermost shells"""
    if len(samples) < STABILITY_WINDOW:
        raise ValueError(f"ends need at least {STABILITY_WINDOW} shells")
    d = direction_of(x)
    counts, representatives = [], []
    for sample in samples:
        X = sample.log_points()
        directions = X / np.linalg.norm(X, axis=1, keepdims=True)
        near = X[angular_distance(directions, d[None, :]) <= eps]
        labels = single_linkage(near, END_LINKAGE * sample.radius)
        sizes = np.bincount(labels) if len(labels) else np.zeros(0, dtype=int)
        big = [label for label, size in enumerate(sizes) if size >= min_size]
        counts.append(len(big))
        representatives = [near[labels == label].mean(axis=0).tolist() for label in big]
    if sum(counts) == 0:
        raise NoPointsNearDirectionError(f"no sample point within {eps} rad of {d.tolist()}")
    window = counts[-STABILITY_WINDOW:]
    stable = len(set(window)) == 1
    if not stable:
        logger.warning(f"End count over {d.tolist()} not stable across the last shells: {window}")
    representatives.sort()
    return EndsReport(window[-1], stable, counts, representatives)
