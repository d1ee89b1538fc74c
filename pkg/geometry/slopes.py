"""
Rational slope recognition for Tropiscope
Finds the primitive integer vector closest in angle to a direction
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ZeroVectorError
from geometry.maps import angular_distance

logger = logging.getLogger(__name__)


def primitive(vector: Sequence[int]) -> Tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries; the sign is kept"""
    values = [int(v) for v in vector]
    g = reduce(math.gcd, (abs(v) for v in values), 0)
    if g == 0:
        raise ZeroVectorError("the zero vector has no slope")
    return tuple(v // g for v in values)


@dataclass(frozen=True)
class RationalSlope:
    """Signed primitive integer vector"""
    vector: Tuple[int, ...]

    def __post_init__(self):
        if primitive(self.vector) != tuple(self.vector):
            raise ValueError(f"{self.vector} is not primitive")

    @classmethod
    def of(cls, vector: Sequence[int]) -> "RationalSlope":
        return cls(primitive(vector))

    @property
    def dimension(self) -> int:
        return len(self.vector)

    def direction(self) -> np.ndarray:
        v = np.asarray(self.vector, dtype=float)
        return v / np.linalg.norm(v)

    def sign_normalized(self) -> "RationalSlope":
        """Representative whose first nonzero entry is positive"""
        first = next(v for v in self.vector if v != 0)
        return self if first > 0 else RationalSlope(tuple(-v for v in self.vector))

    def __neg__(self) -> "RationalSlope":
        return RationalSlope(tuple(-v for v in self.vector))

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.vector) + ")"


@dataclass(frozen=True)
class Irrational:
    """No primitive vector within tolerance; carries the best candidate seen"""
    best: Optional[RationalSlope]
    angle: float


SlopeResult = Union[RationalSlope, Irrational]


def _candidates_bruteforce(n: int, Q: int) -> np.ndarray:
    grid = np.array(list(itertools.product(range(-Q, Q + 1), repeat=n)), dtype=np.int64)
    return grid[np.any(grid != 0, axis=1)]


def _candidates_window(d: np.ndarray, Q: int, tol: float) -> np.ndarray:
    # Anchor on the largest coordinate; any p within tol of d has p_i/|p_j| near d_i/|d_j|
    n = len(d)
    j = int(np.argmax(np.abs(d)))
    dj = abs(d[j])
    sign = 1 if d[j] > 0 else -1
    window = int(math.ceil(2.0 * Q * tol / (dj - tol))) + 1
    offsets = np.array(list(itertools.product(range(-window, window + 1), repeat=n - 1)), dtype=np.int64)
    others = [i for i in range(n) if i != j]
    blocks = []
    for mu in range(1, Q + 1):
        centre = np.rint(mu * d[others] / dj).astype(np.int64)
        block = np.empty((len(offsets), n), dtype=np.int64)
        block[:, j] = sign * mu
        block[:, others] = centre + offsets
        blocks.append(block)
    candidates = np.vstack(blocks)
    return candidates[np.all(np.abs(candidates) <= Q, axis=1)]


def rational_slope_of(d, Q: int = 12, tol: float = 5e-3) -> SlopeResult:
    """Primitive p with ||p||_inf <= Q minimizing the angle to d, if within tol

    Ties are broken by smallest ||p||_inf, then lexicographically.
    """
    if Q < 1 or tol <= 0:
        raise ValueError("Q must be >= 1 and tol > 0")
    d = np.asarray(d, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0:
        raise ZeroVectorError("the zero vector has no slope")
    d = d / norm
    n = len(d)

    if n == 1:
        candidates = np.array([[1], [-1]], dtype=np.int64)
    elif np.max(np.abs(d)) - tol > 0.25 and (2 * Q + 1) ** n > 20000:
        candidates = _candidates_window(d, Q, tol)
    else:
        candidates = _candidates_bruteforce(n, Q)

    primitive_mask = np.gcd.reduce(np.abs(candidates), axis=1) == 1
    candidates = candidates[primitive_mask]
    if len(candidates) == 0:
        return Irrational(None, math.pi)
    units = candidates / np.linalg.norm(candidates, axis=1, keepdims=True)
    angles = angular_distance(units, d[None, :])
    inf_norms = np.max(np.abs(candidates), axis=1)
    keys = [candidates[:, i] for i in range(n - 1, -1, -1)] + [inf_norms, np.round(angles, 14)]
    order = np.lexsort(keys)
    best = candidates[order[0]]
    best_angle = float(angles[order[0]])
    slope = RationalSlope(tuple(int(v) for v in best))
    if best_angle <= tol:
        return slope
    logger.debug(f"No slope within {tol} of {d}; best {slope} at {best_angle:.3g}")
    return Irrational(slope, best_angle)


def is_rational(result: SlopeResult) -> bool:
    return isinstance(result, RationalSlope)
