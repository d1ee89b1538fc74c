"""
Torus and sphere maps for Tropiscope
Log, Arg, the retraction of R^n onto the open unit ball, and directions
"""

import numpy as np

from core.exceptions import ZeroCoordinateError, ZeroVectorError

TWO_PI = 2.0 * np.pi


def _torus(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.size == 0 or z.shape[-1] < 1:
        raise ValueError("a torus point needs at least one coordinate")
    if np.any(z == 0):
        raise ZeroCoordinateError("torus points must not have zero coordinates")
    return z


def log_map(z) -> np.ndarray:
    """(log|z_1|, ..., log|z_n|), row-wise for batches"""
    return np.log(np.abs(_torus(z)))


def arg_map(z) -> np.ndarray:
    """Unit-modulus phases z_j/|z_j|"""
    z = _torus(z)
    return z / np.abs(z)


def arg_angles(z) -> np.ndarray:
    """Phases as angles wrapped into [0, 2pi)"""
    angles = np.mod(np.angle(_torus(z)), TWO_PI)
    # mod can round up to exactly 2pi
    return np.where(angles >= TWO_PI, 0.0, angles)


def rho(x) -> np.ndarray:
    """x / (1 + ||x||) with the Euclidean norm"""
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    return x / (1.0 + norm)


def rho_inverse(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y, axis=-1, keepdims=True)
    if np.any(norm >= 1.0):
        raise ValueError("points must lie in the open unit ball")
    return y / (1.0 - norm)


def direction_of(x) -> np.ndarray:
    """x / ||x|| for a single nonzero vector"""
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0 or not np.isfinite(norm):
        raise ZeroVectorError("the zero vector has no direction")
    return x / norm


def directions_of(X) -> np.ndarray:
    """Row-wise directions; rows must be nonzero"""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ZeroVectorError("the zero vector has no direction")
    return X / norms


def angular_distance(d1, d2) -> np.ndarray:
    """Angle between unit vectors, broadcasting over leading axes"""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    # 2*atan2 form stays accurate near 0 and pi where arccos of the dot product does not
    return 2.0 * np.arctan2(np.linalg.norm(d1 - d2, axis=-1), np.linalg.norm(d1 + d2, axis=-1))


def wrapped_difference(a, b) -> np.ndarray:
    """Signed angular difference a - b wrapped into [-pi, pi)"""
    return np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
