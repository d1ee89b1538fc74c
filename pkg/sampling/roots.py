"""
Batched univariate root finding for Tropiscope
Companion eigenvalues for polynomials and multi-start Newton for entire functions
"""

import logging

import numpy as np

from algebra.expr import Expression, evaluate_with_gradient

logger = logging.getLogger(__name__)

NEWTON_MAX_STEPS = 50
NEWTON_TOL = 1e-12
POLISH_STEPS = 2


def _companion_roots(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of the companion matrices of rows of ascending coefficients"""
    N, m = a.shape
    d = m - 1
    if d < 1:
        return np.zeros((N, 0), dtype=complex)
    M = np.zeros((N, d, d), dtype=complex)
    with np.errstate(all="ignore"):
        M[:, 0, :] = -a[:, d - 1::-1] / a[:, d:d + 1]
    if d > 1:
        M[:, np.arange(1, d), np.arange(0, d - 1)] = 1.0
    ok = np.all(np.isfinite(M.reshape(N, -1)), axis=1)
    roots = np.full((N, d), np.nan + 0j)
    if np.any(ok):
        roots[ok] = np.linalg.eigvals(M[ok])
    return roots


def horner(a: np.ndarray, z: np.ndarray):
    """Value and derivative of ascending-coefficient rows a at points z of shape (N, K)"""
    value = np.broadcast_to(a[:, -1:], z.shape).astype(complex)
    derivative = np.zeros_like(value)
    with np.errstate(all="ignore"):
        for k in range(a.shape[1] - 2, -1, -1):
            derivative = derivative * z + value
            value = value * z + a[:, k:k + 1]
    return value, derivative


def polynomial_roots(a: np.ndarray) -> np.ndarray:
    """Nonzero roots of each row of ascending coefficients; NaN marks missing roots

    Large roots come from the polynomial itself, small roots from its reversal,
    and both are polished by Newton steps on the original polynomial.
    """
    a = np.asarray(a, dtype=complex)
    N, m = a.shape
    d = m - 1
    if d < 1:
        return np.zeros((N, 0), dtype=complex)
    large = _companion_roots(a)
    small_inverse = _companion_roots(a[:, ::-1])
    with np.errstate(all="ignore"):
        large = np.where(np.abs(large) >= 1.0, large, np.nan)
        small = np.where(np.abs(small_inverse) > 1.0, 1.0 / small_inverse, np.nan)
    roots = np.concatenate([large, small], axis=1)

    for _ in range(POLISH_STEPS):
        value, derivative = horner(a, roots)
        with np.errstate(all="ignore"):
            step = value / derivative
        roots = np.where(np.isfinite(step), roots - step, roots)
    roots[~np.isfinite(roots)] = np.nan
    return roots


def newton_roots(f: Expression, base: np.ndarray, j: int, starts: np.ndarray, R: float) -> np.ndarray:
    """Solve f = 0 in coordinate j from several starts per base point

    base has shape (N, n); starts has shape (N, S). Failed starts are NaN.
    Divergence is declared once |z| leaves [e^-2R, e^2R].
    """
    N, S = starts.shape
    points = np.repeat(base, S, axis=0)
    z = starts.reshape(-1).astype(complex).copy()
    active = np.ones(len(z), dtype=bool)
    converged = np.zeros(len(z), dtype=bool)
    log_limit = 2.0 * R

    for _ in range(NEWTON_MAX_STEPS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        P = points[idx]
        P[:, j] = z[idx]
        value, gradient = evaluate_with_gradient(f, P)
        with np.errstate(all="ignore"):
            delta = -value / gradient[:, j]
            z_new = z[idx] + delta
            log_modulus = np.log(np.abs(z_new))
        failed = ~np.isfinite(delta) | ~np.isfinite(z_new) | (np.abs(log_modulus) > log_limit)
        done = np.abs(delta) <= NEWTON_TOL * (1.0 + np.abs(z_new))
        z[idx] = z_new
        converged[idx[done & ~failed]] = True
        active[idx[done | failed]] = False
        z[idx[failed]] = np.nan

    z[~converged] = np.nan
    return z.reshape(N, S)


def dedupe_roots(roots: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Replace repeated roots within each row by NaN"""
    ordered = np.sort(roots, axis=1)
    if ordered.shape[1] < 2:
        return ordered
    with np.errstate(invalid="ignore"):
        gap = np.abs(np.diff(ordered, axis=1))
        repeat = gap <= tol * (1.0 + np.abs(ordered[:, 1:]))
    ordered[:, 1:][repeat] = np.nan
    return ordered


def circle_starts(centres_log: np.ndarray, per_circle: int, rng: np.random.Generator) -> np.ndarray:
    """Starting points on circles |z| = exp(c) for each row of log-radii, shape (N, C * per_circle)"""
    N, C = centres_log.shape
    angles = (np.arange(per_circle)[None, None, :] + rng.uniform(size=(N, C, 1))) * (2 * np.pi / per_circle)
    starts = np.exp(centres_log[:, :, None] + 1j * angles)
    return starts.reshape(N, C * per_circle)
