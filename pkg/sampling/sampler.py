"""
Shell sampler for Tropiscope
Draws points of a variety whose log-image lies on a shell ||Log z|| ~ R, chunk by chunk
with per-task seeds so the worker count never changes the result
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from algebra.expr import evaluate_with_gradient, top_level_scale
from algebra.laurent import LaurentPolynomial
from core.exceptions import RootFindingBudgetExceededError, ShellUnreachableError, TropiscopeError
from sampling.roots import circle_starts, dedupe_roots, newton_roots, polynomial_roots
from sampling.variety import PARAMETRIZED, ShellSample, VarietySpec, shell_band

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
RESIDUAL_TOL = 1e-9
PROJECTION_STEPS = 50
MAX_DOUBLINGS = 3
MIN_FRACTION = 0.25


@dataclass(frozen=True)
class SamplerSettings:
    """Work bounds for one (shell, chunk) task"""
    chunk_size: int = 500
    batch_size: int = 4096
    transcendental_batch_size: int = 128
    max_draws_per_point: int = 400
    starts_per_circle: int = 32
    circles: int = 8


def task_rng(seed: int, shell: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(shell, chunk)))


# Parametrized varieties

def _image(spec: VarietySpec, T: np.ndarray):
    values, grads = [], []
    for expression in spec.expressions:
        v, g = evaluate_with_gradient(expression, T)
        values.append(v)
        grads.append(g)
    return np.stack(values, axis=1), np.stack(grads, axis=1)


def project_to_shell(spec: VarietySpec, T: np.ndarray, R: float) -> np.ndarray:
    """Move parameters so that ||Log g(t)|| = R by minimum-norm Newton steps"""
    T = T.astype(complex).copy()
    active = np.ones(len(T), dtype=bool)
    for _ in range(PROJECTION_STEPS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        G, dG = _image(spec, T[idx])
        with np.errstate(all="ignore"):
            x = np.log(np.abs(G))
            norm = np.linalg.norm(x, axis=1)
            F = norm - R
            c = np.einsum("ij,ijk->ik", x / norm[:, None], dG / G[:, :, None])
            dt = -F[:, None] * np.conj(c) / np.sum(np.abs(c) ** 2, axis=1, keepdims=True)
            t = T[idx]
            additive = np.all(np.abs(dt) <= 0.5 * np.abs(t), axis=1)
            dw = dt / t
            size = np.abs(dw)
            dw = np.where(size > 3.0, dw * 3.0 / size, dw)
            stepped = np.where(additive[:, None], t + dt, t * np.exp(dw))
        finite = np.all(np.isfinite(stepped), axis=1) & np.isfinite(F)
        T[idx[finite]] = stepped[finite]
        T[idx[~finite]] = np.nan
        done = ~finite | (np.abs(F) <= 1e-12 * max(R, 1.0))
        active[idx[done]] = False
    return T


def _parametrized_chunk(spec: VarietySpec, R: float, target: int, seed: int, shell: int, chunk: int,
                        settings: SamplerSettings) -> Tuple[np.ndarray, np.ndarray, int]:
    rng = task_rng(seed, shell, chunk)
    band = shell_band(R)
    p = spec.params
    L = R + band
    doublings = 0
    budget = target * settings.max_draws_per_point
    draws = 0
    kept_points, kept_params = [], []
    total = 0
    while total < target and draws < budget:
        size = min(settings.batch_size, max(64, 2 * (target - total)))
        # arcsine profile on [-L, L] spreads images evenly in angle
        s = L * np.cos(rng.uniform(0.0, np.pi, size=(size, p)))
        phases = rng.uniform(0.0, TWO_PI, size=(size, p))
        T = project_to_shell(spec, np.exp(s + 1j * phases), R)
        with np.errstate(all="ignore"):
            G, _ = _image(spec, T)
            radius = np.linalg.norm(np.log(np.abs(G)), axis=1)
        ok = (np.all(np.isfinite(G), axis=1) & np.all(G != 0, axis=1)
              & np.all(np.isfinite(T), axis=1) & (np.abs(radius - R) <= band))
        draws += size
        accepted = int(ok.sum())
        kept_points.append(G[ok])
        kept_params.append(T[ok])
        total += accepted
        if accepted < 0.1 * size and doublings < MAX_DOUBLINGS:
            L *= 2.0
            doublings += 1
            logger.debug(f"Shell {R:.3g}: acceptance {accepted}/{size}, widening parameter box to {L:.3g}")
    points = np.vstack(kept_points)[:target] if kept_points else np.zeros((0, spec.ambient), dtype=complex)
    params = np.vstack(kept_params)[:target] if kept_params else np.zeros((0, p), dtype=complex)
    return points, params, draws


# Hypersurfaces

def _solve_polynomial(poly: LaurentPolynomial, Z: np.ndarray, j: int) -> np.ndarray:
    C, _ = poly.univariate_coefficients(j, Z)
    if C.shape[1] < 2:
        return np.zeros((len(Z), 0), dtype=complex)
    return polynomial_roots(C)


def _solve_transcendental(spec: VarietySpec, Z: np.ndarray, j: int, R: float, rng: np.random.Generator,
                          settings: SamplerSettings, centres: Optional[np.ndarray] = None) -> np.ndarray:
    if centres is None:
        # start circles around the two log-moduli that put the point on the shell
        others = np.delete(np.log(np.abs(Z)), j, axis=1)
        reach = np.sqrt(np.maximum(R ** 2 - np.sum(others ** 2, axis=1), 0.0))
        offsets = np.linspace(-shell_band(R), shell_band(R), settings.circles // 2)
        centres = np.concatenate([reach[:, None] + offsets[None, :], -reach[:, None] + offsets[None, :]], axis=1)
    starts = circle_starts(centres, settings.starts_per_circle, rng)
    roots = newton_roots(spec.expressions[0], Z, j, starts, R)
    return dedupe_roots(roots)


def _hypersurface_batch(spec: VarietySpec, poly: Optional[LaurentPolynomial], R: float, size: int,
                        rng: np.random.Generator, settings: SamplerSettings) -> Tuple[np.ndarray, np.ndarray]:
    n = spec.ambient
    band = shell_band(R)
    solved = rng.integers(0, n, size=size)
    u = rng.normal(size=(size, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    phases = rng.uniform(0.0, TWO_PI, size=(size, n))
    base = np.exp(R * u + 1j * phases)

    draw_rows, draw_roots, candidates = [], [], []
    for j in range(n):
        rows = np.flatnonzero(solved == j)
        if rows.size == 0:
            continue
        Z = base[rows]
        if poly is not None:
            roots = _solve_polynomial(poly, Z, j)
        else:
            roots = _solve_transcendental(spec, Z, j, R, rng, settings)
        if roots.shape[1] == 0:
            continue
        r_idx, k_idx = np.nonzero(np.isfinite(roots))
        points = Z[r_idx].copy()
        points[:, j] = roots[r_idx, k_idx]
        draw_rows.append(rows[r_idx])
        draw_roots.append(k_idx)
        candidates.append(points)
    if not candidates:
        return np.zeros((0, n), dtype=complex), np.zeros(0)
    order = np.lexsort((np.concatenate(draw_roots), np.concatenate(draw_rows)))
    points = np.vstack(candidates)[order]
    points = points[np.all(points != 0, axis=1)]

    residual, scale = hypersurface_residual(spec, poly, points)
    with np.errstate(all="ignore"):
        radius = np.linalg.norm(np.log(np.abs(points)), axis=1)
    ok = (np.isfinite(residual) & (residual <= RESIDUAL_TOL * (1.0 + scale))
          & (np.abs(radius - R) <= band))
    return points[ok], residual[ok]


def hypersurface_residual(spec: VarietySpec, poly: Optional[LaurentPolynomial], points: np.ndarray):
    """|f(z)| and the magnitude scale it is compared against"""
    if len(points) == 0:
        return np.zeros(0), np.zeros(0)
    if poly is not None:
        terms = poly.monomial_values(points)
        return np.abs(terms.sum(axis=1)), np.abs(terms).sum(axis=1)
    f = spec.expressions[0]
    values, gradient = evaluate_with_gradient(f, points)
    with np.errstate(all="ignore"):
        local = np.max(np.abs(gradient * points), axis=1)
    return np.abs(values), np.maximum(top_level_scale(f, points), local)


def _hypersurface_chunk(spec: VarietySpec, R: float, target: int, seed: int, shell: int, chunk: int,
                        settings: SamplerSettings) -> Tuple[np.ndarray, np.ndarray, int]:
    rng = task_rng(seed, shell, chunk)
    poly = spec.polynomial
    batch = settings.batch_size if poly is not None else settings.transcendental_batch_size
    budget = target * settings.max_draws_per_point
    draws, total = 0, 0
    kept_points, kept_residuals = [], []
    while total < target and draws < budget:
        points, residuals = _hypersurface_batch(spec, poly, R, batch, rng, settings)
        kept_points.append(points)
        kept_residuals.append(residuals)
        total += len(points)
        draws += batch
    points = np.vstack(kept_points)[:target]
    residuals = np.concatenate(kept_residuals)[:target]
    return points, residuals, draws


def _run_chunk(spec: VarietySpec, R: float, target: int, seed: int, shell: int, chunk: int,
               settings: SamplerSettings):
    if spec.mode == PARAMETRIZED:
        points, params, draws = _parametrized_chunk(spec, R, target, seed, shell, chunk, settings)
        return points, np.zeros(len(points)), params, draws
    if not spec.is_hypersurface:
        raise TropiscopeError("implicit sampling supports a single equation; parametrize higher codimension")
    points, residuals, draws = _hypersurface_chunk(spec, R, target, seed, shell, chunk, settings)
    return points, residuals, None, draws


def _chunk_targets(count: int, chunk_size: int) -> List[int]:
    chunks = max(1, math.ceil(count / chunk_size))
    base, extra = divmod(count, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _assemble(spec: VarietySpec, R: float, count: int, seed: int, results) -> ShellSample:
    points = np.vstack([r[0] for r in results]) if results else np.zeros((0, spec.ambient), dtype=complex)
    residuals = np.concatenate([r[1] for r in results]) if results else np.zeros(0)
    params = None
    if spec.mode == PARAMETRIZED:
        params = np.vstack([r[2] for r in results])
    draws = sum(r[3] for r in results)
    if len(points) == 0:
        raise ShellUnreachableError(f"no point of '{spec}' found on the shell R={R:g} after {draws} draws")
    if len(points) < MIN_FRACTION * count:
        raise RootFindingBudgetExceededError(
            f"only {len(points)} of {count} points found on the shell R={R:g} after {draws} draws")
    if len(points) < count:
        logger.warning(f"Shell R={R:g}: returning {len(points)} of {count} requested points")
    return ShellSample(R, shell_band(R), points, residuals, seed, params)


def sample_shells(spec: VarietySpec, radii: Sequence[float], count: int, seed: int, workers: int = 1,
                  settings: Optional[SamplerSettings] = None) -> List[ShellSample]:
    """Sample every shell of a schedule; tasks run in parallel and merge in task order"""
    settings = settings or SamplerSettings()
    targets = _chunk_targets(count, settings.chunk_size)
    tasks = [(shell, chunk, R, target) for shell, R in enumerate(radii) for chunk, target in enumerate(targets)]
    logger.info(f"Sampling '{spec}' on {len(radii)} shells, {count} points each, {len(tasks)} tasks")
    results = Parallel(n_jobs=workers)(
        delayed(_run_chunk)(spec, R, target, seed, shell, chunk, settings) for shell, chunk, R, target in tasks)
    samples = []
    for shell, R in enumerate(radii):
        shell_results = [r for (s, _, _, _), r in zip(tasks, results) if s == shell]
        samples.append(_assemble(spec, R, count, seed, shell_results))
        logger.debug(f"Shell R={R:g}: {len(samples[-1])} points")
    return samples


def sample_parametrized(spec: VarietySpec, R: float, count: int, seed: int, shell: int = 0,
                        settings: Optional[SamplerSettings] = None) -> ShellSample:
    if spec.mode != PARAMETRIZED:
        raise TropiscopeError("sample_parametrized needs a parametrized variety")
    settings = settings or SamplerSettings()
    results = [_run_chunk(spec, R, target, seed, shell, chunk, settings)
               for chunk, target in enumerate(_chunk_targets(count, settings.chunk_size))]
    return _assemble(spec, R, count, seed, results)


def sample_hypersurface(spec: VarietySpec, R: float, count: int, seed: int, shell: int = 0,
                        settings: Optional[SamplerSettings] = None) -> ShellSample:
    if not spec.is_hypersurface:
        raise TropiscopeError("sample_hypersurface needs one implicit equation")
    settings = settings or SamplerSettings()
    results = [_run_chunk(spec, R, target, seed, shell, chunk, settings)
               for chunk, target in enumerate(_chunk_targets(count, settings.chunk_size))]
    return _assemble(spec, R, count, seed, results)


def verify_sample(spec: VarietySpec, sample: ShellSample) -> np.ndarray:
    """Independent re-check of residual and band for every point"""
    with np.errstate(all="ignore"):
        radius = np.linalg.norm(np.log(np.abs(sample.points)), axis=1)
    in_band = np.abs(radius - sample.radius) <= sample.band + 1e-9
    if spec.mode == PARAMETRIZED:
        if sample.parameters is None:
            return in_band
        G, _ = _image(spec, sample.parameters)
        return in_band & np.all(np.abs(G - sample.points) <= 1e-9 * (1 + np.abs(G)), axis=1)
    residual, scale = hypersurface_residual(spec, spec.polynomial, sample.points)
    return in_band & (residual <= RESIDUAL_TOL * (1.0 + scale))


# Region sampling for figures

def _region_batch(spec: VarietySpec, bbox, projection, reach: float, size: int,
                  rng: np.random.Generator, settings: SamplerSettings):
    xmin, xmax, ymin, ymax = bbox
    a, b = projection
    n = spec.ambient
    if spec.mode == PARAMETRIZED:
        T = np.exp(rng.uniform(-reach, reach, size=(size, spec.params))
                   + 1j * rng.uniform(0.0, TWO_PI, size=(size, spec.params)))
        with np.errstate(all="ignore"):
            G, _ = _image(spec, T)
        return G, np.zeros(len(G)), T

    poly = spec.polynomial
    base = np.exp(rng.uniform(-reach, reach, size=(size, n)) + 1j * rng.uniform(0.0, TWO_PI, size=(size, n)))
    solved = np.where(rng.uniform(size=size) < 0.5, a, b)
    ranges = {a: (xmin, xmax), b: (ymin, ymax)}
    points, residuals = [], []
    for j, other in ((a, b), (b, a)):
        rows = np.flatnonzero(solved == j)
        if rows.size == 0:
            continue
        Z = base[rows]
        low, high = ranges[other]
        Z[:, other] = np.exp(rng.uniform(low, high, size=rows.size) + 1j * rng.uniform(0.0, TWO_PI, size=rows.size))
        if poly is not None:
            roots = _solve_polynomial(poly, Z, j)
        else:
            centres = np.tile(np.linspace(ranges[j][0], ranges[j][1], settings.circles), (rows.size, 1))
            roots = _solve_transcendental(spec, Z, j, reach, rng, settings, centres)
        r_idx, k_idx = np.nonzero(np.isfinite(roots))
        P = Z[r_idx].copy()
        P[:, j] = roots[r_idx, k_idx]
        P = P[np.all(P != 0, axis=1)]
        residual, scale = hypersurface_residual(spec, poly, P)
        ok = residual <= RESIDUAL_TOL * (1.0 + scale)
        points.append(P[ok])
        residuals.append(residual[ok])
    if not points:
        return np.zeros((0, n), dtype=complex), np.zeros(0), None
    return np.vstack(points), np.concatenate(residuals), None


def sample_region(spec: VarietySpec, bbox: Tuple[float, float, float, float], projection: Tuple[int, int],
                  count: int, seed: int, settings: Optional[SamplerSettings] = None) -> ShellSample:
    """Points of V whose projected Log image falls in bbox = (xmin, xmax, ymin, ymax)"""
    if spec.mode != PARAMETRIZED and not spec.is_hypersurface:
        raise TropiscopeError("region sampling supports parametrizations and single equations")
    settings = settings or SamplerSettings()
    rng = task_rng(seed, 0, 0)
    xmin, xmax, ymin, ymax = bbox
    a, b = projection
    reach = max(abs(xmin), abs(xmax), abs(ymin), abs(ymax)) + 1.0
    kept_points, kept_residuals, kept_params = [], [], []
    total, draws = 0, 0
    budget = count * settings.max_draws_per_point
    while total < count and draws < budget:
        G, residuals, params = _region_batch(spec, bbox, projection, reach, settings.batch_size, rng, settings)
        with np.errstate(all="ignore"):
            X = np.log(np.abs(G))
        ok = (np.all(np.isfinite(X), axis=1) & (X[:, a] >= xmin) & (X[:, a] <= xmax)
              & (X[:, b] >= ymin) & (X[:, b] <= ymax))
        kept_points.append(G[ok])
        kept_residuals.append(residuals[ok])
        if params is not None:
            kept_params.append(params[ok])
        total += int(ok.sum())
        draws += settings.batch_size
    if total == 0:
        raise ShellUnreachableError(f"no point of '{spec}' has its Log image inside {bbox}")
    points = np.vstack(kept_points)[:count]
    residuals = np.concatenate(kept_residuals)[:count]
    params = np.vstack(kept_params)[:count] if kept_params else None
    logger.info(f"Region sample of '{spec}': {len(points)} points from {draws} draws")
    return ShellSample(float("nan"), float("inf"), points, residuals, seed, params)
