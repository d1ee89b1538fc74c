"""
Shared fixtures for the Tropiscope test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sampling.variety import ShellSample, shell_band


def shell_from_log(X: np.ndarray, radius: float, seed: int = 0, phases=None) -> ShellSample:
    """A shell sample whose points have the given Log coordinates"""
    X = np.asarray(X, dtype=float)
    if phases is None:
        phases = np.zeros_like(X)
    points = np.exp(X + 1j * phases)
    return ShellSample(radius, shell_band(radius), points, np.zeros(len(points)), seed)


def tentacle_shells(directions, radii=(15.0, 30.0, 60.0), per_tentacle=50, spread=0.2, seed=0):
    """Synthetic shells: each direction gets a tentacle of Log points R*d + bounded offset"""
    rng = np.random.default_rng(seed)
    shells = []
    for R in radii:
        blocks = []
        for d in directions:
            d = np.asarray(d, dtype=float)
            d = d / np.linalg.norm(d)
            blocks.append(R * d + rng.normal(scale=spread, size=(per_tentacle, len(d))))
        shells.append(shell_from_log(np.vstack(blocks), R, seed))
    return shells


@pytest.fixture
def line_grid_sample() -> ShellSample:
    """Dense analytic sample of 1 + z1 + z2 = 0 with Log image covering [-5.5, 5.5]^2"""
    xs = np.linspace(-5.5, 5.5, 600)
    phis = (np.arange(400) + 0.5) * 2 * np.pi / 400
    w = np.exp(xs[:, None] + 1j * phis[None, :]).reshape(-1)
    from_z1 = np.column_stack([w, -1 - w])
    from_z2 = np.column_stack([-1 - w, w])
    points = np.vstack([from_z1, from_z2])
    points = points[np.all(np.abs(points) > 1e-300, axis=1)]
    return ShellSample(float("nan"), float("inf"), points, np.zeros(len(points)), 0)


@pytest.fixture
def line_shells():
    return tentacle_shells([(-1, 0), (0, -1), (1, 1)])
