"""
Amoeba rasters for Tropiscope
Occupancy grids of Log images, their complement regions and convexity checks
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from core.exceptions import EmptyBoxError, EmptySampleError
from geometry.maps import rho
from sampling.variety import ShellSample

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 16
CONVEXITY_PAIRS = 10_000
CONVEXITY_MARGIN = 3
MIN_ENDPOINTS = 16
PAIR_CHUNK = 500
BOUNDED_GROWTH = 0.1

BBox = Tuple[float, float, float, float]
Resolution = Union[int, Tuple[int, int]]


@dataclass
class Raster:
    """Occupancy of a w x h grid over bbox; mask row 0 is the bottom row (y = ymin)"""
    bbox: BBox
    mask: np.ndarray
    provenance: str = ""
    projection: Tuple[int, int] = (1, 2)
    disk: bool = False

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def cell_area(self) -> float:
        xmin, xmax, ymin, ymax = self.bbox
        return (xmax - xmin) * (ymax - ymin) / (self.width * self.height)

    @property
    def occupied_area(self) -> float:
        return float(np.count_nonzero(self.mask)) * self.cell_area

    def cell_centres(self) -> Tuple[np.ndarray, np.ndarray]:
        xmin, xmax, ymin, ymax = self.bbox
        xs = xmin + (np.arange(self.width) + 0.5) * (xmax - xmin) / self.width
        ys = ymin + (np.arange(self.height) + 0.5) * (ymax - ymin) / self.height
        return xs, ys

    def merged(self, other: "Raster") -> "Raster":
        if other.bbox != self.bbox or other.mask.shape != self.mask.shape:
            raise ValueError("rasters must share box and resolution")
        return Raster(self.bbox, self.mask | other.mask, self.provenance, self.projection, self.disk)


def _grid_shape(resolution: Resolution) -> Tuple[int, int]:
    w, h = (resolution, resolution) if isinstance(resolution, int) else resolution
    if w < MIN_RESOLUTION or h < MIN_RESOLUTION:
        raise ValueError(f"raster resolution must be at least {MIN_RESOLUTION} x {MIN_RESOLUTION}")
    return int(w), int(h)


def _check_box(bbox: BBox) -> BBox:
    xmin, xmax, ymin, ymax = (float(v) for v in bbox)
    if not (np.all(np.isfinite([xmin, xmax, ymin, ymax])) and xmin < xmax and ymin < ymax):
        raise EmptyBoxError(f"degenerate bounding box {bbox}")
    return xmin, xmax, ymin, ymax


def points_to_mask(P: np.ndarray, bbox: BBox, shape: Tuple[int, int]) -> np.ndarray:
    """Mark every cell containing at least one of the planar points P"""
    w, h = shape
    xmin, xmax, ymin, ymax = bbox
    mask = np.zeros((h, w), dtype=bool)
    if len(P) == 0:
        return mask
    inside = (P[:, 0] >= xmin) & (P[:, 0] <= xmax) & (P[:, 1] >= ymin) & (P[:, 1] <= ymax)
    P = P[inside]
    ix = np.minimum(((P[:, 0] - xmin) / (xmax - xmin) * w).astype(int), w - 1)
    iy = np.minimum(((P[:, 1] - ymin) / (ymax - ymin) * h).astype(int), h - 1)
    mask[iy, ix] = True
    return mask


def projected_log_points(samples: Sequence[ShellSample], projection: Tuple[int, int]) -> np.ndarray:
    if isinstance(samples, ShellSample):
        samples = [samples]
    if not samples or sum(len(s) for s in samples) == 0:
        raise EmptySampleError("rasterizing needs sample points")
    X = np.vstack([s.log_points() for s in samples if len(s)])
    i, j = projection
    if not (1 <= i <= X.shape[1] and 1 <= j <= X.shape[1]) or i == j:
        raise ValueError(f"projection {projection} does not name two of {X.shape[1]} coordinates")
    return X[:, [i - 1, j - 1]]


def rasterize_amoeba(samples, bbox: BBox, resolution: Resolution = 512,
                     projection: Tuple[int, int] = (1, 2), provenance: str = "") -> Raster:
    """Cells containing at least one projected Log point of the samples

    Each sample is rasterized on its own and the masks are OR-merged in sample order.
    """
    bbox = _check_box(bbox)
    shape = _grid_shape(resolution)
    if isinstance(samples, ShellSample):
        samples = [samples]
    if not samples or sum(len(s) for s in samples) == 0:
        raise EmptySampleError("rasterizing needs sample points")
    rasters = [Raster(bbox, points_to_mask(projected_log_points(s, projection), bbox, shape), provenance,
                      tuple(projection)) for s in samples if len(s)]
    raster = reduce(Raster.merged, rasters)
    logger.debug(f"Rasterized {len(rasters)} samples into {np.count_nonzero(raster.mask)} of {raster.mask.size} cells")
    return raster


def rho_disk_image(samples, resolution: Resolution = 512, projection: Tuple[int, int] = (1, 2),
                   provenance: str = "") -> Raster:
    """Raster over [-1, 1]^2 of the projected images of Log points under rho"""
    if isinstance(samples, ShellSample):
        samples = [samples]
    if not samples or sum(len(s) for s in samples) == 0:
        raise EmptySampleError("rasterizing needs sample points")
    X = rho(np.vstack([s.log_points() for s in samples if len(s)]))
    i, j = projection
    P = X[:, [i - 1, j - 1]]
    mask = points_to_mask(P, (-1.0, 1.0, -1.0, 1.0), _grid_shape(resolution))
    return Raster((-1.0, 1.0, -1.0, 1.0), mask, provenance, tuple(projection), disk=True)


def membership_raster(inside: Callable[[np.ndarray, np.ndarray], np.ndarray], bbox: BBox,
                      resolution: Resolution = 512, provenance: str = "") -> Raster:
    """Raster of the cells whose centre satisfies an analytic membership test"""
    bbox = _check_box(bbox)
    w, h = _grid_shape(resolution)
    raster = Raster(bbox, np.zeros((h, w), dtype=bool), provenance)
    xs, ys = raster.cell_centres()
    X, Y = np.meshgrid(xs, ys)
    raster.mask = np.asarray(inside(X, Y), dtype=bool)
    return raster


def iou(first: Raster, second: Raster) -> float:
    union = np.count_nonzero(first.mask | second.mask)
    if union == 0:
        return 1.0
    return np.count_nonzero(first.mask & second.mask) / union


@dataclass
class Region:
    """A 4-connected component of unoccupied cells"""
    label: int
    mask: np.ndarray = field(repr=False)
    cells: int = 0
    unbounded: bool = False

    def to_dict(self) -> Dict:
        return {"label": self.label, "cells": self.cells, "unbounded": self.unbounded}


def complement_components(r: Raster) -> List[Region]:
    """Regions of the complement; those touching the raster border are flagged unbounded"""
    labels, count = ndimage.label(~r.mask, structure=ndimage.generate_binary_structure(2, 1))
    border = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    regions = []
    for label in range(1, count + 1):
        mask = labels == label
        regions.append(Region(label, mask, int(np.count_nonzero(mask)), bool(label in border)))
    logger.debug(f"{count} complement regions, {sum(r.unbounded for r in regions)} unbounded")
    return regions


def convexity_violations(region: Region, r: Raster, pairs: int = CONVEXITY_PAIRS, seed: int = 0) -> int:
    """Random pairs of region cells whose connecting segment meets an occupied cell

    Endpoints are drawn from cells at least CONVEXITY_MARGIN cells away from any
    occupied cell, so a straight segment through a convex region never grazes the
    rasterized boundary. Regions too thin to hold MIN_ENDPOINTS such cells use the
    largest smaller margin that does, down to every cell of the region.
    """
    clearance = ndimage.distance_transform_cdt(~r.mask, metric="chessboard")
    for margin in range(CONVEXITY_MARGIN, 0, -1):
        cells = np.argwhere(region.mask & (clearance >= margin))
        if len(cells) >= MIN_ENDPOINTS:
            break
    if margin < CONVEXITY_MARGIN:
        logger.debug(f"Region {region.label} is thin; convexity endpoints use margin {margin}")
    if len(cells) < 2:
        return 0
    rng = np.random.default_rng(seed)
    first = cells[rng.integers(len(cells), size=pairs)]
    second = cells[rng.integers(len(cells), size=pairs)]

    violations = 0
    for start in range(0, pairs, PAIR_CHUNK):
        a = first[start:start + PAIR_CHUNK].astype(float)
        b = second[start:start + PAIR_CHUNK].astype(float)
        steps = int(2 * np.max(np.abs(b - a)) + 2)
        t = np.linspace(0.0, 1.0, steps)[None, :, None]
        path = np.rint(a[:, None, :] + t * (b - a)[:, None, :]).astype(int)
        hit = r.mask[path[..., 0], path[..., 1]]
        violations += int(np.count_nonzero(np.any(hit, axis=1)))
    return violations


@dataclass
class AreaProfile:
    radii: List[float]
    areas: List[float]
    status: str

    def to_dict(self) -> Dict:
        return {"radii": self.radii, "areas": self.areas, "status": self.status}


def area_profile(samples, radii: Sequence[float], resolution: int = 512,
                 projection: Tuple[int, int] = (1, 2)) -> AreaProfile:
    """Occupied area inside growing boxes [-r, r]^2 at one fixed cell size

    The profile is "bounded" when the last step adds less than 10% of the last area.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 2 or radii[0] <= 0:
        raise ValueError("area profile needs at least two positive radii")
    P = projected_log_points(samples, projection)
    cell = 2 * radii[-1] / resolution
    areas = []
    for radius in radii:
        cells = max(MIN_RESOLUTION, int(round(2 * radius / cell)))
        mask = points_to_mask(P, (-radius, radius, -radius, radius), (cells, cells))
        areas.append(float(np.count_nonzero(mask)) * (2 * radius / cells) ** 2)
    growth = areas[-1] - areas[-2]
    status = "bounded" if areas[-1] > 0 and growth < BOUNDED_GROWTH * areas[-1] else "growing"
    logger.info(f"Amoeba area profile {[round(a, 3) for a in areas]}: {status}")
    return AreaProfile(radii, areas, status)
