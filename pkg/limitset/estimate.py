"""
Limit set estimation for Tropiscope
schedule -> sampling -> cloud -> clustering -> classification
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.config import RunConfig, ToleranceConfig
from limitset.classify import CellClassifier, CellEstimate, ClassifierSettings
from limitset.cloud import DirectionCloud, cluster_directions, default_cluster_eps, direction_cloud
from polyhedra.spherical import SphericalComplex
from sampling.sampler import sample_shells
from sampling.variety import ShellSample, VarietySpec, shell_schedule

logger = logging.getLogger(__name__)


@dataclass
class LimitSetEstimate:
    complex: SphericalComplex
    cloud: DirectionCloud
    cells: List[CellEstimate]
    samples: List[ShellSample]
    eps: float
    components_per_shell: List[int] = field(default_factory=list)

    @property
    def shells(self) -> int:
        return len(self.samples)

    @property
    def shell_stable(self) -> bool:
        """Same number of components at the two outermost shells"""
        window = self.components_per_shell[-2:]
        return len(window) == 2 and window[0] == window[1]

    def to_json(self) -> Dict:
        data = self.complex.to_json()
        data["cells"] = [c.to_dict() for c in self.cells]
        data["ambient"] = self.complex.ambient
        data["eps"] = self.eps
        data["shells"] = [{"radius": s.radius, "points": len(s)} for s in self.samples]
        data["components_per_shell"] = self.components_per_shell
        return data


def classifier_settings(tolerances: ToleranceConfig) -> ClassifierSettings:
    return ClassifierSettings(
        eps_point=tolerances.eps_point,
        tol_arc=tolerances.tol_arc,
        vertex_q=tolerances.vertex_q,
        vertex_tol=tolerances.vertex_tol,
        arc_q=tolerances.arc_q,
        arc_tol=tolerances.arc_tol,
    )


def estimate_from_samples(samples: Sequence[ShellSample], tolerances: Optional[ToleranceConfig] = None,
                          cutoff: float = 0.0) -> LimitSetEstimate:
    """Cluster and classify the outermost shell of already sampled points"""
    tolerances = tolerances or ToleranceConfig()
    samples = sorted(samples, key=lambda s: s.radius)
    cloud = direction_cloud(samples, cutoff)
    eps = tolerances.eps_cluster or default_cluster_eps(cloud, tolerances.eps_point)

    per_shell = []
    for R in cloud.shell_radii()[-2:]:
        per_shell.append(len(cluster_directions(cloud.restrict(cloud.radii == R), eps)))

    outer_mask = cloud.radii == max(cloud.radii)
    outer_index = np.flatnonzero(outer_mask)
    components = cluster_directions(cloud.restrict(outer_mask), eps)
    classifier = CellClassifier(classifier_settings(tolerances))
    cells = [classifier.classify(cloud, outer_index[c], eps) for c in components]

    cells.sort(key=lambda e: (e.cell.dim, e.cell.samples))
    complex_ = SphericalComplex(cloud.ambient, [e.cell for e in cells])
    logger.info(f"Estimated {len(cells)} cells at eps={eps:.3g}: "
                f"{sum(e.cell.kind == 'vertex' for e in cells)} vertices, "
                f"{sum(e.cell.kind == 'arc' for e in cells)} arcs")
    return LimitSetEstimate(complex_, cloud, cells, list(samples), eps, per_shell)


def estimate_limit_set(spec: VarietySpec, config: RunConfig,
                       samples: Optional[Sequence[ShellSample]] = None) -> LimitSetEstimate:
    """Sample the configured shells of spec and estimate its logarithmic limit set"""
    if samples is None:
        s = config.shells
        radii = shell_schedule(s.r_min, s.r_max, s.shells)
        logger.info(f"Sampling {s.points} points on shells {[round(r, 3) for r in radii]} of '{spec}'")
        samples = sample_shells(spec, radii, s.points, config.seed, workers=s.workers)
    return estimate_from_samples(samples, config.tolerances, config.shells.cutoff)
