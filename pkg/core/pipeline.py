"""
Main Tropiscope pipeline
Orchestrates sampling, limit set estimation, phases, figures and certificates
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from algebra.expr import parse_expression
from core.config import RunConfig
from core.exceptions import (ConfigError, DegenerateScalesError, DimensionTooLargeError,
                             NoPointsNearDirectionError, TropiscopeError)
from limitset.certificate import NewtonCertificate, certify_newton_bound
from limitset.estimate import LimitSetEstimate, estimate_limit_set
from limitset.verdict import Verdict, algebraicity_verdict
from phase.coamoeba import closure_dimension, detect_geodesic_circles, phase_cloud
from polyhedra.fan import tropical_limit_set
from polyhedra.spherical import VERTEX, SphericalComplex, balance_check
from raster.figures import render_ppm, render_svg
from raster.raster import (Raster, area_profile, complement_components, convexity_violations,
                           rasterize_amoeba, rho_disk_image)
from sampling.probes import ends_at_direction, genericity_probe
from sampling.sampler import sample_region
from sampling.variety import PARAMETRIZED, VarietySpec, parse_variety, select_component
from utils.helpers import write_json, write_text

DEFAULT_BBOX = (-5.0, 5.0, -5.0, 5.0)


class Tropiscope:
    """Runs one configured study and writes its artifacts"""

    def __init__(self, config: RunConfig):
        self.config = config.validate()
        self.logger = logging.getLogger(__name__)
        self.out_dir = Path(config.output.out_dir)
        self._spec: Optional[VarietySpec] = None
        self._estimate: Optional[LimitSetEstimate] = None

    @property
    def spec(self) -> VarietySpec:
        if self._spec is None:
            v = self.config.variety
            spec = parse_variety(self.config.expression_text(), v.mode, v.n, v.k, v.params)
            self._spec = select_component(spec, v.component)
            self.logger.info(f"Variety '{self._spec}' in {self._spec.ambient} variables, k={self._spec.k}")
        return self._spec

    def estimate(self) -> LimitSetEstimate:
        if self._estimate is None:
            self._estimate = estimate_limit_set(self.spec, self.config)
        return self._estimate

    def oracle(self) -> Optional[SphericalComplex]:
        """Exact limit set when the variety is one Laurent polynomial equation"""
        polynomial = self.spec.polynomial
        if polynomial is None:
            return None
        try:
            return tropical_limit_set(polynomial)
        except DimensionTooLargeError as e:
            self.logger.warning(f"No exact limit set: {e}")
            return None

    def _write(self, name: str, data: Any) -> Path:
        path = write_json(self.out_dir / name, data)
        self.logger.info(f"Wrote {path}")
        return path

    def echo_config(self):
        self.config.save(str(self.out_dir / "config.json"), echo=True)

    # Commands

    def classify(self) -> Verdict:
        estimate = self.estimate()
        t = self.config.tolerances
        verdict = algebraicity_verdict(estimate, self.spec.k, self.oracle(), t.oracle_tol, t.oracle_cloud_tol)
        self._write("verdict.json", verdict.to_dict())
        self.echo_config()
        return verdict

    def limitset(self) -> Dict[str, Any]:
        estimate = self.estimate()
        report: Dict[str, Any] = {"estimate": estimate.to_json()}
        oracle = self.oracle()
        if oracle is not None:
            report["oracle"] = oracle.to_json()
            report["oracle_balance"] = balance_check(oracle).to_dict()
        report["genericity"] = genericity_probe(self.spec, estimate.samples[-1]).to_dict()
        report["ends"] = self._ends(estimate)
        self._write("limitset.json", report)
        self.echo_config()
        return report

    def _ends(self, estimate: LimitSetEstimate) -> List[Dict[str, Any]]:
        if len(estimate.samples) < 3:
            return []
        ends = []
        for cell in estimate.complex.cells:
            if cell.kind != VERTEX:
                continue
            direction = cell.representatives()[0]
            try:
                report = ends_at_direction(estimate.samples, direction, self.config.tolerances.tentacle_eps)
            except NoPointsNearDirectionError as e:
                self.logger.warning(str(e))
                continue
            ends.append(dict(report.to_dict(), direction=direction.tolist()))
        return ends

    def phase(self) -> Dict[str, Any]:
        estimate = self.estimate()
        t = self.config.tolerances
        cutoff = self.config.shells.cutoff
        cloud = phase_cloud(estimate.samples, cutoff)
        report: Dict[str, Any] = {"points": len(cloud)}
        report["closure_dimension"] = self._closure(cloud)
        circles = detect_geodesic_circles(cloud, t.circle_q, t.circle_tol, t.circle_coverage)
        report["circles"] = [c.to_dict() for c in circles]

        tentacles = []
        for cell in estimate.complex.cells:
            if cell.kind != VERTEX:
                continue
            direction = cell.representatives()[0]
            try:
                local = phase_cloud(estimate.samples, cutoff, direction, t.tentacle_eps)
            except TropiscopeError as e:
                self.logger.warning(f"No tentacle cloud at {direction.tolist()}: {e}")
                continue
            tentacles.append({
                "direction": direction.tolist(),
                "points": len(local),
                "closure_dimension": self._closure(local),
                "circles": [c.to_dict() for c in detect_geodesic_circles(local, t.circle_q, t.circle_tol,
                                                                          t.circle_coverage)],
            })
        report["tentacles"] = tentacles
        self._write("phase.json", report)
        write_text(self.out_dir / "phases.txt", cloud.to_lines())
        self.echo_config()
        return report

    def _closure(self, cloud) -> Optional[float]:
        try:
            return closure_dimension(cloud)
        except DegenerateScalesError as e:
            self.logger.warning(f"Closure dimension skipped: {e}")
            return None

    def render(self) -> Dict[str, Any]:
        spec = self.spec
        r = self.config.render
        bbox = tuple(r.bbox) if r.bbox else DEFAULT_BBOX
        projection = tuple(r.projection)
        source = str(spec)
        region_sample = sample_region(spec, bbox, (projection[0] - 1, projection[1] - 1), r.region_points,
                                      self.config.seed)
        amoeba = rasterize_amoeba([region_sample], bbox, r.resolution, projection, provenance=source)
        disk = rho_disk_image(self.estimate().samples + [region_sample], r.resolution, projection, provenance=source)
        written = self._figures("amoeba", amoeba) + self._figures("rho", disk)

        report: Dict[str, Any] = {"figures": written, "bbox": list(bbox), "resolution": r.resolution}
        if spec.ambient == 2:
            regions = complement_components(amoeba)
            report["complement"] = [
                dict(region.to_dict(), convexity_violations=convexity_violations(region, amoeba, seed=self.config.seed))
                for region in regions
            ]
        if spec.ambient == 2 and spec.k == 1:
            reach = min(abs(v) for v in bbox)
            radii = [radius for radius in r.area_radii if radius <= reach]
            if len(radii) >= 2:
                profile = area_profile([region_sample], radii, r.resolution, projection)
                self._write("area.json", profile.to_dict())
                report["area_status"] = profile.status
            else:
                self.logger.warning(f"Area profile needs two radii inside the box {list(bbox)}")
        self._write("figures.json", report)
        self.echo_config()
        return report

    def _figures(self, stem: str, raster: Raster) -> List[str]:
        written = []
        if "svg" in self.config.render.formats:
            written.append(render_svg(raster, self.out_dir / f"{stem}.svg").name)
        if "ppm" in self.config.render.formats:
            written.append(render_ppm(raster, self.out_dir / f"{stem}.ppm").name)
        return written

    def certify(self) -> NewtonCertificate:
        c = self.config.certify
        if c.slopes:
            n = len(c.slopes[0])
            f = parse_expression(self.config.expression_text(), n)
            estimate = c.slopes
        else:
            if self.spec.mode == PARAMETRIZED or not self.spec.is_hypersurface:
                raise ConfigError("certify needs a single equation")
            f = self.spec.expressions[0]
            estimate = self.estimate().complex
        certificate = certify_newton_bound(f, estimate, c.degree, c.base_degree)
        self._write("certificate.json", certificate.to_dict())
        self.echo_config()
        return certificate
