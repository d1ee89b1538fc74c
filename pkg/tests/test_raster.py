"""
Tests for amoeba rasters, complement regions and figure output
"""

import xml.etree.ElementTree as ET

import numpy as np
import pytest
from PIL import Image

from conftest import shell_from_log
from core.exceptions import EmptyBoxError, EmptySampleError
from raster.figures import FILL_RGB, SVG_NS, horizontal_runs, render_ppm, render_svg, svg_document
from raster.raster import (Raster, area_profile, complement_components, convexity_violations, iou,
                           membership_raster, rasterize_amoeba, rho_disk_image)
from sampling.sampler import sample_region
from sampling.variety import PARAMETRIZED, ShellSample, parse_variety

BOX = (-5.0, 5.0, -5.0, 5.0)


def annulus() -> Raster:
    ys, xs = np.mgrid[0:64, 0:64]
    distance = np.hypot(xs - 31.5, ys - 31.5)
    return Raster((0.0, 1.0, 0.0, 1.0), (distance >= 10) & (distance <= 14))


class TestAmoeba:
    def test_line_complement_has_three_convex_regions(self, line_grid_sample):
        raster = rasterize_amoeba(line_grid_sample, BOX, 128)
        regions = complement_components(raster)
        assert len(regions) == 3
        assert all(region.unbounded for region in regions)
        assert [convexity_violations(region, raster) for region in regions] == [0, 0, 0]

    def test_annulus_has_a_bounded_region_and_a_nonconvex_one(self):
        raster = annulus()
        regions = sorted(complement_components(raster), key=lambda region: region.unbounded)
        assert [region.unbounded for region in regions] == [False, True]
        assert convexity_violations(regions[0], raster) == 0
        assert convexity_violations(regions[1], raster) > 0

    def test_thin_l_shaped_hole_is_not_convex(self):
        mask = np.ones((64, 64), dtype=bool)
        mask[10:14, 10:51] = False
        mask[10:51, 10:14] = False
        raster = Raster((0.0, 1.0, 0.0, 1.0), mask)
        (region,) = complement_components(raster)
        assert not region.unbounded
        assert convexity_violations(region, raster) > 0

    def test_thin_straight_hole_is_convex(self):
        mask = np.ones((64, 64), dtype=bool)
        mask[10:14, 5:59] = False
        raster = Raster((0.0, 1.0, 0.0, 1.0), mask)
        (region,) = complement_components(raster)
        assert convexity_violations(region, raster) == 0

    def test_line_area_is_bounded(self, line_grid_sample):
        profile = area_profile(line_grid_sample, [1.0, 2.0, 3.0, 4.0, 5.0])
        assert profile.status == "bounded"
        assert profile.areas[-1] > profile.areas[0]

    def test_filled_plane_area_grows(self):
        X = np.random.default_rng(0).uniform(-6.0, 6.0, (200000, 2))
        profile = area_profile(shell_from_log(X, float("nan")), [1.0, 2.0, 3.0, 4.0, 5.0])
        assert profile.status == "growing"

    def test_rho_disk_stays_in_the_unit_disk(self, line_grid_sample):
        raster = rho_disk_image(line_grid_sample, 64)
        assert raster.disk
        xs, ys = raster.cell_centres()
        X, Y = np.meshgrid(xs, ys)
        assert not np.any(raster.mask & (np.hypot(X, Y) > 1.0 + 2.0 / 64))

    def test_membership_raster_and_iou(self):
        disk = membership_raster(lambda x, y: x ** 2 + y ** 2 <= 1.0, (-2.0, 2.0, -2.0, 2.0), 64)
        assert iou(disk, disk) == 1.0
        assert disk.occupied_area == pytest.approx(np.pi, rel=0.05)

    def test_exponential_curve_amoeba_matches_its_analytic_region(self):
        spec = parse_variety("(t, exp(t))", PARAMETRIZED, None, None)
        box = (-2.0, 2.0, -3.0, 3.0)
        sample = sample_region(spec, box, (0, 1), 60000, seed=3)
        sampled = rasterize_amoeba(sample, box, 64)
        analytic = membership_raster(lambda x, y: np.abs(y) <= np.exp(x), box, 64)
        assert iou(sampled, analytic) >= 0.9

    def test_samples_are_rasterized_separately_and_merged(self, line_grid_sample):
        half = len(line_grid_sample) // 2
        first = ShellSample(float("nan"), float("inf"), line_grid_sample.points[:half], np.zeros(half), 0)
        second = ShellSample(float("nan"), float("inf"), line_grid_sample.points[half:],
                             np.zeros(len(line_grid_sample) - half), 0)
        both = rasterize_amoeba([first, second], BOX, 64)
        expected = rasterize_amoeba(first, BOX, 64).merged(rasterize_amoeba(second, BOX, 64))
        assert np.array_equal(both.mask, expected.mask)
        assert np.array_equal(both.mask, rasterize_amoeba(line_grid_sample, BOX, 64).mask)
        with pytest.raises(ValueError):
            both.merged(rasterize_amoeba(first, (-4.0, 4.0, -4.0, 4.0), 64))

    def test_empty_box(self, line_grid_sample):
        with pytest.raises(EmptyBoxError):
            rasterize_amoeba(line_grid_sample, (1.0, 1.0, -5.0, 5.0), 64)

    def test_resolution_too_small(self, line_grid_sample):
        with pytest.raises(ValueError):
            rasterize_amoeba(line_grid_sample, BOX, 8)

    def test_empty_sample(self):
        empty = ShellSample(10.0, 0.5, np.zeros((0, 2), dtype=complex), np.zeros(0), 0)
        with pytest.raises(EmptySampleError):
            rasterize_amoeba(empty, BOX, 64)


class TestFigures:
    def test_checkerboard_runs(self):
        mask = (np.add.outer(np.arange(16), np.arange(16)) % 2 == 0)
        raster = Raster((0.0, 1.0, 0.0, 1.0), mask)
        assert len(horizontal_runs(mask)) == 128
        assert len(list(svg_document(raster).iter("rect"))) == 128

    def test_bottom_raster_row_is_the_last_svg_row(self, tmp_path):
        mask = np.zeros((16, 16), dtype=bool)
        mask[0, 0] = True
        path = render_svg(Raster((0.0, 1.0, 0.0, 1.0), mask), tmp_path / "corner.svg")
        rect = ET.parse(path).getroot().find(f".//{{{SVG_NS}}}rect")
        assert (rect.get("x"), rect.get("y")) == ("0", "15")

    def test_disk_figure_has_a_circle(self, tmp_path, line_grid_sample):
        path = render_svg(rho_disk_image(line_grid_sample, 32), tmp_path / "rho.svg")
        assert ET.parse(path).getroot().find(f"{{{SVG_NS}}}circle") is not None

    def test_svg_is_deterministic(self, tmp_path):
        raster = annulus()
        first = render_svg(raster, tmp_path / "a.svg").read_bytes()
        second = render_svg(raster, tmp_path / "b.svg").read_bytes()
        assert first == second

    def test_ppm_orientation(self, tmp_path):
        mask = np.zeros((16, 24), dtype=bool)
        mask[0, 0] = True
        path = render_ppm(Raster((0.0, 1.0, 0.0, 1.0), mask), tmp_path / "corner.ppm")
        assert path.read_bytes()[:2] == b"P6"
        with Image.open(path) as image:
            assert image.size == (24, 16)
            assert image.getpixel((0, 15)) == FILL_RGB
            assert image.getpixel((0, 0)) == (255, 255, 255)

