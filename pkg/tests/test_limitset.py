"""
Tests for direction clouds, cell classification, verdicts and Newton bound certificates
"""

import numpy as np
import pytest

from algebra.expr import parse_expression
from algebra.laurent import to_laurent
from conftest import shell_from_log, tentacle_shells
from core.exceptions import DegenerateScalesError, EmptyAfterCutoffError
from geometry.slopes import RationalSlope
from limitset.certificate import certify_newton_bound
from limitset.classify import box_counting_dim, great_circle_fit
from limitset.cloud import cluster_directions, default_cluster_eps, direction_cloud
from limitset.estimate import estimate_from_samples
from limitset.verdict import ALGEBRAIC_CONSISTENT, INCONCLUSIVE, NOT_ALGEBRAIC, algebraicity_verdict
from polyhedra.fan import tropical_limit_set
from sampling.sampler import sample_shells
from sampling.variety import IMPLICIT, parse_variety


def vertex_slopes(estimate):
    return sorted(tuple(c.cell.slopes[0].vector) for c in estimate.cells if c.cell.kind == "vertex")


class TestDirectionCloud:
    def test_directions_are_unit_vectors(self, line_shells):
        cloud = direction_cloud(line_shells)
        assert len(cloud) == 450
        assert np.allclose(np.linalg.norm(cloud.directions, axis=1), 1.0)
        assert cloud.shell_radii() == [15.0, 30.0, 60.0]

    def test_cutoff_removes_inner_points(self, line_shells):
        cloud = direction_cloud(line_shells, cutoff=40.0)
        assert cloud.shell_radii() == [60.0]

    def test_cutoff_beyond_every_point(self, line_shells):
        with pytest.raises(EmptyAfterCutoffError):
            direction_cloud(line_shells, cutoff=1000.0)

    def test_two_groups_two_components(self):
        shells = tentacle_shells([(1, 0), (0, 1)], radii=(50.0,), spread=0.1)
        cloud = direction_cloud(shells)
        components = cluster_directions(cloud, 0.05)
        assert len(components) == 2
        assert sorted(len(c) for c in components) == [50, 50]

    def test_clustering_is_order_independent(self):
        shells = tentacle_shells([(1, 0), (0, 1), (-1, -1)], radii=(50.0,), spread=0.1)
        cloud = direction_cloud(shells)
        permuted = cloud.restrict(np.random.default_rng(3).permutation(len(cloud)))
        first = [sorted(map(tuple, cloud.directions[c])) for c in cluster_directions(cloud, 0.05)]
        second = [sorted(map(tuple, permuted.directions[c])) for c in cluster_directions(permuted, 0.05)]
        assert first == second

    def test_eps_must_be_positive(self, line_shells):
        with pytest.raises(ValueError):
            cluster_directions(direction_cloud(line_shells), 0.0)

    def test_default_eps_is_clipped(self, line_shells):
        eps = default_cluster_eps(direction_cloud(line_shells), 2e-2)
        assert 1e-2 <= eps <= 0.2


class TestBoxCounting:
    def test_finite_set_has_dimension_zero(self):
        points = np.tile(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), (40, 1))
        assert box_counting_dim(points, [0.01, 0.02, 0.05, 0.1]) == pytest.approx(0.0, abs=1e-9)

    def test_circle_has_dimension_one(self):
        theta = np.linspace(0.0, 2 * np.pi, 10000, endpoint=False)
        points = np.column_stack([np.cos(theta), np.sin(theta)])
        assert box_counting_dim(points, [0.01, 0.02, 0.03, 0.05]) == pytest.approx(1.0, abs=0.15)

    def test_square_has_dimension_two(self):
        x = np.linspace(0.0, 1.5, 300)
        points = np.array(np.meshgrid(x, x)).reshape(2, -1).T
        assert box_counting_dim(points, [0.02, 0.04, 0.08, 0.16]) == pytest.approx(2.0, abs=0.25)

    def test_too_few_points(self):
        with pytest.raises(DegenerateScalesError):
            box_counting_dim(np.zeros((50, 2)), [0.1, 0.2, 0.3])

    def test_too_few_scales(self):
        with pytest.raises(DegenerateScalesError):
            box_counting_dim(np.random.default_rng(0).uniform(size=(500, 2)), [0.1, 0.1, 0.2])


def test_great_circle_fit_of_a_planar_arc():
    theta = np.linspace(0.0, 1.0, 50)
    points = np.column_stack([np.cos(theta), np.sin(theta), np.zeros(50)])
    plane, residual = great_circle_fit(points)
    assert np.max(residual) < 1e-9
    assert abs(plane[0, 2]) < 1e-9 and abs(plane[1, 2]) < 1e-9


class TestEstimate:
    def test_line_tentacles_give_three_rational_vertices(self, line_shells):
        estimate = estimate_from_samples(line_shells)
        assert [c.cell.kind for c in estimate.cells] == ["vertex"] * 3
        assert vertex_slopes(estimate) == [(-1, 0), (0, -1), (1, 1)]
        assert estimate.shell_stable

    def test_line_is_algebraic_consistent(self, line_shells):
        verdict = algebraicity_verdict(estimate_from_samples(line_shells), 1)
        assert verdict.decision == ALGEBRAIC_CONSISTENT
        assert verdict.dim_estimate == 0
        assert verdict.balance["balanced"]

    def test_agrees_with_the_exact_limit_set(self, line_shells):
        oracle = tropical_limit_set(to_laurent(parse_expression("1 + z1 + z2", 2)))
        verdict = algebraicity_verdict(estimate_from_samples(line_shells), 1, oracle)
        assert verdict.diagnostics["oracle"]["agrees"]
        assert verdict.decision == ALGEBRAIC_CONSISTENT

    def test_persistent_irrational_direction(self):
        shells = tentacle_shells([(-1, 0), (0, -1), (1, np.pi)])
        estimate = estimate_from_samples(shells)
        irrational = [c for c in estimate.cells if c.cell.kind == "vertex" and not c.cell.rational]
        assert len(irrational) == 1
        assert irrational[0].persistent_irrational
        assert algebraicity_verdict(estimate, 1).decision == NOT_ALGEBRAIC

    def test_unbalanced_directions_are_inconclusive(self):
        shells = tentacle_shells([(1, 0), (0, 1)])
        verdict = algebraicity_verdict(estimate_from_samples(shells), 1)
        assert verdict.decision == INCONCLUSIVE
        assert any("balanced" in r for r in verdict.diagnostics["reasons"])

    def test_two_shells_are_inconclusive(self):
        shells = tentacle_shells([(-1, 0), (0, -1), (1, 1)], radii=(30.0, 60.0))
        verdict = algebraicity_verdict(estimate_from_samples(shells), 1)
        assert verdict.decision == INCONCLUSIVE

    def test_sparse_component_is_low_confidence(self):
        shells = tentacle_shells([(-1, 0), (0, -1), (1, 1)], per_tentacle=5, spread=0.05)
        estimate = estimate_from_samples(shells)
        assert all(c.cell.low_confidence for c in estimate.cells)
        assert algebraicity_verdict(estimate, 1).decision == INCONCLUSIVE

    def test_quarter_circle_is_an_arc(self):
        shells = []
        for R in (15.0, 30.0, 60.0):
            theta = np.linspace(0.0, np.pi / 2, 400)
            shells.append(shell_from_log(R * np.column_stack([np.cos(theta), np.sin(theta)]), R))
        estimate = estimate_from_samples(shells)
        assert len(estimate.cells) == 1
        arc = estimate.cells[0]
        assert arc.cell.kind == "arc"
        assert arc.cell.rational
        assert sorted(tuple(s.vector) for s in arc.cell.slopes) == [(0, 1), (1, 0)]
        assert algebraicity_verdict(estimate, 1).decision == NOT_ALGEBRAIC

    def test_to_json_lists_the_cells(self, line_shells):
        data = estimate_from_samples(line_shells).to_json()
        assert len(data["cells"]) == 3
        assert data["ambient"] == 2
        assert [s["radius"] for s in data["shells"]] == [15.0, 30.0, 60.0]


def test_sampled_line_end_to_end():
    spec = parse_variety("1 + z1 + z2", IMPLICIT, None, None)
    samples = sample_shells(spec, [15.0, 30.0, 60.0], 1500, seed=1)
    estimate = estimate_from_samples(samples)
    assert vertex_slopes(estimate) == [(-1, 0), (0, -1), (1, 1)]
    assert algebraicity_verdict(estimate, 1).decision == ALGEBRAIC_CONSISTENT


def exponential_curve_shells(radii=(15.0, 30.0, 60.0), count=800, tentacle=50):
    """Log images of t -> (t, exp(t)) on each shell: (log|t|, Re t) with |Re t| <= |t|, plus the t -> 0 end"""
    shells = []
    for R in radii:
        alpha = np.linspace(-np.pi / 2, np.pi / 2, count)
        s, u = R * np.cos(alpha), R * np.sin(alpha)
        on_curve = np.abs(u) <= np.exp(s)
        X = np.vstack([np.column_stack([s[on_curve], u[on_curve]]), np.tile([-R, 0.0], (tentacle, 1))])
        shells.append(shell_from_log(X, R))
    return shells


def test_exponential_curve_has_one_arc_with_vertical_ends():
    estimate = estimate_from_samples(exponential_curve_shells())
    arcs = [c for c in estimate.cells if c.cell.kind == "arc"]
    assert len(arcs) == 1
    assert arcs[0].cell.rational
    assert sorted(tuple(s.vector) for s in arcs[0].cell.slopes) == [(0, -1), (0, 1)]
    assert vertex_slopes(estimate) == [(-1, 0)]
    assert algebraicity_verdict(estimate, 1).decision == NOT_ALGEBRAIC


class TestCertificate:
    def test_exponential_breaks_every_finite_bound(self):
        f = parse_expression("exp(z1)", 1)
        shallow = certify_newton_bound(f, [[1]], 4)
        assert shallow.base_degree == 2
        assert shallow.violation_count == 2
        assert not shallow.compact
        deep = certify_newton_bound(f, [[1]], 8)
        assert deep.violation_count == 4

    def test_line_bound_is_its_newton_polytope(self):
        f = parse_expression("1 + z1 + z2", 2)
        certificate = certify_newton_bound(f, [(-1, 0), (0, -1), (1, 1)], 8)
        assert certificate.compact
        assert certificate.violation_count == 0
        assert certificate.newton_polytope_match

    def test_binomial_bound_is_compact_in_its_span(self):
        f = parse_expression("z1*z2 - 1", 2)
        certificate = certify_newton_bound(f, [[1, -1], [-1, 1]], 8)
        assert not certificate.compact
        assert certificate.compact_in_span

    def test_slopes_from_an_exact_limit_set(self):
        f = parse_expression("1 + z1 + z2", 2)
        certificate = certify_newton_bound(f, tropical_limit_set(to_laurent(f)), 4)
        assert sorted(s.vector for s in certificate.slopes) == [(-1, 0), (0, -1), (1, 1)]
        assert certificate.compact

    def test_certificate_dict(self):
        f = parse_expression("exp(z1)", 1)
        data = certify_newton_bound(f, [RationalSlope.of((1,))], 4).to_dict()
        assert data["violation_count"] == 2
        assert data["violations"] == {"(1)": [[3], [4]]}
        assert data["bounds"] == ["2"]

    def test_degree_must_be_positive(self):
        with pytest.raises(ValueError):
            certify_newton_bound(parse_expression("exp(z1)", 1), [[1]], 0)
