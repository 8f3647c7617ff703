"""Tests for cubic_siegel.capture module."""

import cmath
import math
import pickle
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from cubic_siegel.capture import (
    CENSUS_SEARCH_TOL,
    CensusError,
    ComponentTrace,
    RayPath,
    ZakeriBracketError,
    a_plane_centers,
    capture_centers,
    capture_polys,
    expected_degree,
    hausdorff_distance,
    is_simple_polygon,
    landing_distance,
    mirror_centers,
    param_map_phi,
    quasicircle_diagnostic,
    trace_component_boundary,
    trace_parameter_ray,
    trace_zakeri,
)
from cubic_siegel.config import get_config
from cubic_siegel.family import GOLDEN, eta
from cubic_siegel.numerics import find_roots


def _square(n_per_side: int = 4) -> np.ndarray:
    corners = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    points = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        points.extend(a + (b - a) * k / n_per_side for k in range(n_per_side))
    return np.array(points)


class TestCapturePolynomials:
    """Tests for the G_ℓ tower."""

    def test_expected_degrees(self):
        assert [expected_degree(level) for level in range(1, 5)] == [1, 4, 13, 40]

    def test_first_level_coefficients(self):
        lam = GOLDEN.multiplier
        g1 = capture_polys(GOLDEN, 1).poly(1)
        np.testing.assert_allclose(g1.coeffs, [lam / 2, -lam / 6], atol=1e-15)

    def test_degrees(self):
        tower = capture_polys(GOLDEN, 4)
        assert [tower.poly(level).degree for level in range(1, 5)] == [1, 4, 13, 40]

    def test_constant_terms_follow_zero_parameter_recursion(self):
        tower = capture_polys(GOLDEN, 4)
        lam = GOLDEN.multiplier
        g = 1.0 + 0j
        for level in range(1, 5):
            g = lam * g * (1.0 - g / 2.0)
            assert tower.poly(level).coeffs[0] == pytest.approx(g, abs=1e-12)
        assert abs(tower.poly(1).coeffs[0]) == pytest.approx(0.5, abs=1e-12)

    def test_orbit_form_matches_polynomial(self):
        tower = capture_polys(GOLDEN, 3)
        c = 0.7 + 0.2j
        value, deriv = tower.evaluate(3, c)
        assert value == pytest.approx(tower.poly(3)(c), abs=1e-10)
        assert deriv == pytest.approx(tower.poly(3).derivative()(c), abs=1e-9)

    def test_orbit_form_is_normalized_critical_orbit(self):
        # G_ℓ(c) = P_c^ℓ(c)/c
        from cubic_siegel.family import CubicSiegelMap

        c = -1.5 + 0.4j
        m = CubicSiegelMap.p_c(c)
        tower = capture_polys(GOLDEN, 3)
        z = c
        for level in range(1, 4):
            z = m.evaluate(z)
            assert tower.evaluate(level, c)[0] == pytest.approx(z / c, abs=1e-12)

    def test_tower_divisibility(self):
        tower = capture_polys(GOLDEN, 3)
        assert abs(tower.evaluate(2, 3.0)[0]) < 1e-14
        assert abs(tower.evaluate(3, 3.0)[0]) < 1e-14

    @pytest.mark.parametrize("L", [0, 7])
    def test_level_range(self, L):
        with pytest.raises(ValueError, match="1..6"):
            capture_polys(GOLDEN, L)

    def test_level_lookup_range(self):
        tower = capture_polys(GOLDEN, 2)
        with pytest.raises(ValueError):
            tower.poly(3)
        with pytest.raises(ValueError):
            tower.evaluate(0, 1.0)


class TestCaptureCenters:
    """Tests for the center census."""

    def test_counts(self, census3):
        assert census3.counts == (1, 3, 9)

    def test_level_one_center(self, census3):
        (center,) = census3.centers(1)
        assert abs(center - 3.0) < 1e-10

    def test_centers_are_simple_roots(self, census3):
        for record in census3.records:
            assert record.residual < 1e-8
            assert record.derivative > 1e-6
            assert 1 / 30 < abs(record.center) < 30

    def test_report_dict(self, census3):
        payload = census3.to_dict()
        assert payload["theta"] == "[0;(1)]"
        assert payload["counts"] == [1, 3, 9]
        assert payload["max_residual"] < 1e-8

    def test_record_row(self, census3):
        row = census3.records[0].to_row()
        assert set(row) == {"level", "re", "im", "residual", "derivative_magnitude"}

    def test_perturbed_tower_fails(self):
        tower = capture_polys(GOLDEN, 2).perturbed(2)
        with pytest.raises(CensusError) as exc_info:
            capture_centers(GOLDEN, 2, tower=tower)
        assert exc_info.value.level == 2

    def test_silver_counts(self, silver):
        assert capture_centers(silver, 3).counts == (1, 3, 9)

    def test_mirror_centers(self, census3):
        mirrored = mirror_centers(census3.centers(2))
        for c, m in zip(census3.centers(2), mirrored):
            assert c * m == pytest.approx(1.0)

    def test_a_plane_centers(self, census3):
        centers = census3.centers(2)
        a_values = a_plane_centers(centers)
        assert len(a_values) == 2 * len(centers)
        for k, c in enumerate(centers):
            for a in a_values[2 * k : 2 * k + 2]:
                assert a * a == pytest.approx(eta(c), abs=1e-10)

    @pytest.mark.parametrize("theta_text", ["golden", "[0;(2)]"])
    def test_level_four_counts(self, theta_text):
        from cubic_siegel.family import make_rotation

        census = capture_centers(make_rotation(theta_text), 4)
        assert census.counts == (1, 3, 9, 27)
        assert census.to_dict()["min_derivative"] > 1e-6

    @pytest.mark.parametrize("level", [3, 4])
    def test_tower_roots_converge(self, level):
        report = find_roots(capture_polys(GOLDEN, 4).poly(level), CENSUS_SEARCH_TOL)
        assert len(report) == expected_degree(level)
        assert report.sweeps < get_config().roots.max_sweeps

    def test_large_level_three_root(self):
        roots = find_roots(capture_polys(GOLDEN, 3).poly(3), CENSUS_SEARCH_TOL).roots
        assert np.min(np.abs(roots - (9.338 - 6.053j))) < 1e-2


class TestParameterMap:
    """Tests for Φ and parameter rays."""

    def test_phi_vanishes_at_center(self):
        assert abs(param_map_phi(3.0, 1)) < 1e-8

    def test_phi_requires_capture(self):
        with pytest.raises(ValueError, match="not captured"):
            param_map_phi(20.0, 1)

    def test_level_validation(self):
        with pytest.raises(ValueError):
            param_map_phi(3.0, 0)

    def test_parameter_ray_hits_target(self):
        terms = get_config().trace.ray_terms
        ray = trace_parameter_ray(3.0, 1, 0.25, r_stop=0.5, terms=terms, measure_landing=False)
        assert ray.radii[-1] == pytest.approx(0.5)
        assert ray.radii == tuple(sorted(ray.radii))
        phi = param_map_phi(ray.points[-1], 1, terms=terms, samples=128)
        assert abs(phi) == pytest.approx(0.5, abs=1e-6)
        turns = (cmath.phase(phi) / (2 * math.pi)) % 1.0
        assert turns == pytest.approx(0.25, abs=0.02)
        assert ray.landing == ray.points[-1]
        assert ray.landing_distance is None

    @pytest.fixture(scope="class")
    def half_ray(self):
        terms = get_config().trace.ray_terms
        return trace_parameter_ray(3.0, 1, 0.4, r_stop=0.5, terms=terms, measure_landing=False)

    def test_phi_inside_component_is_in_unit_disk(self, half_ray):
        terms = get_config().trace.ray_terms
        for c in half_ray.points:
            assert abs(param_map_phi(c, 1, terms=terms, samples=128)) < 1.0

    def test_phi_advances_by_multiplier(self, half_ray):
        # one more step of the free orbit multiplies φ by λ
        terms = get_config().trace.ray_terms
        c = half_ray.points[-1]
        one = param_map_phi(c, 1, terms=terms, samples=128)
        two = param_map_phi(c, 2, terms=terms, samples=128)
        assert abs(two - GOLDEN.multiplier * one) < 1e-6

    @pytest.mark.slow
    def test_quarter_ray_lands(self):
        ray = trace_parameter_ray(3.0, 1, 0.25, r_stop=0.995)
        assert ray.radii[-1] == pytest.approx(0.995)
        assert cmath.isfinite(ray.landing)
        assert abs(ray.landing - ray.points[-1]) < 0.05 * abs(ray.points[-1] - 3.0)
        assert ray.landing_distance is not None
        assert ray.landing_distance < 5e-3

    def test_mirror_landing_distance_matches(self):
        # P_{1/3} is conjugate to P_3 with its free critical point at 1
        assert landing_distance(1.0 / 3.0, 1) == pytest.approx(landing_distance(3.0, 1), rel=1e-6)

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"t": 0.1, "r_stop": 1.5}, "r_stop"),
            ({"t": 1.0, "r_stop": 0.5}, "angle"),
        ],
    )
    def test_ray_validation(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            trace_parameter_ray(3.0, 1, **kwargs)

    def test_ray_rejects_non_center(self):
        with pytest.raises(ValueError, match="not a level-1 center"):
            trace_parameter_ray(2.0, 1, 0.0, r_stop=0.5)

    def test_ray_path_lookup(self):
        path = RayPath(3 + 0j, 1, 0.0, (0.05, 0.5), (3 + 0j, 3.1 + 0j), 3.1 + 0j)
        assert path.point_at(0.5) == 3.1
        with pytest.raises(KeyError):
            path.point_at(0.7)
        assert path.to_dict()["path"] == [[3.0, 0.0], [3.1, 0.0]]


class TestPolygonDiagnostics:
    """Tests for simplicity and bounded-turning checks."""

    def test_square_is_simple(self):
        assert is_simple_polygon(_square())

    def test_bowtie_is_not_simple(self):
        assert not is_simple_polygon(np.array([0, 1 + 1j, 1, 1j]))

    def test_regular_polygon_turning(self):
        ngon = np.exp(2j * np.pi * np.arange(32) / 32)
        assert quasicircle_diagnostic(ngon) == pytest.approx(1.0, abs=1e-9)

    def test_square_turning(self):
        assert quasicircle_diagnostic(_square()) == pytest.approx(math.sqrt(5) / 2, abs=1e-9)

    def test_too_few_vertices(self):
        with pytest.raises(ValueError, match="at least 16"):
            quasicircle_diagnostic(np.exp(2j * np.pi * np.arange(8) / 8))

    def test_repeated_vertices(self):
        ngon = np.exp(2j * np.pi * np.arange(20) / 20)
        ngon[5] = ngon[4]
        with pytest.raises(ValueError, match="repeated"):
            quasicircle_diagnostic(ngon)

    def test_hausdorff_distance(self):
        square = _square()
        assert hausdorff_distance(square, square) == 0.0
        assert hausdorff_distance(square, square + 0.25) == pytest.approx(0.25)

    def test_relation_fraction(self):
        trace = ComponentTrace(
            center=3 + 0j,
            level=1,
            angles=(0.0, 0.5),
            landings=(2 + 0j, 4 + 0j),
            closure_gap=0.0,
            simple=True,
            winding=1,
            turning_constant=1.0,
            landing_distances=(1e-4, math.nan),
        )
        assert trace.relation_fraction() == 1.0
        assert trace.diameter == pytest.approx(2.0)
        assert trace.to_dict()["winding"] == 1

    def test_closed_needs_finite_gap(self):
        angles = tuple(k / 64 for k in range(64))
        landings = tuple(3 + 0.5 * cmath.exp(2j * math.pi * t) for t in angles)
        kwargs = dict(center=3 + 0j, level=1, angles=angles, landings=landings, simple=True, winding=1, turning_constant=1.0)
        assert ComponentTrace(closure_gap=1e-6, **kwargs).closed()
        assert not ComponentTrace(closure_gap=0.01, **kwargs).closed()
        unknown = ComponentTrace(closure_gap=math.inf, **kwargs)
        assert not unknown.closed()
        assert unknown.to_dict()["closure_gap"] is None
        assert unknown.to_dict()["closed"] is False

    def test_failed_circle_continuation_leaves_gap_unknown(self):
        def radial_ray(center, level, t, r_stop, rotation, **kwargs):
            radii = (0.05, 0.98, 0.99, 0.995)
            points = tuple(center + r * cmath.exp(2j * math.pi * t) for r in radii)
            return RayPath(complex(center), level, t, radii, points, points[-1])

        def stalled_circle(solver, radius, start, seed, count):
            return [start] + [None] * (count - 1), None

        solver = MagicMock()
        solver.return_value.coordinate.return_value = (0j, 0j)
        with (
            patch("cubic_siegel.capture.trace_parameter_ray", side_effect=radial_ray),
            patch("cubic_siegel.capture._PhiSolver", solver),
            patch("cubic_siegel.capture._follow_circle", side_effect=stalled_circle),
        ):
            trace = trace_component_boundary(3.0, 1, 64, measure_landing=False)
        assert len(trace.landings) == 64
        assert trace.simple
        assert math.isinf(trace.closure_gap)
        assert not trace.closed()

    @pytest.mark.slow
    def test_level_one_component(self):
        trace = trace_component_boundary(3.0, 1, 256)
        assert not trace.failed_angles
        assert trace.closed()
        assert trace.simple
        assert trace.winding == 1
        assert trace.closure_gap < 1e-3 * trace.diameter
        assert trace.relation_fraction() >= 0.95
        finer = trace_component_boundary(3.0, 1, 512, measure_landing=False)
        assert finer.turning_constant == pytest.approx(trace.turning_constant, rel=0.1)

    def test_component_needs_enough_rays(self):
        with pytest.raises(ValueError, match="at least 64"):
            trace_component_boundary(3.0, 1, 16)


class TestZakeriCurve:
    """Tests for locating the curve where both critical points meet ∂Δ."""

    def test_bracket_error_pickles(self):
        err = ZakeriBracketError("no bracket", 7)
        restored = pickle.loads(pickle.dumps(err))
        assert restored.direction == 7
        assert str(restored) == "no bracket"

    def test_direction_count(self):
        with pytest.raises(ValueError, match="at least 32"):
            trace_zakeri(GOLDEN, 8)

    @pytest.mark.slow
    def test_curve_passes_near_unit_points(self):
        trace = trace_zakeri(GOLDEN, 64, threads=2)
        assert len(trace.points) >= 60
        points = np.array(trace.points)
        assert np.all(np.abs(points) > 1 / 30)
        assert np.all(np.abs(points) < 30)
        # c = 1 and c = -1 lie on the curve
        assert np.min(np.abs(points - 1.0)) < 5e-3
        assert np.min(np.abs(points + 1.0)) < 5e-3
        # the curve is invariant under c -> 1/c
        assert hausdorff_distance(points, 1.0 / points) < 5e-3
