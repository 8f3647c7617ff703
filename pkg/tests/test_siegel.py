"""Tests for cubic_siegel.siegel module."""

import cmath
import math

import numpy as np
import pytest

from cubic_siegel.family import GOLDEN, CubicSiegelMap, conjugacy_witness
from cubic_siegel.numerics import radius_of_convergence
from cubic_siegel.siegel import (
    BoundaryCriticalVerdict,
    BoundaryVerdict,
    InteriorVerdict,
    LinearizationError,
    boundary_critical_point,
    boundary_to_json,
    build_linearization,
    canonical_parameter,
    in_siegel_disk,
    internal_ray,
    linearization_series,
    phi_eval,
    point_in_polygon,
    polyline_diameter,
    polyline_distance,
    siegel_boundary,
    winding_number,
)


def _square(n_per_side: int = 4) -> np.ndarray:
    corners = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    points = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        points.extend(a + (b - a) * k / n_per_side for k in range(n_per_side))
    return np.array(points)


class TestPolylineGeometry:
    """Tests for the closed-polyline helpers."""

    def test_distance_to_square(self):
        square = _square()
        assert polyline_distance(square, 0) == pytest.approx(1.0)
        assert polyline_distance(square, 2.0) == pytest.approx(1.0)
        np.testing.assert_allclose(polyline_distance(square, np.array([0.5, 1j])), [0.5, 0.0], atol=1e-15)

    def test_point_in_polygon(self):
        square = _square()
        assert point_in_polygon(square, 0.2 + 0.3j)
        assert not point_in_polygon(square, 1.5)

    def test_winding_number(self):
        square = _square()
        assert winding_number(square) == 1
        assert winding_number(square[::-1]) == -1
        assert winding_number(square, 3.0) == 0

    def test_diameter(self):
        assert polyline_diameter(_square()) == pytest.approx(2 * math.sqrt(2))


class TestLinearizationSeries:
    """Tests for the linearizing series ψ."""

    def test_leading_term_and_functional_equation(self):
        m = CubicSiegelMap.p_c(3.0)
        s = linearization_series(m, 64)
        assert s.coeffs[1] == 1
        w = 0.05 * cmath.exp(0.7j)
        lam = GOLDEN.multiplier
        assert abs(s(lam * w) - m.evaluate(s(w))) < 1e-12

    def test_minimum_order(self):
        with pytest.raises(ValueError):
            linearization_series(CubicSiegelMap.p_c(3.0), 16)

    def test_radius_stable_under_refinement(self):
        m = CubicSiegelMap.p_c(3.0)
        r1 = radius_of_convergence(linearization_series(m, 256))
        r2 = radius_of_convergence(linearization_series(m, 512))
        assert abs(r1 - r2) / r2 < 0.05


class TestBuildLinearization:
    """Tests for the gated linearization at c = 3."""

    def test_residual_gate(self, lin3):
        assert lin3.residual < 1e-8
        assert lin3.rho > 0

    def test_residual_gate_at_level_two_centers(self, census3):
        for c in census3.centers(2):
            assert build_linearization(CubicSiegelMap.p_c(c)).residual < 1e-8

    @pytest.mark.parametrize("c", [1 + 0.2j, 1 - 0.2j])
    def test_residual_gate_near_double_critical_point(self, c):
        assert build_linearization(CubicSiegelMap.p_c(c)).residual < 1e-8

    def test_a_plane_boundary_is_scaled_c_plane_boundary(self, lin3):
        # f_a(uz) = u·P_3(z) carries ∂Δ of P_3 onto ∂Δ of f_a
        u, a = conjugacy_witness(3.0)
        lin_a = build_linearization(CubicSiegelMap.f_a(a))
        distances = polyline_distance(lin_a.boundary, u * lin3.boundary)
        assert float(distances.max()) < 1e-5 * lin_a.diameter
        assert lin_a.diameter == pytest.approx(abs(u) * lin3.diameter, rel=1e-5)

    def test_boundary_from_critical_orbit(self, lin3):
        assert lin3.source == "critical-orbit"
        assert any(abs(p - 1.0) < 1e-12 for p in lin3.boundary_points)

    def test_boundary_winds_once(self, lin3):
        assert winding_number(lin3.boundary) == 1

    def test_boundary_is_invariant(self, lin3):
        images = lin3.map.evaluate(lin3.boundary)
        distances = polyline_distance(lin3.boundary, images) / lin3.diameter
        assert float(np.median(distances)) < 1e-6
        assert float(distances.max()) < 0.05

    def test_small_sample_count_rejected(self):
        with pytest.raises(ValueError, match="at least 64"):
            build_linearization(CubicSiegelMap.p_c(3.0), samples=32)

    def test_siegel_boundary_resample(self, lin3):
        boundary = siegel_boundary(lin3, 128)
        assert len(boundary) == 128
        assert winding_number(boundary) == 1
        with pytest.raises(ValueError):
            siegel_boundary(lin3, 10)

    def test_to_json(self, lin3):
        payload = boundary_to_json(lin3)
        assert payload["c"] == [3.0, 0.0]
        assert payload["theta"] == "[0;(1)]"
        assert payload["K"] == len(payload["boundary"])
        assert payload["source"] == "critical-orbit"


class TestLinearizingCoordinate:
    """Tests for membership, φ and internal rays."""

    def test_origin_inside(self, lin3):
        assert in_siegel_disk(lin3, 0) is InteriorVerdict.INSIDE

    def test_far_point_outside(self, lin3):
        assert in_siegel_disk(lin3, 10.0) is InteriorVerdict.OUTSIDE

    def test_critical_point_near_boundary(self, lin3):
        assert in_siegel_disk(lin3, 1.0) is InteriorVerdict.NEAR_BOUNDARY

    def test_phi_at_origin(self, lin3):
        assert phi_eval(lin3, 0) == 0

    def test_phi_is_equivariant(self, lin3):
        lam = GOLDEN.multiplier
        for angle in (0.0, 1.3, 4.0):
            w = 0.4 * lin3.rho * cmath.exp(1j * angle)
            z = complex(lin3.series(w))
            assert phi_eval(lin3, lin3.map.evaluate(z)) == pytest.approx(lam * phi_eval(lin3, z), abs=1e-8)
            assert abs(phi_eval(lin3, z)) == pytest.approx(0.4, abs=1e-8)

    def test_phi_of_critical_point_on_circle(self, lin3):
        assert phi_eval(lin3, 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_phi_outside_raises(self, lin3):
        with pytest.raises(LinearizationError, match="outside linearization domain"):
            phi_eval(lin3, 10.0)

    def test_internal_ray(self, lin3):
        radii = np.linspace(0.1, 0.5, 5)
        points = internal_ray(lin3, 0.25, radii)
        for r, z in zip(radii, points):
            assert phi_eval(lin3, z) == pytest.approx(r * 1j, abs=1e-8)


class TestBoundaryCriticalPoint:
    """Tests for the boundary verdict."""

    def test_level_one_center(self):
        verdict = boundary_critical_point(3.0)
        assert verdict.verdict is BoundaryVerdict.ON_BOUNDARY_ONE
        d1, dc = verdict.distances
        assert d1 < 1e-3
        assert dc > 1e-2

    def test_mirror_swaps_roles(self):
        verdict = boundary_critical_point(1.0 / 3.0)
        assert verdict.verdict is BoundaryVerdict.ON_BOUNDARY_C
        assert verdict.parameter == pytest.approx(1.0 / 3.0)

    @pytest.mark.parametrize("c", [1.0, -1.0])
    def test_symmetric_parameters_have_both(self, c):
        assert boundary_critical_point(c).verdict is BoundaryVerdict.BOTH

    def test_zero_rejected(self):
        with pytest.raises(ValueError, match="c = 0"):
            boundary_critical_point(0)

    def test_canonical_parameter(self):
        assert canonical_parameter(3.0) == (3.0, False)
        rep, inverted = canonical_parameter(0.5j)
        assert inverted
        assert rep == pytest.approx(-2j)
        assert canonical_parameter(-1j)[1]
        assert not canonical_parameter(1j)[1]

    def test_verdict_swap_and_dict(self):
        v = BoundaryCriticalVerdict(BoundaryVerdict.ON_BOUNDARY_ONE, (0.0, 0.3), 2.0 + 0j)
        s = v.swapped(0.5 + 0j)
        assert s.verdict is BoundaryVerdict.ON_BOUNDARY_C
        assert s.distances == (0.3, 0.0)
        assert v.to_dict()["verdict"] == "one"
        assert BoundaryVerdict.BOTH.swapped() is BoundaryVerdict.BOTH
