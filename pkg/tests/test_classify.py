"""Tests for cubic_siegel.classify module."""

import numpy as np
import pytest

from cubic_siegel.classify import (
    ANNULUS,
    OrbitTag,
    PointClass,
    annulus_samples,
    capture_level,
    classify_orbit,
    classify_parameter_a,
    classify_parameter_c,
    symmetry_agreement,
)
from cubic_siegel.family import conjugate_parameters
from cubic_siegel.siegel import BoundaryVerdict


class TestPointClass:
    """Tests for orbit verdict values."""

    def test_keys_ignore_escape_step(self):
        assert PointClass.escapes(3).key() == PointClass.escapes(40).key()
        assert PointClass.capture(2).key() == ("capture", 2)
        assert PointClass.cycle(3, 0.1).key() == ("cycle", 3)

    def test_resolved(self):
        assert PointClass.capture(1).resolved
        assert not PointClass.unresolved(100).resolved

    def test_to_dict_only_sets_own_field(self):
        assert PointClass.capture(2).to_dict() == {"tag": "capture", "level": 2}
        assert PointClass.unresolved(7).to_dict() == {"tag": "unresolved", "budget": 7}


class TestClassifyOrbit:
    """Tests for single-orbit classification on P_3."""

    def test_interior_start_is_captured_at_zero(self, lin3):
        result = classify_orbit(lin3.map, lin3, 0.01, 50)
        assert result == PointClass.capture(0)

    def test_free_critical_point_captured(self, lin3):
        result = classify_orbit(lin3.map, lin3, 3.0, 50)
        assert result.tag is OrbitTag.CAPTURE
        assert result.level == 1

    def test_large_start_escapes(self, lin3):
        result = classify_orbit(lin3.map, lin3, 40.0, 50)
        assert result.tag is OrbitTag.ESCAPE
        assert result.step >= 1

    def test_boundary_orbit_unresolved(self, lin3):
        result = classify_orbit(lin3.map, lin3, 1.0, 30)
        assert result == PointClass.unresolved(30)

    def test_budget_validation(self, lin3):
        with pytest.raises(ValueError, match="at least 1"):
            classify_orbit(lin3.map, lin3, 0.5, 0)


class TestClassifyParameter:
    """Tests for parameter classification on both slices."""

    def test_level_one_center(self):
        result = classify_parameter_c(3.0, 50)
        assert result.boundary.verdict is BoundaryVerdict.ON_BOUNDARY_ONE
        assert result.free_point == 3.0
        assert result.free_orbit == PointClass.capture(1)
        assert result.captured
        assert result.resolved

    def test_mirror_parameter(self):
        result = classify_parameter_c(1.0 / 3.0, 50)
        assert result.boundary.verdict is BoundaryVerdict.ON_BOUNDARY_C
        assert result.parameter == pytest.approx(1.0 / 3.0)
        assert result.free_point == pytest.approx(1.0)
        assert result.free_orbit == PointClass.capture(1)

    def test_mirror_agrees_with_direct(self):
        direct = classify_parameter_c(1.0 / 3.0, 50, canonical=False)
        mirrored = classify_parameter_c(3.0, 50).swapped(1.0 / 3.0)
        assert direct.agrees_with(mirrored)

    def test_double_critical_point(self):
        result = classify_parameter_c(1.0, 30)
        assert result.boundary.verdict is BoundaryVerdict.BOTH
        assert not result.captured

    def test_zero_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            classify_parameter_c(0)

    def test_a_plane_matches_c_plane(self):
        a, _ = conjugate_parameters(3.0)
        result = classify_parameter_a(a, 50)
        assert result.parameter == pytest.approx(3.0, abs=1e-9)
        assert result.free_orbit == PointClass.capture(1)

    def test_capture_level(self):
        assert capture_level(3.0, 50) == 1
        assert capture_level(1.0, 20) is None

    @pytest.mark.parametrize("level", [2, 3])
    def test_capture_level_at_deeper_centers(self, census3, level):
        for center in census3.centers(level):
            assert capture_level(center, 200) == level

    def test_to_dict(self):
        payload = classify_parameter_c(3.0, 50).to_dict()
        assert payload["captured"] is True
        assert payload["boundary"]["verdict"] == "one"
        assert payload["free_orbit"] == {"tag": "capture", "level": 1}


class TestSymmetry:
    """Tests for the c ↔ 1/c agreement check."""

    def test_annulus_samples_in_range(self):
        samples = annulus_samples(200, seed=3)
        assert samples.shape == (200,)
        assert np.all(np.abs(samples) > ANNULUS[0])
        assert np.all(np.abs(samples) < ANNULUS[1])
        np.testing.assert_array_equal(samples, annulus_samples(200, seed=3))

    def test_small_sample_agreement(self):
        report = symmetry_agreement(6, seed=1, n_max=100)
        assert report.samples == 6
        assert report.agreeing <= report.resolved <= 6
        assert report.fraction >= 0.8

    @pytest.mark.slow
    def test_thousand_sample_agreement(self):
        report = symmetry_agreement(1000, seed=0)
        assert report.fraction >= 0.99
