"""Tests for cubic_siegel.family module."""

import cmath
import math

import pytest

from cubic_siegel.family import (
    GOLDEN,
    CubicSiegelMap,
    MapSlice,
    RotationNumber,
    a_to_c,
    conjugacy_witness,
    conjugate_parameters,
    eta,
    iterate_orbit,
    make_rotation,
)


class TestRotationNumber:
    """Tests for rotation number parsing and arithmetic."""

    def test_golden_value(self):
        assert GOLDEN.value == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
        assert abs(GOLDEN.multiplier) == pytest.approx(1.0)

    def test_parse_golden_keyword(self):
        assert make_rotation("golden") is GOLDEN
        assert make_rotation("  Golden ") is GOLDEN

    def test_parse_periodic_literal(self):
        rot = make_rotation("[0;(1)]")
        assert rot == GOLDEN
        assert str(rot) == "[0;(1)]"

    def test_parse_preperiod(self):
        rot = make_rotation("[0;2,1,(1,3)]")
        assert rot.preperiod == (2, 1)
        assert rot.period == (1, 3)
        assert rot.digits(7) == [2, 1, 1, 3, 1, 3, 1]
        assert str(rot) == "[0;2,1,(1,3)]"

    def test_silver_mean(self, silver):
        assert silver.value == pytest.approx(math.sqrt(2) - 1, abs=1e-15)

    def test_convergents_are_fibonacci(self):
        assert GOLDEN.convergents(6) == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]

    @pytest.mark.parametrize(
        "text",
        ["0.618", "[0;1,1]", "[0;(0)]", "[0;(-2)]", "[0;(x)]", "[1;(1)]", "[0;(1),2]", ""],
    )
    def test_invalid_literals(self, text):
        with pytest.raises(ValueError):
            make_rotation(text)

    def test_empty_period_rejected(self):
        with pytest.raises(ValueError, match="nonempty periodic block"):
            RotationNumber((1,), ())


class TestCubicSiegelMap:
    """Tests for the two normal forms."""

    def test_p_c_critical_points(self):
        m = CubicSiegelMap.p_c(2.0 + 1.0j)
        for cp in m.critical_points:
            assert abs(m.derivative(cp)) < 1e-12
        assert m.critical_points == (1.0, 2.0 + 1.0j)

    def test_fixed_point_multiplier(self):
        m = CubicSiegelMap.p_c(3.0)
        assert m.evaluate(0) == 0
        assert m.derivative(0) == pytest.approx(GOLDEN.multiplier)

    def test_f_a_critical_points(self):
        m = CubicSiegelMap.f_a(0.4 - 0.2j)
        for cp in m.critical_points:
            assert abs(m.derivative(cp)) < 1e-12
        lam, a, b = m.coefficients
        assert (a, b) == (0.4 - 0.2j, 1.0)

    def test_zero_c_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            CubicSiegelMap.p_c(0)

    def test_a_plane_allows_zero(self):
        m = CubicSiegelMap.f_a(0)
        assert m.slice is MapSlice.A_PLANE

    def test_mirror_conjugacy(self):
        c = 0.7 + 1.3j
        m = CubicSiegelMap.p_c(c)
        mirror = m.mirror()
        assert mirror.parameter == pytest.approx(1 / c)
        # z -> cz conjugates P_{1/c} to P_c
        for z in (0.3, -0.2 + 0.4j, 1.1j):
            assert m.evaluate(c * z) == pytest.approx(c * mirror.evaluate(z))

    def test_mirror_requires_c_plane(self):
        with pytest.raises(ValueError, match="c-plane"):
            CubicSiegelMap.f_a(1.0).mirror()

    def test_evaluate_accepts_arrays(self):
        import numpy as np

        m = CubicSiegelMap.p_c(3.0)
        zs = np.array([0.1, 0.2j])
        values = m.evaluate(zs)
        assert values[1] == pytest.approx(m.evaluate(0.2j))


class TestConjugacy:
    """Tests for the c-plane to a-plane correspondence."""

    @pytest.mark.parametrize("c", [3.0, -1.0, 0.25 + 0.5j, 2.0 - 3.0j])
    def test_witness_conjugates(self, c):
        u, a = conjugacy_witness(c)
        pc = CubicSiegelMap.p_c(c)
        fa = CubicSiegelMap.f_a(a)
        for z in (0.2, -0.3 + 0.1j, 0.9j):
            assert fa.evaluate(u * z) == pytest.approx(u * pc.evaluate(z), abs=1e-12)
        assert a * a == pytest.approx(eta(c), abs=1e-12)

    def test_conjugate_parameters_are_opposite(self):
        a1, a2 = conjugate_parameters(3.0)
        assert a2 == -a1

    @pytest.mark.parametrize("a", [0.3 + 0.2j, 2.0, -1.5j])
    def test_a_to_c_round_trip(self, a):
        c1, c2 = a_to_c(a)
        assert c1 * c2 == pytest.approx(1.0)
        for c in (c1, c2):
            assert eta(c) == pytest.approx(a * a, abs=1e-12)

    def test_a_to_c_double_root(self):
        # c = 1 is the fixed point of c -> 1/c, where both preimages coincide
        a2 = eta(1.0)
        c1, c2 = a_to_c(cmath.sqrt(a2))
        assert c1 == pytest.approx(1.0, abs=1e-7)
        assert c2 == pytest.approx(1.0, abs=1e-7)

    def test_eta_rejects_zero(self):
        with pytest.raises(ValueError):
            eta(0)


class TestIterateOrbit:
    """Tests for forward orbit iteration."""

    def test_fixed_point_stays(self):
        orbit = iterate_orbit(CubicSiegelMap.p_c(3.0), 0, 10)
        assert not orbit.escaped
        assert len(orbit.points) == 11
        assert all(z == 0 for z in orbit.points)
        assert orbit.derivative_product == pytest.approx(GOLDEN.multiplier**10)

    def test_large_start_escapes(self):
        orbit = iterate_orbit(CubicSiegelMap.p_c(3.0), 50.0, 100, escape_radius=1e6)
        assert orbit.escaped
        assert orbit.escaped_at == len(orbit.points) - 1
        assert abs(orbit.points[-1]) > 1e6

    def test_budget_validation(self):
        with pytest.raises(ValueError, match="at least 1"):
            iterate_orbit(CubicSiegelMap.p_c(3.0), 0.1, 0)
