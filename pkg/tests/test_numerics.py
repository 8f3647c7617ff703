"""Tests for cubic_siegel.numerics module."""

import numpy as np
import pytest

from cubic_siegel.numerics import (
    ComplexPolynomial,
    NumericsError,
    PowerSeries,
    RootFindingError,
    circle_values,
    find_roots,
    poly_eval,
    radius_of_convergence,
    root_bounds,
    tail_radius,
)


class TestComplexPolynomial:
    """Tests for the polynomial value type."""

    def test_trailing_zeros_are_dropped(self):
        p = ComplexPolynomial([1.0, 2.0, 0.0, 0.0])
        assert p.degree == 1

    def test_zero_polynomial(self):
        z = ComplexPolynomial.zero()
        assert z.is_zero
        assert z.degree == -1
        assert ComplexPolynomial([0.0, 0.0]) == z

    def test_from_roots_vanishes_at_roots(self):
        roots = [1.0, -2.0 + 1j, 0.5j]
        p = ComplexPolynomial.from_roots(roots)
        assert p.degree == 3
        for r in roots:
            assert abs(p(r)) < 1e-12

    def test_arithmetic(self):
        p = ComplexPolynomial([1.0, 1.0])
        q = ComplexPolynomial([-1.0, 1.0])
        assert p * q == ComplexPolynomial([-1.0, 0.0, 1.0])
        assert p + q == ComplexPolynomial([0.0, 2.0])
        assert (p - p).is_zero
        assert p.scale(2.0) == ComplexPolynomial([2.0, 2.0])

    def test_product_with_zero(self):
        p = ComplexPolynomial([1.0, 1.0])
        assert (p * ComplexPolynomial.zero()).is_zero

    def test_derivative(self):
        p = ComplexPolynomial([5.0, 0.0, 3.0, 1.0])
        assert p.derivative() == ComplexPolynomial([0.0, 6.0, 3.0])
        assert ComplexPolynomial([4.0]).derivative().is_zero

    def test_evaluate_many_matches_scalar(self):
        p = ComplexPolynomial([1.0, -2.0j, 0.5, 3.0])
        zs = np.array([0.0, 1.0, 1j, -0.7 + 0.2j])
        values = p.evaluate_many(zs)
        for z, v in zip(zs, values):
            assert abs(v - p(complex(z))) < 1e-12


class TestPolyEval:
    """Tests for plain and compensated Horner evaluation."""

    def test_compensated_agrees_on_easy_input(self):
        p = ComplexPolynomial([1.0, 2.0, 3.0])
        assert poly_eval(p, 2.0, compensated=True) == pytest.approx(17.0)
        assert poly_eval(p, 2.0, compensated=False) == pytest.approx(17.0)

    def test_compensated_near_multiple_root(self):
        # (z - 1)^6 expanded, evaluated close to its sixfold root
        p = ComplexPolynomial.from_roots([1.0] * 6)
        z = 1.0 + 1e-3
        exact = 1e-18
        assert abs(poly_eval(p, z, compensated=True) - exact) < 1e-20

    def test_zero_polynomial_evaluates_to_zero(self):
        assert poly_eval(ComplexPolynomial.zero(), 3.0) == 0

    def test_overflow_raises(self):
        p = ComplexPolynomial([0.0] * 40 + [1.0])
        with pytest.raises(NumericsError):
            poly_eval(p, 1e300, compensated=False)


class TestPowerSeries:
    """Tests for truncated power series."""

    def test_constant_term_rejected(self):
        with pytest.raises(ValueError, match="zero constant term"):
            PowerSeries(np.array([1.0, 1.0]))

    def test_evaluation_and_derivative(self):
        s = PowerSeries.from_terms([1.0, 0.5, 0.25])
        w = 0.4
        assert s(w) == pytest.approx(w + 0.5 * w**2 + 0.25 * w**3)
        assert s.derivative(w) == pytest.approx(1 + w + 0.75 * w**2)

    def test_rotation(self):
        s = PowerSeries.from_terms([1.0, 2.0, 3.0])
        u = np.exp(0.3j)
        assert s.rotated(u)(0.2) == pytest.approx(s(u * 0.2))

    def test_on_circle_matches_direct_sum(self):
        s = PowerSeries.from_terms(np.linspace(1.0, 0.1, 40))
        values = s.on_circle(0.5, 16)
        angles = 0.5 * np.exp(2j * np.pi * np.arange(16) / 16)
        np.testing.assert_allclose(values, s(angles), atol=1e-12)

    def test_circle_values_folds_long_series(self):
        coeffs = np.zeros(20, dtype=complex)
        coeffs[17] = 1.0
        values = circle_values(coeffs, 1.0, 8)
        w = np.exp(2j * np.pi * np.arange(8) / 8)
        np.testing.assert_allclose(values, w**17, atol=1e-12)


class TestRadiusOfConvergence:
    """Tests for the tail-based radius estimate."""

    def test_geometric_series(self):
        s = PowerSeries.from_terms(np.ones(128))
        assert radius_of_convergence(s) == pytest.approx(1.0, rel=1e-9)

    def test_scaled_geometric_series(self):
        n = np.arange(1, 65)
        s = PowerSeries.from_terms(2.0**n)
        assert radius_of_convergence(s) == pytest.approx(0.5, rel=1e-9)

    def test_smallest_window_wins(self):
        # a_n = 2^n up to n = 112, then 1: only the first two tail windows see radius 0.5
        n = np.arange(1, 129)
        s = PowerSeries.from_terms(np.where(n <= 112, 2.0**n, 1.0))
        assert radius_of_convergence(s) == pytest.approx(0.5, rel=1e-9)
        batch = np.stack([PowerSeries.from_terms(np.ones(128)).coeffs, s.coeffs])
        np.testing.assert_allclose(tail_radius(batch), [1.0, 0.5], rtol=1e-9)

    def test_short_series_rejected(self):
        s = PowerSeries.from_terms(np.ones(16))
        with pytest.raises(ValueError, match="at least 32"):
            radius_of_convergence(s)

    def test_vanishing_tail(self):
        terms = np.zeros(64)
        terms[0] = 1.0
        with pytest.raises(NumericsError, match="series too short"):
            radius_of_convergence(PowerSeries.from_terms(terms))


class TestFindRoots:
    """Tests for the simultaneous root finder."""

    def test_recovers_known_roots(self):
        roots = [1.0, -1.0, 2j, -0.5 + 0.5j, 3.0 - 1.0j]
        report = find_roots(ComplexPolynomial.from_roots(roots))
        assert len(report) == 5
        found = sorted(report.roots, key=lambda z: (z.real, z.imag))
        expected = sorted(roots, key=lambda z: (complex(z).real, complex(z).imag))
        np.testing.assert_allclose(found, expected, atol=1e-10)

    def test_linear_polynomial(self):
        report = find_roots(ComplexPolynomial([2.0, 4.0]))
        assert report[0].root == pytest.approx(-0.5)
        assert report.sweeps == 0

    def test_roots_of_unity(self):
        coeffs = np.zeros(41, dtype=complex)
        coeffs[0], coeffs[40] = -1.0, 1.0
        report = find_roots(ComplexPolynomial(coeffs))
        np.testing.assert_allclose(np.abs(report.roots), 1.0, atol=1e-11)
        assert max(e.residual for e in report) < 1e-10

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="degree >= 1"):
            find_roots(ComplexPolynomial([3.0]))

    def test_sweep_budget_exhausted(self):
        p = ComplexPolynomial.from_roots([k + 0.3j * k for k in range(1, 11)])
        with pytest.raises(RootFindingError) as exc_info:
            find_roots(p, max_sweeps=1)
        assert len(exc_info.value.indices) > 0

    def test_unreachable_step_tolerance_still_converges(self):
        # large roots whose Aberth corrections plateau at the rounding level
        roots = [8.0 * (1.0 + 0.02 * k) * np.exp(2j * np.pi * k / 21) for k in range(21)]
        report = find_roots(ComplexPolynomial.from_roots(roots), step_tol=1e-30, max_sweeps=300)
        assert len(report) == 21
        for r in roots:
            assert np.min(np.abs(report.roots - r)) < 1e-6 * abs(r)

    def test_residual_is_relative_to_evaluation_scale(self):
        roots = [20.0 * np.exp(2j * np.pi * k / 30) for k in range(30)]
        report = find_roots(ComplexPolynomial.from_roots(roots), tol=1e-10)
        # |p(z)| is far above tol in absolute terms near |z| = 20
        assert max(e.residual for e in report) > 1e-10
        assert len(report) == 30

    def test_close_roots_reported_as_cluster(self):
        p = ComplexPolynomial.from_roots([1.0, 1.0 + 1e-7, -2.0])
        report = find_roots(p, tol=1e-6, step_tol=1e-9, cluster_distance=1e-5)
        assert any(len(group) == 2 for group in report.clusters)

    def test_root_bounds_bracket_roots(self):
        roots = [0.1, 2.0, -5.0j]
        lo, hi = root_bounds(ComplexPolynomial.from_roots(roots))
        assert lo <= 0.1 + 1e-12
        assert hi >= 5.0 - 1e-12
