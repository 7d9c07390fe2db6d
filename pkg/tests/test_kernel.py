"""Kernel evaluation, Taylor coefficients, constants, and the remainder bound."""

import math

import numpy as np
import pytest

from polydense.kernel import (
    SERIES_SWITCH,
    H_eval,
    build_UN,
    h_derivative,
    h_eval,
    h_taylor_coeff,
    kernel_constants,
    remainder_bound_eq2,
)


class TestHEval:
    def test_value_at_origin(self):
        assert h_eval(0.0) == 0.25
        assert h_eval(1e-6) == pytest.approx(0.25, rel=1e-12)

    def test_zero_at_two_pi(self):
        assert h_eval(2.0 * math.pi) == pytest.approx(0.0, abs=1e-30)

    def test_value_at_pi(self):
        assert h_eval(math.pi) == pytest.approx(1.0 / math.pi ** 2)

    def test_bounded_between_zero_and_quarter(self):
        z = np.linspace(-100.0, 100.0, 20001)
        vals = h_eval(z)
        assert np.all(vals >= 0.0)
        assert np.all(vals <= 0.25)

    def test_series_matches_closed_form_at_switch(self):
        for z in (SERIES_SWITCH, -SERIES_SWITCH):
            series = h_eval(z)  # |z| at the switch takes the series branch
            closed = math.sin(z / 2.0) ** 2 / (z * z)
            assert series == pytest.approx(closed, rel=1e-12)


class TestTaylorCoeff:
    def test_first_coefficients(self):
        assert h_taylor_coeff(0) == 0.25
        assert h_taylor_coeff(1) == 0.0
        assert h_taylor_coeff(2) == pytest.approx(-1.0 / 48.0)
        assert h_taylor_coeff(3) == 0.0
        assert h_taylor_coeff(4) == pytest.approx(1.0 / (2.0 * math.factorial(6)))

    def test_matches_finite_differences(self):
        # central differences of h at 0 for the first even orders
        eps = 1e-2
        d2 = (h_eval(eps) - 2.0 * h_eval(0.0) + h_eval(-eps)) / eps ** 2
        assert d2 / 2.0 == pytest.approx(h_taylor_coeff(2), rel=1e-3)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            h_taylor_coeff(-1)


class TestHDerivative:
    def test_order_zero_is_h(self):
        z = np.linspace(-5.0, 5.0, 11)
        assert np.allclose(h_derivative(z, 0), h_eval(z))

    def test_matches_finite_difference(self):
        zs = np.array([0.1, 0.4, 1.0, 3.0, 10.0])
        eps = 1e-5
        fd = (h_eval(zs + eps) - h_eval(zs - eps)) / (2.0 * eps)
        assert np.allclose(h_derivative(zs, 1), fd, atol=1e-8)

    def test_bernstein_bound_up_to_order_six(self):
        z = np.linspace(-100.0, 100.0, 40001)
        for k in range(7):
            assert float(np.max(np.abs(h_derivative(z, k)))) <= 0.25 + 1e-9


class TestProductKernel:
    def test_two_dim_origin(self):
        assert H_eval(np.array([0.0, 0.0])) == pytest.approx(1.0 / 16.0)

    def test_zero_factor(self):
        assert H_eval(np.array([2.0 * math.pi, 1.0])) == pytest.approx(0.0, abs=1e-30)

    def test_reduces_to_h_in_one_dim(self):
        assert H_eval(np.array([math.pi])) == pytest.approx(1.0 / math.pi ** 2)

    def test_bounded_by_four_to_minus_n(self):
        pts = np.random.default_rng(0).uniform(-20.0, 20.0, (500, 2))
        vals = H_eval(pts)
        assert np.all(vals >= 0.0)
        assert np.all(vals <= 0.25 ** 2)

    def test_scalar_input_rejected(self):
        with pytest.raises(ValueError):
            H_eval(np.asarray(1.0))


class TestKernelConstants:
    def test_one_dim_matches_half_pi(self):
        consts = kernel_constants(1)
        assert abs(consts.A1 - math.pi / 2.0) < 1e-8
        assert consts.A == consts.A1
        assert consts.K_H == 0.25

    def test_two_dim_product_structure(self):
        c1 = kernel_constants(1)
        c2 = kernel_constants(2)
        assert c2.A == pytest.approx(c1.A1 ** 2)
        assert c2.K_H == 0.25 ** 2

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            kernel_constants(0)

    def test_box_quadrature_increases_to_A(self):
        z, step = np.linspace(-400.0, 400.0, 1600001, retstep=True)
        vals = h_eval(z) * step
        partials = []
        for T in (5.0, 20.0, 100.0, 400.0):
            mask = np.abs(z) <= T
            partials.append(float(np.sum(vals[mask])))
        assert partials == sorted(partials)
        assert partials[-1] <= kernel_constants(1).A + 1e-6


class TestBuildUN:
    def test_degree_zero_two_dim(self):
        un = build_UN(0, 2)
        assert un.terms == {(0, 0): 1.0 / 16.0}

    def test_degree_one_is_constant(self):
        un = build_UN(1, 1)
        assert un.terms == {(0,): 0.25}

    def test_degree_two_one_dim(self):
        un = build_UN(2, 1)
        assert un.coefficient((0,)) == 0.25
        assert un.coefficient((2,)) == pytest.approx(-1.0 / 48.0)
        assert un.total_degree == 2

    def test_univariate_coefficients_match_series(self):
        un = build_UN(12, 1)
        for k in range(13):
            assert un.coefficient((k,)) == h_taylor_coeff(k)

    def test_total_degree_truncation(self):
        un = build_UN(6, 2)
        assert all(sum(a) <= 6 for a in un.terms)
        # the cross term z1^2 z2^2 appears with the product coefficient
        assert un.coefficient((2, 2)) == pytest.approx((1.0 / 48.0) ** 2)


class TestRemainderBound:
    def test_zero_point(self):
        assert remainder_bound_eq2(4, 2, np.zeros(2)) == 0.0

    def test_formula_examples(self):
        assert remainder_bound_eq2(0, 1, np.array([1.0])) == pytest.approx(0.5)
        assert remainder_bound_eq2(3, 2, np.array([1.0, 0.0])) == pytest.approx(
            1.0 / 12.0
        )

    def test_eq2_taylor_consistency_randomized(self):
        # |H(x) - U_N(x)| <= bound at 1000 random samples, n <= 2, N <= 25
        rng = np.random.default_rng(7)
        polys = {}
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 3))
            N = int(rng.integers(0, 26))
            x = rng.uniform(-5.0, 5.0, n)
            if np.linalg.norm(x) > 5.0:
                x *= 5.0 / np.linalg.norm(x)
            un = polys.setdefault((N, n), build_UN(N, n))
            err = abs(H_eval(x) - un(x))
            bound = remainder_bound_eq2(N, n, x)
            # the bound holds exactly; 1e-13 absorbs evaluation roundoff
            worst = max(worst, err - bound)
        assert worst <= 1e-13
