"""Weight families, the weighted norm estimator, and radial sections."""

import math

import numpy as np
import pytest

from polydense.errors import EvaluationError
from polydense.weights import (
    TargetFunction,
    default_directions,
    exp_anisotropic_weight,
    exp_linear_weight,
    exp_power_weight,
    make_target,
    make_weight,
    membership_check,
    radial_section,
    weighted_norm_estimate,
)


def const_target(dim, c):
    return TargetFunction(dim, lambda x: np.full(x.shape[:-1], float(c)), "const")


class TestNormEstimate:
    def test_zero_function(self):
        f = make_target("zero", 1)
        w = exp_power_weight(1)
        assert weighted_norm_estimate(f, w, 5.0) == 0.0

    def test_weight_itself_gives_one(self):
        w = exp_power_weight(1, a=1.0, p=2.0)
        f = TargetFunction(1, lambda x: np.exp(w.phi(x)), "phi")
        # grid with 101 points on [-5, 5] contains the origin
        assert weighted_norm_estimate(f, w, 5.0, m=101) == pytest.approx(1.0)

    def test_constant_one_gauss_weight(self):
        # e^{-x^2} is maximized at the origin
        f = make_target("one", 1)
        w = exp_power_weight(1, a=1.0, p=2.0)
        assert weighted_norm_estimate(f, w, 5.0, m=101) == pytest.approx(1.0)

    def test_monotone_in_radius_and_resolution(self):
        f = make_target("gauss", 1)
        w = exp_power_weight(1, a=0.5, p=2.0)
        vals_r = [weighted_norm_estimate(f, w, R, m=51) for R in (1.0, 2.0, 4.0)]
        assert vals_r == sorted(vals_r)
        vals_m = [weighted_norm_estimate(f, w, 4.0, m=m) for m in (11, 21, 41)]
        assert vals_m == sorted(vals_m)

    def test_triangle_inequality_same_grid(self):
        w = exp_power_weight(1, a=1.0, p=2.0)
        f = make_target("sin", 1)
        g = make_target("gauss", 1)
        fg = TargetFunction(1, lambda x: f(x) + g(x), "sum")
        est = lambda h: weighted_norm_estimate(h, w, 4.0, m=81)
        assert est(fg) <= est(f) + est(g) + 1e-15

    def test_homogeneity_exact(self):
        w = exp_power_weight(1, a=1.0, p=2.0)
        f = make_target("gauss", 1)
        cf = TargetFunction(1, lambda x: -3.0 * f(x), "scaled")
        assert weighted_norm_estimate(cf, w, 4.0, m=81) == 3.0 * (
            weighted_norm_estimate(f, w, 4.0, m=81)
        )

    def test_nonfinite_value_names_the_node(self):
        bad = TargetFunction(
            1, lambda x: np.where(x[..., 0] == 0.0, np.inf, 1.0), "bad"
        )
        w = exp_power_weight(1)
        with pytest.raises(EvaluationError, match="node"):
            weighted_norm_estimate(bad, w, 1.0, m=3)

    def test_input_validation(self):
        f = make_target("one", 1)
        w = exp_power_weight(1)
        with pytest.raises(ValueError):
            weighted_norm_estimate(f, w, 0.0)
        with pytest.raises(ValueError):
            weighted_norm_estimate(f, w, 1.0, m=1)


class TestRadialSection:
    def test_radial_weight_independent_of_direction(self):
        w = exp_power_weight(2, a=1.0, p=2.0)
        for sigma in ([1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5)] * 2):
            sec = radial_section(w, np.asarray(sigma))
            assert sec(2.0) == pytest.approx(4.0)

    def test_anisotropic_sections(self):
        w = exp_anisotropic_weight(2, a=[1.0, 2.0], p=[2.0, 2.0])
        assert radial_section(w, np.array([1.0, 0.0]))(3.0) == pytest.approx(9.0)
        assert radial_section(w, np.array([0.0, 1.0]))(3.0) == pytest.approx(18.0)

    def test_section_at_zero_matches_origin(self):
        w = exp_anisotropic_weight(2, a=[1.0, 2.0], p=[2.0, 3.0])
        for sigma in default_directions(2, count=8):
            assert radial_section(w, sigma)(0.0) == pytest.approx(0.0)

    def test_non_unit_direction_rejected(self):
        w = exp_power_weight(2)
        with pytest.raises(ValueError, match="unit"):
            radial_section(w, np.array([1.0, 1.0]))


class TestMembership:
    def test_exp_power_consistent(self):
        report = membership_check(exp_power_weight(1, a=1.0, p=2.0))
        assert report.consistent
        # phi(r)/r = r along the sampled ray
        assert report.ratios[0] == pytest.approx(report.radii)

    def test_exp_linear_inconsistent(self):
        report = membership_check(exp_linear_weight(1, c=1.0))
        assert not report.consistent
        assert report.ratios[0] == pytest.approx((1.0, 1.0, 1.0))

    def test_log_growth_inconsistent(self):
        # weight (1 + ||x||^2): ratios 2 ln(1+r) / r decreasing
        from polydense.weights import Weight

        w = Weight(1, lambda x: np.log1p(np.linalg.norm(x, axis=-1) ** 2), "log")
        report = membership_check(w)
        assert not report.consistent

    def test_bad_radii_rejected(self):
        w = exp_power_weight(1)
        with pytest.raises(ValueError):
            membership_check(w, radii=(0.5, 1.0, 2.0))
        with pytest.raises(ValueError):
            membership_check(w, radii=(1.0, 3.0, 2.0))


class TestFactories:
    def test_make_weight_families(self):
        assert make_weight("exp-power", 1, a=2.0, p=3.0).radial
        assert not make_weight(
            "exp-anisotropic", 2, a=[1.0, 1.0], p=[2.0, 2.0]
        ).radial
        assert make_weight("exp-linear", 1, c=2.0).radial
        with pytest.raises(ValueError):
            make_weight("nope", 1)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            exp_power_weight(1, a=0.0)
        with pytest.raises(ValueError):
            exp_power_weight(1, p=1.0)
        with pytest.raises(ValueError):
            exp_linear_weight(1, c=-1.0)

    def test_make_target_names(self):
        x = np.array([[0.5]])
        assert make_target("sin", 1)(x)[0] == pytest.approx(math.sin(0.5))
        with pytest.raises(ValueError):
            make_target("sin", 2)
        xy = np.array([[0.5, 0.25]])
        assert make_target("sincos", 2)(xy)[0] == pytest.approx(
            math.sin(0.5) * math.cos(0.25)
        )
        with pytest.raises(ValueError):
            make_target("unknown", 1)

    def test_phi_nonnegative_on_samples(self):
        pts = np.random.default_rng(0).uniform(-5.0, 5.0, (200, 2))
        for w in (
            exp_power_weight(2, a=0.3, p=1.5),
            exp_anisotropic_weight(2, a=[1.0, 0.5], p=[2.0, 4.0]),
            exp_linear_weight(2, c=0.7),
        ):
            assert np.all(w.phi(pts) >= 0.0)
