import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invsquare import specfun
from invsquare.exceptions import BelowThresholdError, ConvergenceError, DomainError
from invsquare.specfun import ImagOrder, QuadratureSpec

import oracles

G_SET = (0.5, 1.0, 7.053)


class TestTypes:
    def test_order_from_strength(self):
        o = ImagOrder.from_rho0_sq(50.0)
        assert o.g == pytest.approx(math.sqrt(49.75), rel=1e-15)
        assert abs(o.rho0_sq - 50.0) / 50.0 < 1e-14

    @pytest.mark.parametrize("rho0_sq", [0.25, 0.2, 0.0, -1.0])
    def test_order_below_threshold(self, rho0_sq):
        with pytest.raises(BelowThresholdError):
            ImagOrder.from_rho0_sq(rho0_sq)

    def test_negative_order_rejected(self):
        with pytest.raises(DomainError):
            ImagOrder(-0.1)

    @pytest.mark.parametrize("kw", [dict(rel_tol=0), dict(abs_tol=-1e-20), dict(max_subdivisions=0)])
    def test_quadrature_spec_validation(self, kw):
        with pytest.raises(DomainError):
            QuadratureSpec(**kw)


class TestBesselK:
    def test_k0_at_one(self):
        assert specfun.bessel_k_im(0.0, 1.0) == pytest.approx(0.42102443824070834, rel=1e-13)

    @pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 10.0])
    def test_g0_matches_k0_k1(self, x):
        k0, k1 = oracles.k0_quad(x), oracles.k1_quad(x)
        assert specfun.bessel_k_im(0.0, x) == pytest.approx(k0, rel=1e-10)
        assert specfun.bessel_k_im_deriv(0.0, x) == pytest.approx(-k1, rel=1e-10)
        s0, s1 = oracles.k0_k1_scipy(x)
        assert specfun.bessel_k_im(0.0, x) == pytest.approx(s0, rel=1e-10)
        assert specfun.bessel_k_im_deriv(0.0, x) == pytest.approx(-s1, rel=1e-10)

    @pytest.mark.parametrize("g", [0.3, 1.0, 3.0, 7.053])
    @pytest.mark.parametrize("x", [1e-3, 0.1, 1.0, 4.0, 25.0])
    def test_matches_mpmath(self, g, x):
        ref = oracles.k_imag_order(g, x)
        got = specfun.bessel_k_im(g, x)
        # near a zero of K only the absolute error is meaningful
        assert abs(got - ref) <= 1e-10 * abs(ref) + 1e-15 * math.exp(-x)

    def test_order_object_and_float_agree(self):
        assert specfun.bessel_k_im(ImagOrder(1.0), 0.7) == specfun.bessel_k_im(1.0, 0.7)

    def test_even_in_order(self):
        # only g >= 0 is representable; identical g gives identical output
        assert specfun.bessel_k_im(ImagOrder(1.0), 1.0) == specfun.bessel_k_im(ImagOrder(abs(-1.0)), 1.0)

    def test_large_x_asymptotic(self):
        g = math.sqrt(49.75)
        # at x = 20 the first correction (1 - 4 g^2) / 8x is still -1.25
        assert specfun.bessel_k_im(g, 20.0) == pytest.approx(oracles.k_imag_order(g, 20.0), rel=1e-10)
        x = 2000.0
        assert 0.98 <= specfun.bessel_k_im_scaled(g, x) / math.sqrt(math.pi / (2 * x)) <= 1.02

    def test_deriv_large_x(self):
        r = specfun.bessel_k_im_deriv(1.0, 30.0) / -specfun.bessel_k_im(1.0, 30.0)
        assert 0.95 <= r <= 1.05

    def test_array_input(self):
        x = np.array([0.5, 1.0, 2.0])
        out = specfun.bessel_k_im(1.0, x)
        assert out.shape == (3,)
        assert out[1] == pytest.approx(specfun.bessel_k_im(1.0, 1.0), rel=1e-14)

    def test_scaled_and_pair_consistent(self):
        x = np.array([0.3, 3.0, 30.0])
        k, kp = specfun.bessel_k_im_pair(2.0, x)
        np.testing.assert_allclose(k, specfun.bessel_k_im(2.0, x), rtol=1e-14)
        np.testing.assert_allclose(kp, specfun.bessel_k_im_deriv(2.0, x), rtol=1e-14)
        np.testing.assert_allclose(specfun.bessel_k_im_scaled(2.0, x), np.exp(x) * k, rtol=1e-12)

    def test_scaled_survives_underflow(self):
        assert specfun.bessel_k_im(1.0, 800.0) == 0.0
        es = specfun.bessel_k_im_scaled(1.0, 800.0)
        assert es == pytest.approx(math.sqrt(math.pi / 1600.0), rel=1e-3)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_nonpositive_x(self, x):
        with pytest.raises(DomainError):
            specfun.bessel_k_im(1.0, x)

    def test_convergence_error_carries_estimates(self):
        q = QuadratureSpec(rel_tol=1e-30, abs_tol=0.0, max_subdivisions=1)
        with pytest.raises(ConvergenceError) as info:
            specfun.bessel_k_im(7.0, 1e-3, q)
        assert len(info.value.estimates) == 2

    @pytest.mark.parametrize("g", G_SET)
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_bessel_ode(self, g, x):
        k = specfun.bessel_k_im(g, x)
        kp = specfun.bessel_k_im_deriv(g, x)
        kpp = specfun.bessel_k_im_deriv(g, x, n=2)
        res = x * x * kpp + x * kp - (x * x - g * g) * k
        assert abs(res) < 1e-6 * abs(k)

    def test_second_derivative_only_up_to_two(self):
        with pytest.raises(DomainError):
            specfun.bessel_k_im_deriv(1.0, 1.0, n=3)


def _fd_worst(g):
    worst = 0.0
    for x in np.geomspace(1e-3, 10.0, 41):
        h = 1e-6 * x
        fd = (specfun.bessel_k_im(g, x + h) - specfun.bessel_k_im(g, x - h)) / (2 * h)
        d = specfun.bessel_k_im_deriv(g, x)
        k = specfun.bessel_k_im(g, x)
        # K oscillates at small x, so K' crosses zero; measure against the local
        # amplitude of the derivative instead of its pointwise value
        worst = max(worst, abs(fd - d) / math.hypot(d, g * k / x))
    return worst


@pytest.mark.parametrize("g", [0.5, 1.0])
def test_derivative_matches_finite_difference(g):
    assert _fd_worst(g) < 1e-6


@pytest.mark.xfail(strict=True, reason="round-off in K at g = 7.053 is amplified by 1/h; see notes")
def test_derivative_finite_difference_large_order():
    assert _fd_worst(7.053) < 1e-6


class TestSmallX:
    @pytest.mark.parametrize("g", G_SET)
    def test_ratio_near_one(self, g):
        r = abs(specfun.bessel_k_im_smallx(g, 1e-4)) / abs(specfun.bessel_k_im(g, 1e-4))
        assert 0.99 <= r <= 1.01

    @pytest.mark.parametrize("g", G_SET)
    def test_deviation_shrinks(self, g):
        dev = [abs(specfun.bessel_k_im_smallx(g, x) / specfun.bessel_k_im(g, x) - 1.0)
               for x in (1e-3, 1e-4, 1e-5)]
        assert dev[0] > dev[1] > dev[2]

    def test_one_percent_at_1e3(self):
        assert specfun.bessel_k_im_smallx(1.0, 1e-3) == pytest.approx(specfun.bessel_k_im(1.0, 1e-3), rel=1e-2)

    def test_sign_agrees_with_integral(self):
        # with the leading minus the form tracks K itself, not -K
        for x in (1e-3, 3e-4, 1e-5):
            assert np.sign(specfun.bessel_k_im_smallx(1.0, x)) == np.sign(specfun.bessel_k_im(1.0, x))

    def test_zeros(self):
        g = 1.0
        phi0 = specfun.arg_gamma(0, g)
        for m in (-3, -4):
            x = 2.0 * math.exp((phi0 + m * math.pi) / g)
            assert abs(specfun.bessel_k_im_smallx(g, x)) < 1e-14

    def test_log_periodic_envelope(self):
        g = 2.0
        x = 1e-3
        a = abs(specfun.bessel_k_im_smallx(g, x))
        b = abs(specfun.bessel_k_im_smallx(g, x * math.exp(math.pi / g)))
        assert a == pytest.approx(b, rel=1e-10)


class TestArgGamma:
    @pytest.mark.parametrize("g", [0.1, 1.0, 3.0, 7.053])
    @pytest.mark.parametrize("k", [0, 1, 5])
    def test_matches_log_gamma(self, g, k):
        assert abs(specfun.arg_gamma(k, g) - oracles.arg_gamma(k, g)) < 1e-10

    def test_zero_order(self):
        assert specfun.arg_gamma(0, 0.0) == 0.0

    def test_small_order_leading_term(self):
        g = 1e-4
        assert specfun.arg_gamma(0, g) == pytest.approx(-specfun.EULER_GAMMA * g, rel=1e-3)

    def test_digamma(self):
        assert specfun.digamma_int(1) == -specfun.EULER_GAMMA
        assert specfun.digamma_int(4) == pytest.approx(-specfun.EULER_GAMMA + 1 + 0.5 + 1 / 3, rel=1e-15)

    def test_negative_k(self):
        with pytest.raises(DomainError):
            specfun.arg_gamma(-1, 1.0)


class TestSincSi:
    def test_sinc_values(self):
        assert specfun.sinc(0.0) == 1.0
        assert abs(specfun.sinc(math.pi)) < 1e-16
        assert specfun.sinc(1.0) == pytest.approx(0.8414709848078965, rel=1e-15)

    @given(st.floats(-1e-4, 1e-4))
    def test_sinc_series_branch(self, z):
        ref = 1.0 if z == 0 else math.sin(z) / z
        assert specfun.sinc(z) == pytest.approx(ref, rel=1e-15)

    def test_si_values(self):
        assert specfun.sine_integral(0.0) == 0.0
        assert specfun.sine_integral(1.0) == pytest.approx(0.9460830703671831, abs=1e-12)
        assert abs(specfun.sine_integral(1e6) - math.pi / 2) < 1e-5

    @pytest.mark.parametrize("z", [0.5, 3.0, 5.999, 6.0, 6.001, 10.0, 40.0])
    def test_si_against_quadrature(self, z):
        assert abs(specfun.sine_integral(z) - oracles.si_quad(z)) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 200.0))
    def test_si_property(self, z):
        assert abs(specfun.sine_integral(z) - oracles.si_quad(z)) < 1e-12

    def test_si_vectorized(self):
        z = np.array([1.0, 7.0])
        np.testing.assert_array_equal(specfun.sine_integral(z),
                                      [specfun.sine_integral(1.0), specfun.sine_integral(7.0)])


class TestL2:
    @pytest.mark.parametrize("n", range(1, 13))
    @pytest.mark.parametrize("rho", [0.001, 0.01, 0.1, 0.5, 1.0])
    def test_closed_form(self, n, rho):
        assert abs(specfun.l2_integral(n, rho) - oracles.l2_quad(n, rho)) < 1e-10

    def test_reference_value(self):
        assert specfun.l2_integral(1, 0.5) == pytest.approx(oracles.l2_quad(1, 0.5), abs=1e-10)

    @given(st.integers(0, 40), st.floats(1e-3, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_even_in_n_and_zero_at_n0(self, n, rho):
        assert specfun.l2_integral(-n, rho) == specfun.l2_integral(n, rho)
        assert specfun.l2_integral(0, rho) == 0.0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 60), st.floats(1e-3, 1.0))
    def test_closed_form_property(self, n, rho):
        assert abs(specfun.l2_integral(n, rho) - oracles.l2_quad(n, rho)) < 1e-10

    @pytest.mark.parametrize("rho", [0.0, -0.1, 1.5])
    def test_domain(self, rho):
        with pytest.raises(DomainError):
            specfun.l2_integral(1, rho)
