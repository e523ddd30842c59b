import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posdef_lab.kernels import (
    DEFAULT_BAND,
    Direction,
    DomainError,
    EvalGrid,
    KernelParams,
    eval_f,
    eval_f_complex,
    eval_f_naive,
    eval_f_prime,
    eval_f_second,
    eval_g,
    eval_h,
    eval_kernel,
)


class TestKernelParams:
    def test_exact_fraction(self):
        p = KernelParams.parse("3/2")
        assert p.r == 1.5 and p.exact_r == (3, 2)

    def test_decimal_has_no_exact_form(self):
        assert KernelParams.parse("3.5").exact_r is None

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
    def test_rejects_bad_r(self, bad):
        with pytest.raises(DomainError):
            KernelParams(bad)

    def test_rejects_unreduced(self):
        with pytest.raises(DomainError):
            KernelParams(1.5, exact_r=(6, 4))

    def test_rejects_mismatch(self):
        with pytest.raises(DomainError):
            KernelParams(1.5, exact_r=(5, 3))

    def test_dict_round_trip(self):
        p = KernelParams.from_fraction("7/3", Direction.G)
        assert KernelParams.from_dict(p.to_dict()) == p

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            EvalGrid([1.0, 0.5])
        with pytest.raises(DomainError):
            EvalGrid([0.0, 1.0], near_one_band=1.5)


class TestEvalF:
    @pytest.mark.parametrize("r", [0.3, 1, 1.5, 2, 3, 4, 9, 17.25])
    def test_limit_at_one(self, r):
        assert eval_f(r, 1.0) == 1.0 / r
        assert eval_g(r, 1.0) == r

    def test_r_one_is_constant(self):
        assert eval_f(1, 0.37) == 1.0
        np.testing.assert_array_equal(eval_f(1, [0, 1, 5]), 1.0)

    def test_r_two(self):
        assert eval_f(2, 3.0) == pytest.approx(0.25, rel=1e-15)

    def test_near_one_second_order(self):
        # second-order series of u/E(3 L(u)) at u = 1e-9: 1/3 - u/3 + 2u^2/9
        u = 1e-9
        expected = 1 / 3 - u / 3 + 2 * u * u / 9
        assert eval_f(3, 1 + u) == pytest.approx(expected, rel=1e-12)

    def test_zero(self):
        for r in [0.5, 1.5, 7]:
            assert eval_f(r, 0.0) == 1.0
            assert eval_g(r, 0.0) == 1.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            eval_f(2, -0.1)
        with pytest.raises(DomainError):
            eval_f(-2, 0.1)
        with pytest.raises(DomainError):
            eval_f(2, 0.5, band=0)

    @pytest.mark.parametrize("r", [0.25, 0.5, 1.5, 2.5, 3, 4, 6.75, 9])
    def test_relative_error_against_mpmath(self, r, mp_f):
        rng = np.random.default_rng(7)
        t = np.concatenate([
            np.geomspace(1e-6, 1e6, 400),
            1 + rng.uniform(-2e-3, 2e-3, 200),
            [0.0, 1.0, 1 - 1e-12, 1 + 1e-12],
        ])
        got = eval_f(r, t)
        want = np.array([float(mp_f(r, x)) for x in t])
        rel = np.abs(got - want) / want
        assert rel.max() <= 1e-13

    def test_array_shape_preserved(self):
        t = np.linspace(0, 3, 12).reshape(3, 4)
        assert eval_f(3, t).shape == (3, 4)
        assert isinstance(eval_f(3, 0.5), float)


class TestEvalG:
    def test_geometric_sum(self):
        assert eval_g(4, 2.0) == pytest.approx(15.0, rel=1e-15)

    def test_g_at_zero(self):
        assert eval_g(2.5, 0.0) == 1.0

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
    def test_integer_r_is_polynomial(self, m):
        t = np.geomspace(1e-3, 50, 300)
        want = sum(t**j for j in range(m + 1))
        np.testing.assert_allclose(eval_g(m + 1, t), want, rtol=1e-12)

    def test_kernel_dispatch(self):
        p = KernelParams(3, Direction.G)
        assert eval_kernel(p, 2.0) == pytest.approx(7.0)
        assert eval_kernel(p.with_direction("F"), 2.0) == pytest.approx(1 / 7)


class TestEvalH:
    def test_r9_points(self):
        assert eval_h(9, 9 / 25) == pytest.approx(0.4 / (1 - 0.6**9), rel=1e-14)
        assert eval_h(9, 16 / 25) == pytest.approx(0.2 / (1 - 0.8**9), rel=1e-14)
        assert eval_h(9, 9 / 25) == pytest.approx(0.404072, abs=5e-7)
        assert eval_h(9, 16 / 25) == pytest.approx(0.231005, abs=5e-7)

    def test_r2(self):
        assert eval_h(2, 4.0) == pytest.approx(1 / 3, rel=1e-15)

    def test_limit(self):
        assert eval_h(5, 1.0) == 0.2


@given(
    r=st.floats(min_value=0.05, max_value=30),
    t=st.floats(min_value=0, max_value=1e4),
)
@settings(max_examples=400, deadline=None)
def test_f_times_g_is_one(r, t):
    assert eval_f(r, t) * eval_g(r, t) == pytest.approx(1.0, rel=1e-12)


@given(r=st.floats(min_value=1.01, max_value=20))
@settings(max_examples=100, deadline=None)
def test_f_decreases_to_zero(r):
    t = np.concatenate([np.linspace(0, 2, 200), np.geomspace(2, 1e5, 200)])
    v = eval_f(r, t)
    assert v[0] == 1.0
    assert np.all(np.diff(v) <= 1e-15)
    assert eval_f(r, 1e300) < 1e-2


@pytest.mark.parametrize("r", [0.5, 1.5, 2.0, 3.0, 7.5])
@pytest.mark.parametrize("side", [-1, 1])
def test_band_consistency(r, side):
    t = 1 + side * DEFAULT_BAND
    # evaluate the band formula exactly at the edge by widening the band slightly
    band_value = eval_f(r, t, band=2 * DEFAULT_BAND)
    assert eval_f_naive(r, t) == pytest.approx(band_value, rel=1e-10)
    assert eval_f(r, t) == pytest.approx(band_value, rel=1e-10)


class TestDerivatives:
    def test_values(self):
        assert eval_f_prime(2, 1.0) == pytest.approx(-0.25, rel=1e-14)
        assert eval_f_prime(2.7, 0.0) == -1.0
        assert eval_f_prime(3, 2.0) == pytest.approx(-5 / 49, rel=1e-14)
        assert eval_f_second(2, 0.0) == pytest.approx(2.0)
        assert eval_f_second(2, 1.0) == pytest.approx(0.25, rel=1e-14)

    def test_second_at_origin(self):
        assert eval_f_second(1.5, 0.0) == math.inf
        assert eval_f_second(5, 0.0) == 0.0

    def test_r3_at_one_matches_central_difference(self):
        h = 1e-4
        fd = (eval_f(3, 1 + h) - 2 * eval_f(3, 1.0) + eval_f(3, 1 - h)) / h**2
        assert eval_f_second(3, 1.0) == pytest.approx(fd, abs=1e-6)

    def test_first_derivative_at_zero_by_differences(self):
        h = 1e-6
        fd = (eval_f(2.7, h) - eval_f(2.7, 0.0)) / h
        assert fd == pytest.approx(-1.0, abs=1e-5)

    def test_requires_r_above_one(self):
        with pytest.raises(DomainError):
            eval_f_prime(1.0, 0.5)
        with pytest.raises(DomainError):
            eval_f_second(0.5, 0.5)

    @pytest.mark.parametrize("r", [1.25, 1.5, 2, 3, 4.5, 9])
    def test_fourth_order_differences(self, r, mp_f):
        t = np.geomspace(1e-3, 1e3, 241)
        t = t[np.abs(t - 1) >= DEFAULT_BAND]
        d1, d2 = [], []
        # stencil values at 40 digits so the differences carry no rounding noise
        with mpmath.workdps(40):
            for x in t:
                x = mpmath.mpf(x)
                h = x / 100
                f = [mp_f(r, x + k * h, dps=40) for k in (-2, -1, 0, 1, 2)]
                d1.append(float((f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)))
                d2.append(float((-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)))
        # 1e-6 absolute, relative once the derivative itself exceeds 1
        for got, fd in [(eval_f_prime(r, t), np.array(d1)), (eval_f_second(r, t), np.array(d2))]:
            assert np.all(np.abs(got - fd) <= 1e-6 * np.maximum(1.0, np.abs(fd)))

    @pytest.mark.parametrize("r", [1.5, 3, 9])
    def test_band_derivatives_against_mpmath(self, r):
        t = 1 + np.array([-9e-4, -1e-6, 1e-9, 5e-5, 9.9e-4])
        with mpmath.workdps(40):
            fm = lambda x: (1 - x) / (1 - x ** mpmath.mpf(r))
            d1 = [float(mpmath.diff(fm, mpmath.mpf(x))) for x in t]
            d2 = [float(mpmath.diff(fm, mpmath.mpf(x), 2)) for x in t]
        np.testing.assert_allclose(eval_f_prime(r, t), d1, rtol=1e-12)
        np.testing.assert_allclose(eval_f_second(r, t), d2, rtol=1e-10)

    @given(r=st.floats(min_value=1.01, max_value=12), t=st.floats(min_value=0, max_value=100))
    @settings(max_examples=300, deadline=None)
    def test_convex_everywhere(self, r, t):
        assert eval_f_second(r, t) >= -1e-12


class TestComplex:
    def test_equal_exponents(self):
        assert eval_f_complex(0.3 + 2j, 0.7, 0.7) == 1

    def test_values(self):
        assert eval_f_complex(1j, 1, 2) == pytest.approx(1 + 1j, abs=1e-15)
        s = math.sqrt(2) / 2
        assert eval_f_complex(1j, 0.5, 1) == pytest.approx(1 + s + s * 1j, abs=1e-15)

    def test_lower_half_plane_rejected(self):
        with pytest.raises(DomainError):
            eval_f_complex(1 - 1e-3j, 0.5, 1)
        with pytest.raises(DomainError):
            eval_f_complex(2.0, 0.5, 1)

    def test_matches_real_kernel_near_axis(self):
        # approaching the positive axis from above recovers g(t) with p = 1, q = r
        t = np.array([0.3, 0.99, 2.0, 7.0])
        z = t + 1e-12j
        np.testing.assert_allclose(eval_f_complex(z, 1, 3).real, eval_g(3, t), rtol=1e-9)
