import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posdef_lab.kernels import eval_f, eval_f_prime, eval_f_second
from posdef_lab.polynomials import (
    RationalPoly,
    Sign,
    Verdict,
    build_phi_poly,
    build_psi_poly,
    descartes_sign_changes,
    multiplicity_at_one,
    phi_float,
    psi_float,
    sign_analysis,
    verify_convexity,
    verify_logconvexity,
)

F = Fraction


def coeffs(poly):
    return [(e, c) for e, c in poly.terms]


def rationals(lo, hi, max_den=12):
    """Strategy for reduced fractions p/q in the open interval (lo, hi)."""
    return (
        st.tuples(st.integers(1, max_den), st.integers(1, 10 * max_den))
        .map(lambda qp: F(qp[1], qp[0]))
        .filter(lambda r: lo < r < hi)
    )


class TestRationalPoly:
    def test_from_terms_collects_and_normalizes(self):
        poly = RationalPoly.from_terms([(5, 1), (3, 2), (3, -2), (2, F(1, 3))])
        assert poly.terms == ((3, F(1)), (0, F(1, 3)))

    def test_invariants(self):
        with pytest.raises(ValueError):
            RationalPoly(((1, F(0)),))
        with pytest.raises(ValueError):
            RationalPoly(((1, F(1)), (2, F(1))))

    def test_json_round_trip(self):
        poly = build_psi_poly(7, 4)
        text = json.dumps(poly.to_json())
        assert RationalPoly.from_json(json.loads(text)) == poly

    def test_dense(self):
        poly = RationalPoly.from_dense([1, 0, -2, 1])
        assert poly.dense() == [1, 0, -2, 1]

    def test_exact_evaluation(self):
        poly = build_phi_poly(2, 1)
        assert poly(F(1, 2)) == -2 * F(1, 8) + 6 * F(1, 4) - 6 * F(1, 2) + 2


class TestBuildPhi:
    def test_r2(self):
        assert coeffs(build_phi_poly(2, 1)) == [(3, -2), (2, 6), (1, -6), (0, 2)]

    def test_r3(self):
        assert coeffs(build_phi_poly(3, 1)) == [(4, -6), (3, 12), (1, -12), (0, 6)]

    def test_r3_over_2(self):
        r = F(3, 2)
        assert coeffs(build_phi_poly(3, 2)) == [
            (5, r * (1 - r)), (3, r * (1 + r)), (2, -r * (1 + r)), (0, -r * (1 - r))]
        assert r * (1 - r) == F(-3, 4)
        # phi(t^2) * t^(2q - p) = phi(t^2) * t at t = 0.7
        t = 0.7
        assert build_phi_poly(3, 2)(t) == pytest.approx(phi_float(1.5, t**2) * t, rel=1e-12)

    def test_rejects_r_at_most_one(self):
        with pytest.raises(ValueError):
            build_phi_poly(1, 1)
        with pytest.raises(ValueError):
            build_phi_poly(2, 3)
        with pytest.raises(ValueError):
            build_phi_poly(4, 2)

    @pytest.mark.parametrize("r", [1.5, 3.0, 7.25])
    def test_phi_matches_second_derivative(self, r):
        x = np.array([0.2, 0.6, 1.7, 3.0])
        lhs = eval_f_second(r, x) * (1 - x**r) ** 3
        rhs = [phi_float(r, v) for v in x]
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9)


class TestBuildPsi:
    def test_r2_collects_to_fourth_power(self):
        poly = build_psi_poly(2, 1)
        assert coeffs(poly) == [(4, 1), (3, -4), (2, 6), (1, -4), (0, 1)]
        assert poly(1) == 0

    def test_r3_constant_term(self):
        poly = build_psi_poly(3, 1)
        assert poly.terms[-1] == (0, F(-1))
        assert poly(0) == -1

    @given(r=rationals(1, 10))
    @settings(max_examples=80, deadline=None)
    def test_vanishes_at_one(self, r):
        assert build_psi_poly(r.numerator, r.denominator)(1) == 0
        assert build_phi_poly(r.numerator, r.denominator)(1) == 0

    @pytest.mark.parametrize("r", [1.5, 2.5, 4.0])
    def test_psi_matches_log_convexity_numerator(self, r):
        x = np.array([0.3, 0.8, 1.4, 2.5])
        f, f1, f2 = eval_f(r, x), eval_f_prime(r, x), eval_f_second(r, x)
        lhs = (f * f2 - f1**2) * (1 - x**r) ** 4
        np.testing.assert_allclose(lhs, [psi_float(r, v) for v in x], rtol=1e-8, atol=1e-12)


def test_floating_cross_check():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 20:
        q = int(rng.integers(1, 9))
        p = int(rng.integers(q + 1, 5 * q))
        r = F(p, q)
        if r.denominator != q or not 1 < r < 5:
            continue
        checked += 1
        phi, psi = build_phi_poly(p, q), build_psi_poly(p, q)
        psi_shift = max(2 * q - p, 0)
        for x in rng.uniform(0.01, 2, 5):
            t = x ** (1 / q)
            rf = p / q
            assert phi(t) == pytest.approx(phi_float(rf, x) * t ** (2 * q - p), rel=1e-10, abs=1e-12)
            assert psi(t) == pytest.approx(psi_float(rf, x) * t**psi_shift, rel=1e-10, abs=1e-12)


class TestDescartes:
    def test_phi_r2(self):
        assert descartes_sign_changes(build_phi_poly(2, 1)) == 3

    @pytest.mark.parametrize("r", [F(3, 2), F(5, 4), F(7, 4), F(11, 6), F(101, 100)])
    def test_psi_between_one_and_two(self, r):
        assert descartes_sign_changes(build_psi_poly(r.numerator, r.denominator)) == 4

    def test_constant(self):
        assert descartes_sign_changes(RationalPoly.from_dense([5])) == 0

    def test_zero_poly_rejected(self):
        with pytest.raises(ValueError):
            descartes_sign_changes(RationalPoly(()))

    @given(r=rationals(1, 6, max_den=6))
    @settings(max_examples=40, deadline=None)
    def test_soundness_on_grid(self, r):
        # distinct positive roots seen on a rational grid never exceed the Descartes count
        for poly in (build_phi_poly(r.numerator, r.denominator),
                     build_psi_poly(r.numerator, r.denominator)):
            grid = [F(k, 64) for k in range(1, 257)]
            vals = [poly(t) for t in grid]
            roots = sum(v == 0 for v in vals)
            roots += sum(a * b < 0 for a, b in zip(vals, vals[1:]))
            assert roots <= descartes_sign_changes(poly)


class TestMultiplicity:
    def test_phi_r2(self):
        assert multiplicity_at_one(build_phi_poly(2, 1)) == 3

    def test_psi_r3_over_2(self):
        assert multiplicity_at_one(build_psi_poly(3, 2)) == 4

    def test_square(self):
        assert multiplicity_at_one(RationalPoly.from_dense([1, -2, 1])) == 2

    def test_no_root(self):
        assert multiplicity_at_one(RationalPoly.from_dense([1, 1])) == 0

    @given(r=rationals(1, 10))
    @settings(max_examples=60, deadline=None)
    def test_lower_bounds(self, r):
        p, q = r.numerator, r.denominator
        assert multiplicity_at_one(build_phi_poly(p, q)) >= 3
        assert multiplicity_at_one(build_psi_poly(p, q)) >= 4


class TestSignAnalysis:
    def test_phi_r2(self):
        rep = sign_analysis(build_phi_poly(2, 1))
        assert (rep.sign_left, rep.sign_right, rep.conclusive) == (Sign.POS, Sign.NEG, True)

    def test_psi_r3_over_2(self):
        rep = sign_analysis(build_psi_poly(3, 2))
        assert (rep.sign_left, rep.sign_right, rep.conclusive) == (Sign.POS, Sign.POS, True)

    def test_psi_r3_negative_near_zero(self):
        rep = sign_analysis(build_psi_poly(3, 1))
        assert rep.sign_left is Sign.NEG
        assert not rep.conclusive


class TestVerdicts:
    @pytest.mark.parametrize("r", [F(5), F(3, 2), F(9), F(101, 100), F(97, 10)])
    def test_convex(self, r):
        res = verify_convexity(r)
        assert res.verdict is Verdict.CONVEX
        assert res.report.multiplicity_at_one == 3

    def test_log_convex(self):
        assert verify_logconvexity(3, 2).verdict is Verdict.LOG_CONVEX
        assert verify_logconvexity(2, 1).verdict is Verdict.LOG_CONVEX
        assert verify_logconvexity(1, 1).verdict is Verdict.LOG_CONVEX

    def test_not_log_convex_with_witness(self):
        res = verify_logconvexity(3)
        assert res.verdict is Verdict.NOT_LOG_CONVEX
        t = F(res.witness["t"])
        assert res.poly(t) < 0
        assert res.poly(0) == -1

    def test_float_argument_rejected_by_fraction_path(self):
        # fractions are exact; decimals convert exactly too, so 2.5 is 5/2
        assert verify_logconvexity(F("2.5")).verdict is Verdict.NOT_LOG_CONVEX

    @given(r=rationals(1, 10))
    @settings(max_examples=60, deadline=None)
    def test_threshold_at_two(self, r):
        res = verify_logconvexity(r)
        expected = Verdict.LOG_CONVEX if r <= 2 else Verdict.NOT_LOG_CONVEX
        assert res.verdict is expected
        if r > 2:
            assert res.poly(F(res.witness["t"])) < 0

    def test_to_dict_is_json(self):
        json.dumps(verify_logconvexity(7, 3).to_dict())
        json.dumps(verify_convexity(7, 3).to_dict())
