import math

import mpmath as mp
import pytest

from qrabi.errors import SpecfunOverflowError, ValidationError
from qrabi.specfun import (
    assoc_laguerre,
    assoc_laguerre_report,
    bessel_j,
    laguerre,
    laguerre_bessel_limit_error,
    laguerre_report,
    log_factorial,
)

from oracles import series_assoc_laguerre, series_bessel_j0


class TestLaguerre:
    def test_degree_zero_is_one(self):
        assert laguerre(0, 3.7) == 1.0

    def test_degree_one(self):
        assert laguerre(1, 2.0) == -1.0

    def test_degree_two_hand_value(self):
        # L_2(x) = 1 - 2x + x^2/2 at x = 2
        assert laguerre(2, 2.0) == pytest.approx(-1.0, abs=1e-14)

    def test_matches_series_oracle_over_grid(self):
        for n in range(0, 51, 5):
            for x in (0.0, 0.3, 1.0, 4.5, 11.0, 20.0):
                want = float(series_assoc_laguerre(n, 0, x))
                got = laguerre(n, x)
                assert got == pytest.approx(want, rel=1e-10, abs=1e-12)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValidationError):
            laguerre(-1, 1.0)

    def test_negative_argument_rejected(self):
        with pytest.raises(ValidationError):
            laguerre(3, -0.5)

    def test_overflow_goes_through_report(self):
        # L_n(x) at large x grows like x^n/n!; pick values that overflow
        with pytest.raises(SpecfunOverflowError) as exc:
            laguerre(400, 5000.0)
        rep = exc.value.report
        assert math.isfinite(rep.value) and math.isfinite(rep.log_scale)
        want = series_assoc_laguerre(400, 0, 5000.0)
        got_log = rep.log_abs
        assert got_log == pytest.approx(float(mp.log(abs(want))), rel=1e-12)
        assert rep.sign == float(mp.sign(want))

    def test_report_method_recorded(self):
        assert laguerre_report(12, 2.5).method == "recurrence"
        assert assoc_laguerre_report(3, 2, 0.0).method == "series"


class TestAssocLaguerre:
    def test_alpha_zero_consistent_with_laguerre(self):
        for n in (0, 1, 7, 23):
            for x in (0.1, 2.0, 9.0):
                assert assoc_laguerre(n, 0, x) == laguerre(n, x)

    def test_value_at_zero_is_binomial(self):
        # L_n^{(k)}(0) = C(n+k, n), exact
        assert assoc_laguerre(3, 2, 0.0) == 10.0
        for n in range(0, 31, 3):
            for k in range(0, 31, 5):
                if n + k <= 60:
                    assert assoc_laguerre(n, k, 0.0) == float(math.comb(n + k, n))

    def test_frozen_series_value(self):
        # series oracle in extended precision: L_25^{(3)}(1.5)
        assert assoc_laguerre(25, 3, 1.5) == pytest.approx(
            11.259028009515689266, rel=1e-10
        )

    def test_series_oracle_grid(self):
        for n in range(0, 51, 10):
            for k in (0, 1, 3, 10):
                for x in (0.2, 1.7, 8.0, 20.0):
                    want = float(series_assoc_laguerre(n, k, x))
                    assert assoc_laguerre(n, k, x) == pytest.approx(
                        want, rel=1e-10, abs=1e-12
                    )

    def test_large_degree_stays_finite_in_report(self):
        rep = assoc_laguerre_report(10**4, 1, 2.0)
        mag = rep.log_abs
        assert math.isfinite(mag)
        # cross-check magnitude against mpmath
        want = mp.log(abs(mp.laguerre(10**4, 1, mp.mpf(2.0))))
        assert mag == pytest.approx(float(want), rel=1e-9)


class TestBesselJ:
    def test_j0_at_origin(self):
        assert bessel_j(0, 0.0) == 1.0

    def test_higher_orders_vanish_at_origin(self):
        assert bessel_j(3, 0.0) == 0.0

    def test_first_zero_of_j0(self):
        # bisection on an independent power-series oracle
        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if series_bessel_j0(lo) * series_bessel_j0(mid) <= 0:
                hi = mid
            else:
                lo = mid
        zero = 0.5 * (lo + hi)
        assert zero == pytest.approx(2.404826, abs=1e-6)
        assert abs(bessel_j(0, 2.404826)) < 1e-6
        assert abs(bessel_j(0, zero)) < 1e-12

    @pytest.mark.parametrize("order", [0, 1, 2, 5, 13, 40])
    @pytest.mark.parametrize("x", [0.05, 1.0, 7.5, 14.9, 15.1, 30.0, 123.0])
    def test_against_mpmath(self, order, x):
        # near the series/recurrence switch at x = 15 the alternating series
        # loses ~e^x * eps to cancellation, so the bar is 1e-9 there
        want = float(mp.besselj(order, mp.mpf(x)))
        assert bessel_j(order, x) == pytest.approx(want, rel=1e-9, abs=1e-13)

    def test_large_order_large_argument(self):
        want = float(mp.besselj(500, mp.mpf(480.0)))
        assert bessel_j(500, 480.0) == pytest.approx(want, rel=1e-9)
        want = float(mp.besselj(40, mp.mpf(2.0e4)))
        assert bessel_j(40, 2.0e4) == pytest.approx(want, rel=1e-8, abs=1e-12)

    def test_sum_rule(self):
        # J_0(x)^2 + 2 sum_{k>=1} J_k(x)^2 = 1
        for x in (0.7, 5.0, 12.0, 20.0):
            kmax = int(x) + 40
            total = bessel_j(0, x) ** 2 + 2.0 * sum(
                bessel_j(k, x) ** 2 for k in range(1, kmax + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_domain_validation(self):
        with pytest.raises(ValidationError):
            bessel_j(-1, 1.0)
        with pytest.raises(ValidationError):
            bessel_j(2, -1.0)
        with pytest.raises(ValidationError):
            bessel_j(2, 2.0e6)


class TestLogFactorial:
    def test_zero(self):
        assert log_factorial(0) == 0.0

    def test_five(self):
        assert log_factorial(5) == pytest.approx(math.log(120.0), rel=1e-15)

    def test_cumulative_sum_oracle(self):
        acc = 0.0
        for k in range(1, 1001):
            acc += math.log(k)
        assert log_factorial(1000) == pytest.approx(acc, rel=1e-10)

    def test_monotone_and_increment(self):
        # the increment identity is representation-limited at large n: a float
        # holding ln(n!) ~ n ln n has ULP >> 1e-12 * ln n once n >~ a few 1e3
        prev = log_factorial(0)
        for n in list(range(1, 300)) + [500, 1000, 2000]:
            cur = log_factorial(n)
            assert cur > prev or n == 1
            assert cur - log_factorial(n - 1) == pytest.approx(
                math.log(n), rel=1e-12
            )
            prev = cur
        for n in (10**4, 10**5, 10**6):
            assert log_factorial(n) - log_factorial(n - 1) == pytest.approx(
                math.log(n), rel=1e-9
            )
            assert log_factorial(n) > log_factorial(n - 1)


class TestLaguerreBesselLimit:
    def test_error_decreases_with_n(self):
        errs = [laguerre_bessel_limit_error(n, 0, 0.25) for n in (10, 100, 1000)]
        assert errs[0] > errs[1] > errs[2]

    def test_small_argument_alpha_zero(self):
        # both sides tend to 1 as x -> 0
        assert laguerre_bessel_limit_error(50, 0, 1e-12) < 1e-10

    def test_large_n_small_x(self):
        assert laguerre_bessel_limit_error(10**4, 1, 0.01) < 1e-2

    def test_domain_validation(self):
        with pytest.raises(ValidationError):
            laguerre_bessel_limit_error(0, 0, 0.1)
        with pytest.raises(ValidationError):
            laguerre_bessel_limit_error(5, 0, 0.0)
