import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlap.kernels import ckj_table
from hyperlap.special_fn import (LegendreParams, ball_volume, legendre_q, legendre_q_trapezoid, log_gamma,
                                 odd_double_factorial, sphere_area)


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5723649429247001), (5.0, math.log(24.0))])
def test_log_gamma_hand_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-13)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.5, max_value=200.0))
def test_log_gamma_matches_mpmath(x):
    ref = float(mpmath.loggamma(x))
    # ln Gamma vanishes at 1 and 2, so compare absolutely there
    assert abs(log_gamma(x) - ref) <= 1e-12 * max(abs(ref), 1.0)


def test_log_gamma_domain():
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            log_gamma(bad)


def test_sphere_and_ball_constants():
    assert sphere_area(1) == pytest.approx(2.0, rel=1e-14)
    assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-14)
    assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-14)
    assert ball_volume(1) == pytest.approx(2.0, rel=1e-14)
    assert ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)


@pytest.mark.parametrize("n", range(1, 51))
def test_ball_volume_times_n_is_sphere_area(n):
    assert ball_volume(n) * n == pytest.approx(sphere_area(n), rel=1e-14)


def test_odd_double_factorial():
    assert [odd_double_factorial(k) for k in (2, 3, 5)] == [1, 3, 105]
    with pytest.raises(ValueError):
        odd_double_factorial(1)


def test_first_column_of_c_table_is_double_factorial():
    table = ckj_table(10)
    assert all(table(k, 1) == odd_double_factorial(k) for k in range(2, 11))


def test_legendre_params_validation():
    with pytest.raises(ValueError):
        LegendreParams(0.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        LegendreParams(1.0, -0.5, 2.0)
    with pytest.raises(ValueError):
        LegendreParams(1.0, 0.0, 1.0)


@pytest.mark.parametrize("eta, gamma, r", [(0.5, 0.0, 1.0), (1.5, 0.5, 2.0), (3.0, 1.0, 0.3), (7.5, 2.5, 4.0)])
def test_legendre_q_against_trapezoid(eta, gamma, r):
    p = LegendreParams(eta, gamma, math.cosh(r))
    assert legendre_q(p) == pytest.approx(legendre_q_trapezoid(p), rel=1e-8)


def test_legendre_q_against_mpmath_integral():
    # independent route: mpmath tanh-sinh on the same integral
    eta, gamma, z = 1.5, 0.5, math.cosh(2.0)
    with mpmath.workdps(30):
        f = lambda t: (z + mpmath.cos(t)) ** (gamma - eta - 1) * mpmath.sin(t) ** (2 * eta + 1)
        ref = (mpmath.mpf(2) ** (-eta - 1) * mpmath.gamma(eta + gamma + 1) / mpmath.gamma(eta + 1)
               * mpmath.sinh(2) ** (-gamma) * mpmath.quad(f, [0, mpmath.pi]))
    assert legendre_q(LegendreParams(eta, gamma, z)) == pytest.approx(float(ref), rel=1e-10)


def test_legendre_q_gamma_zero_half_degree_is_classical():
    # Q_{1/2}(z) has the closed form via complete elliptic integrals
    z = math.cosh(1.0)
    k2 = 2.0 / (z + 1.0)
    ref = float(math.sqrt(2.0 / (z + 1.0)) * ((z) * mpmath.ellipk(k2) - (z + 1.0) * mpmath.ellipe(k2)))
    assert legendre_q(LegendreParams(0.5, 0.0, z)) == pytest.approx(ref, rel=1e-9)


def test_legendre_q_strictly_decreasing_in_z():
    for eta, gamma in [(1.5, 0.5), (4.0, 1.0), (0.5, 0.0)]:
        vals = [legendre_q(LegendreParams(eta, gamma, math.cosh(r))) for r in np.linspace(0.5, 5.0, 19)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_legendre_q_large_order_stays_finite():
    # the shape met at n ~ 200: order (n-2)/2, degree ~ rho
    p = LegendreParams(99.0, 99.0, math.cosh(1.5))
    v = legendre_q(p)
    assert math.isfinite(v) and v > 0
