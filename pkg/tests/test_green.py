import math

import numpy as np
import pytest
from scipy import integrate

from hyperlap import fixtures
from hyperlap.green import (AlphaParams, green_lower_bound_hc, resolvent_apply_radial_hc, s_epsilon_radial_hc, SpectralParams, admissible_alphas_hc, admissible_alphas_hn, green_hc,
                            green_hc_oracle, green_hn, green_hn_oracle, green_lower_bound_hn,
                            green_lower_margin_hc, green_lower_margin_hn, resolvent_apply_radial,
                            resolvent_identity_sides, rho_c_sq, rho_sq, s_epsilon_radial, theta)


def g3(lam, r):
    return math.exp(-math.sqrt(lam + 1.0) * r) / (4 * math.pi * math.sinh(r))


def ind(r):
    return 1.0 if 1.0 <= r <= 2.0 else 0.0


def test_spectral_bottoms():
    assert rho_sq(3) == 1.0 and rho_c_sq(4) == 4.0


def test_theta_at_alpha_parametrised_lambda():
    for n in (3, 5, 9):
        rho = 0.5 * (n - 1)
        for alpha in (0.3, 0.6, 0.9):
            assert theta(n, -(1 - alpha ** 2) * rho * rho) == pytest.approx(alpha * rho - 0.5, rel=1e-14)


def test_theta_rejects_below_spectrum():
    with pytest.raises(ValueError):
        theta(3, -1.0)


def test_param_validation():
    with pytest.raises(ValueError):
        SpectralParams.real(3, -2.0)
    with pytest.raises(ValueError):
        AlphaParams(1.0)
    a = AlphaParams.from_p(1.5)
    assert a.alpha ** 2 == pytest.approx(1 / 1.5)
    assert a.varpi_sq(1.0) == pytest.approx(1 / a.p_prime)


@pytest.mark.parametrize("lam", [-0.5, 0.0, 1.0, 3.0])
@pytest.mark.parametrize("r", [0.1, 1.0, 4.0])
def test_h3_closed_form(lam, r):
    assert green_hn(3, lam, r) == pytest.approx(g3(lam, r), rel=1e-9)


@pytest.mark.parametrize("r", [0.3, 1.0, 3.0])
def test_h2_closed_forms(r):
    assert green_hn(2, 0.0, r) == pytest.approx(-math.log(math.tanh(r / 2)) / (2 * math.pi), rel=1e-7)
    z = math.cosh(r)
    q1 = 0.5 * z * math.log((z + 1) / (z - 1)) - 1.0
    assert green_hn(2, 2.0, r) == pytest.approx(q1 / (2 * math.pi), rel=1e-9)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_closed_form_matches_laplace_transform(n, lam):
    for r in (0.5, 2.0):
        assert green_hn(n, lam, r) == pytest.approx(green_hn_oracle(n, lam, r), rel=1e-6)


def test_green_decreasing_in_r():
    rs = np.linspace(0.1, 6, 30)
    for n in (3, 6):
        vals = [green_hn(n, 0.5, r) for r in rs]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_resolvent_identity():
    lhs, rhs = resolvent_identity_sides(3, 0.5, 2.0, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-5)


def test_resolvent_of_annulus_indicator():
    exact, _ = integrate.quad(lambda r: math.exp(-math.sqrt(2.0) * r) * math.sinh(r), 1, 2, epsabs=0, epsrel=1e-13)
    assert resolvent_apply_radial(3, 1.0, ind, support=(1.0, 2.0)) == pytest.approx(exact, rel=1e-8)


def test_s_epsilon_of_annulus_indicator():
    vol = lambda r: math.pi * (math.sinh(2 * r) - 2 * r)
    exact, _ = integrate.quad(lambda r: 4 * math.pi * math.sinh(r) ** 2 / vol(r), 1, 2, epsabs=0, epsrel=1e-13)
    assert s_epsilon_radial(3, 1.0, ind, support=(1.0, 2.0)) == pytest.approx(exact, rel=1e-8)
    assert s_epsilon_radial(3, 2.5, ind, support=(1.0, 2.0)) == 0.0


def test_golden_values():
    gold = fixtures.get("golden")["value"]
    assert gold["K3(t=1,r=1)"] == pytest.approx((4 * math.pi) ** -1.5 / math.sinh(1) * math.exp(-1.25), rel=1e-12)
    assert gold["green_oracle(n=3,lam=0,r=1)"] == pytest.approx(g3(0.0, 1.0), rel=1e-6)
    assert green_hn_oracle(3, 0.0, 1.0) == pytest.approx(gold["green_oracle(n=3,lam=0,r=1)"], rel=1e-10)


def test_lower_bound_hn_holds():
    for n in (5, 7):
        for alpha in admissible_alphas_hn(n, 4):
            for r in (0.1, 1.0, 5.0):
                assert green_lower_margin_hn(n, alpha, r) >= 0
                assert green_lower_bound_hn(n, alpha, r) > 0


def test_lower_bound_hn_rejects_inadmissible():
    assert admissible_alphas_hn(3) == []
    with pytest.raises(ValueError):
        green_lower_margin_hn(5, 0.6, 1.0)
    with pytest.raises(ValueError):
        green_lower_margin_hc(3, 0.6, 1.0)
    with pytest.raises(ValueError):
        green_lower_bound_hn(5, 1.0, 1.0)


def test_hc_green_matches_laplace_transform():
    for s in (0.5, 2.0):
        assert green_hc(2, 0.5, s) == pytest.approx(green_hc_oracle(2, 0.5, s), rel=1e-5)


def test_lower_bound_hc_holds():
    for alpha in admissible_alphas_hc(4, 2):
        for s in (0.2, 2.0):
            assert green_lower_margin_hc(4, alpha, s) >= 0


def test_theta_hand_values():
    assert theta(3, 0.0) == 0.5
    assert theta(2, 0.0) == 0.0


def test_green_far_decay_and_lambda_order():
    assert green_hn(3, 0.0, 10.0) < green_hn(3, 0.0, 5.0)
    assert green_hn_oracle(3, 100.0, 1.0) < green_hn_oracle(3, 0.0, 1.0)


def test_lower_bound_hn_hand_value_and_origin_rate():
    # n = 5: Omega_5 = 8 pi^2 / 15, exponent 2 rho (1 - alpha) - 2 = -0.4 at alpha = 0.6
    want = 1 / (15 * 8 * math.pi ** 2 / 15) / math.sinh(1) ** 3 * math.cosh(0.5) ** -0.4
    assert green_lower_bound_hn(5, 0.6, 1.0) == pytest.approx(want, rel=1e-13)
    r = 1e-6
    assert green_lower_bound_hn(5, 0.6, r) * r ** 3 == pytest.approx(1 / (8 * math.pi ** 2), rel=1e-9)


def test_lower_bound_hc_hand_value_and_origin_rate():
    # n = 3: 2n(2n-2) = 24, 2^6 Omega_6 = 64 pi^3 / 6, exponent 2(0.4)3 - 4 = -1.6
    base = 24 * 64 * math.pi ** 3 / 6
    want = 1 / base / math.sinh(0.5) ** 4 * math.cosh(0.25) ** -1.6
    assert green_lower_bound_hc(3, 0.6, 1.0) == pytest.approx(want, rel=1e-13)
    s = 1e-6
    assert green_lower_bound_hc(3, 0.6, s) * math.sinh(s / 2) ** 4 == pytest.approx(1 / base, rel=1e-9)


def test_hc_green_at_bottom_of_scan_and_decay():
    assert green_hc(2, 0.0, 1.0) == pytest.approx(green_hc_oracle(2, 0.0, 1.0), rel=1e-3)
    vals = [green_hc(2, 0.0, s) for s in (0.5, 1.0, 2.0, 4.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_radial_operators_on_zero_and_scaling():
    zero = lambda r: 0.0
    assert resolvent_apply_radial(3, 1.0, zero, support=(0.0, 5.0)) == 0.0
    assert s_epsilon_radial(3, 1.0, zero, support=(0.0, 5.0)) == 0.0
    two = lambda r: 2.0 * ind(r)
    assert resolvent_apply_radial(3, 1.0, two, support=(1.0, 2.0)) == pytest.approx(
        2 * resolvent_apply_radial(3, 1.0, ind, support=(1.0, 2.0)), rel=1e-13)
    a = s_epsilon_radial_hc(2, 1.0, ind, support=(1.0, 2.0))
    assert s_epsilon_radial_hc(2, 1.0, two, support=(1.0, 2.0)) == pytest.approx(2 * a, rel=1e-13)
    assert resolvent_apply_radial_hc(2, 0.5, ind, support=(1.0, 2.0)) > 0
