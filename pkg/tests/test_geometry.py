import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlap.geometry import (ANPoint, BallSpec, HnPoint, HTypeDescriptor, HTypePoint, an_distance, an_identity,
                               an_inv, an_mul, an_volume, an_volume_sandwich, ball_contains, hn_distance,
                               hn_distance_array, hn_volume, hn_volume_sandwich, htype_dilate, htype_identity,
                               htype_inv, htype_mul, kappa, kecman_admissible, radon_hurwitz, region_volume,
                               region_volume_bound, region_volume_mc, vc_volume, vc_volume_density)
from hyperlap.special_fn import ball_volume

H1 = HTypeDescriptor.heisenberg(1)
H2 = HTypeDescriptor.heisenberg(2)
QUAT = HTypeDescriptor.quaternionic(1, 3)


def _rand_htype(rng, d, scale=2.0):
    return HTypePoint(rng.normal(0, scale, d.two_n), rng.normal(0, scale, d.m))


def _rand_an(rng, d):
    return ANPoint(float(np.exp(rng.uniform(-2, 2))), _rand_htype(rng, d))


# ---------------------------------------------------------------------------
# H^n
# ---------------------------------------------------------------------------

def test_hn_distance_hand_values():
    o = HnPoint(1.0, np.zeros(2))
    assert hn_distance(o, o) == 0.0
    assert hn_distance(o, HnPoint(math.e, np.zeros(2))) == pytest.approx(1.0, rel=1e-14)
    assert hn_distance(o, HnPoint(1.0, np.array([2.0, 0.0]))) == pytest.approx(math.acosh(3.0), rel=1e-14)


def test_hn_point_validation():
    with pytest.raises(ValueError):
        HnPoint(0.0, np.zeros(1))
    with pytest.raises(ValueError):
        hn_distance(HnPoint(1.0, np.zeros(1)), HnPoint(1.0, np.zeros(2)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.floats(0.05, 20), st.floats(0.05, 20))
def test_hn_distance_symmetric_and_array_form(xs, y, v):
    p, q = HnPoint(y, np.array(xs[:3])), HnPoint(v, np.array(xs[3:]))
    d = hn_distance(p, q)
    assert d == pytest.approx(hn_distance(q, p), abs=1e-12)
    assert float(hn_distance_array(np.array([y]), np.array([xs[:3]]), v, np.array(xs[3:]))[0]) == pytest.approx(d, abs=1e-10)


def test_hn_distance_triangle_inequality():
    rng = np.random.default_rng(3)
    for _ in range(500):
        a, b, c = (HnPoint(float(np.exp(rng.normal())), rng.normal(size=2)) for _ in range(3))
        assert hn_distance(a, c) <= hn_distance(a, b) + hn_distance(b, c) + 1e-10


@pytest.mark.parametrize("n, r, expected", [
    (2, 1.0, 2 * math.pi * (math.cosh(1.0) - 1.0)),
    (3, 1.0, math.pi * (math.sinh(2.0) - 2.0)),
    (3, 7.0, math.pi * (math.sinh(14.0) - 14.0)),
])
def test_hn_volume_closed_forms(n, r, expected):
    assert hn_volume(n, r) == pytest.approx(expected, rel=1e-10)


def test_hn_volume_small_radius_is_euclidean():
    for n in (2, 5, 30):
        assert hn_volume(n, 1e-4) / (ball_volume(n) * 1e-4 ** n) == pytest.approx(1.0, rel=1e-6)


def test_hn_volume_large_dimension_is_finite():
    v = hn_volume(4096, 3.0)
    assert math.isfinite(v) or v == math.inf  # huge but computed in log space
    assert hn_volume_sandwich(4096, 3.0) < 2.0


def test_volume_sandwich_is_bounded():
    worst = 1.0
    for n in (2, 3, 10, 60, 1024):
        for r in np.geomspace(0.01, 10.0, 25):
            q = hn_volume_sandwich(n, float(r))
            worst = max(worst, q, 1.0 / q)
    assert worst < 2.0
    assert hn_volume_sandwich(10, 0.1) == pytest.approx(1.0, rel=0.02)


# ---------------------------------------------------------------------------
# H-type groups
# ---------------------------------------------------------------------------

def test_descriptor_validation_rejects_bad_matrices():
    good = H1.U[0]
    with pytest.raises(ValueError):
        HTypeDescriptor(2, 1, (np.eye(2),))  # not skew
    with pytest.raises(ValueError):
        HTypeDescriptor(2, 1, (2.0 * np.asarray(good),))  # not orthogonal
    with pytest.raises(ValueError):
        HTypeDescriptor(4, 2, (H2.U[0], H2.U[0]))  # commuting pair
    with pytest.raises(ValueError):
        HTypeDescriptor(3, 1, (good,))
    with pytest.raises(ValueError):
        HTypeDescriptor(2, 2, (good,))


def test_descriptor_json_round_trip():
    d = HTypeDescriptor.from_json(QUAT.to_json())
    assert (d.two_n, d.m) == (4, 3)
    assert all(np.array_equal(a, b) for a, b in zip(d.U, QUAT.U))
    with pytest.raises(ValueError):
        HTypeDescriptor.from_dict({"two_n": 2})
    assert json.loads(H1.to_json())["m"] == 1


def test_quaternionic_matrices_anticommute():
    for i in range(3):
        for j in range(i + 1, 3):
            ui, uj = np.asarray(QUAT.U[i]), np.asarray(QUAT.U[j])
            assert np.max(np.abs(ui @ uj + uj @ ui)) < 1e-12


def test_radon_hurwitz_and_admissibility():
    assert [radon_hurwitz(k) for k in (2, 4, 8, 16, 6)] == [2, 4, 8, 9, 2]
    assert kecman_admissible(4, 3) and not kecman_admissible(2, 2)


def test_htype_group_axioms_on_hand_points():
    p = HTypePoint(np.array([1.0, 2.0]), np.array([3.0]))
    e = htype_identity(H1)
    assert np.allclose(htype_mul(H1, p, e).x, p.x) and np.allclose(htype_mul(H1, p, e).rho, p.rho)
    z = htype_mul(H1, p, htype_inv(p))
    assert np.allclose(z.x, 0.0) and np.allclose(z.rho, 0.0, atol=1e-15)
    q = htype_dilate(htype_dilate(p, 2.0), 0.5)
    assert np.allclose(q.x, p.x) and np.allclose(q.rho, p.rho)
    with pytest.raises(ValueError):
        htype_dilate(p, 0.0)
    with pytest.raises(ValueError):
        htype_mul(H2, p, p)


@pytest.mark.parametrize("d", [H1, H2, QUAT], ids=["H(2,1)", "H(4,1)", "H(4,3)"])
def test_htype_associativity_and_dilation(d):
    rng = np.random.default_rng(7)
    for _ in range(100):
        p, q, r = (_rand_htype(rng, d) for _ in range(3))
        lhs = htype_mul(d, htype_mul(d, p, q), r)
        rhs = htype_mul(d, p, htype_mul(d, q, r))
        assert np.allclose(lhs.x, rhs.x, atol=1e-12) and np.allclose(lhs.rho, rhs.rho, atol=1e-10)
        s = float(np.exp(rng.uniform(-1, 1)))
        a = htype_dilate(htype_mul(d, p, q), s)
        b = htype_mul(d, htype_dilate(p, s), htype_dilate(q, s))
        assert np.allclose(a.x, b.x, atol=1e-12) and np.allclose(a.rho, b.rho, atol=1e-10)


# ---------------------------------------------------------------------------
# AN groups
# ---------------------------------------------------------------------------

def test_an_group_hand_values():
    e = an_identity(H1)
    g = ANPoint(2.0, HTypePoint(np.array([0.5, -1.0]), np.array([0.3])))
    assert an_mul(H1, g, e).a == 2.0
    z = an_mul(H1, g, an_inv(g))
    assert z.a == pytest.approx(1.0) and np.allclose(z.n_part.x, 0) and np.allclose(z.n_part.rho, 0, atol=1e-14)
    two = ANPoint(2.0, htype_identity(H1))
    three = ANPoint(3.0, htype_identity(H1))
    assert an_mul(H1, two, three).a == 6.0
    with pytest.raises(ValueError):
        ANPoint(0.0, htype_identity(H1))


def test_an_distance_hand_values():
    e = an_identity(H1)
    assert an_distance(H1, e, e) == 0.0
    for a in (0.3, 2.0, 7.0):
        assert an_distance(H1, e, ANPoint(a, htype_identity(H1))) == pytest.approx(abs(math.log(a)), rel=1e-12)


@pytest.mark.parametrize("d", [H1, H2, QUAT], ids=["H(2,1)", "H(4,1)", "H(4,3)"])
def test_an_distance_symmetric_and_left_invariant(d):
    rng = np.random.default_rng(11)
    for _ in range(100):
        g, h, k = (_rand_an(rng, d) for _ in range(3))
        dgh = an_distance(d, g, h)
        assert dgh == pytest.approx(an_distance(d, h, g), rel=1e-10, abs=1e-10)
        assert dgh == pytest.approx(an_distance(d, an_mul(d, k, g), an_mul(d, k, h)), rel=1e-9, abs=1e-9)


def test_an_distance_on_h2_1_matches_hyperbolic_plane_section():
    # for m = 1 and x = 0 the (a, rho) slice carries a hyperbolic metric; check the triangle inequality there
    rng = np.random.default_rng(5)
    for _ in range(300):
        g, h, k = (_rand_an(rng, H1) for _ in range(3))
        assert an_distance(H1, g, k) <= an_distance(H1, g, h) + an_distance(H1, h, k) + 1e-9


def test_ball_contains_hand_cases():
    c = ANPoint(1.5, HTypePoint(np.array([0.2, 0.1]), np.array([0.4])))
    b = BallSpec(c, 0.7)
    assert ball_contains(H1, b, c)
    edge = ANPoint(1.5 * math.exp(0.7), c.n_part)
    assert not ball_contains(H1, b, edge)
    with pytest.raises(ValueError):
        BallSpec(c, 0.0)


@pytest.mark.parametrize("d", [H1, H2, QUAT], ids=["H(2,1)", "H(4,1)", "H(4,3)"])
def test_ball_contains_agrees_with_distance(d):
    rng = np.random.default_rng(13)
    for _ in range(2000):
        c, xi = _rand_an(rng, d), _rand_an(rng, d)
        r = float(rng.uniform(0.1, 6.0))
        dist = an_distance(d, c, xi)
        if abs(dist - r) < 1e-9:
            continue
        assert ball_contains(d, BallSpec(c, r), xi) == (dist < r)


def test_kappa():
    assert kappa(1.0, 1.0, 1.3) == pytest.approx(4 * math.sinh(0.65) ** 2, rel=1e-14)
    assert kappa(1.0, 2.0, 1.0) == pytest.approx(4 * math.cosh(1.0) - 5.0, rel=1e-14)
    with pytest.raises(ValueError):
        kappa(1.0, math.exp(1.0), 1.0)


def test_region_volume_vanishes_as_kappa_shrinks():
    r = 1.0
    h = math.exp(r) * (1 - 1e-9)
    assert region_volume(H1, 1.0, h, r) < 1e-6


def test_region_volume_against_monte_carlo_quick():
    exact = region_volume(H1, 1.0, 1.0, 1.0)
    mc = region_volume_mc(H1, 1.0, 1.0, 1.0, samples=1_000_000, seed=2)
    assert exact == pytest.approx(mc, rel=0.01)
    exact3 = region_volume(H2, 0.7, 0.9, 0.8)
    mc3 = region_volume_mc(H2, 0.7, 0.9, 0.8, samples=1_000_000, seed=3)
    assert exact3 == pytest.approx(mc3, rel=0.02)


def test_region_volume_below_closed_bound():
    rng = np.random.default_rng(17)
    for d in (H1, H2, HTypeDescriptor.heisenberg(4)):
        for _ in range(100):
            r = float(rng.uniform(0.05, 3.0))
            a = float(np.exp(rng.uniform(-1, 1)))
            h = a * math.exp(r * rng.uniform(-0.98, 0.98))
            assert region_volume(d, a, h, r) <= region_volume_bound(d, a, h, r) * (1 + 1e-12)


def test_vc_volume_closed_form_and_derivative():
    assert vc_volume(2, 2.0) == pytest.approx(8 * math.pi ** 2 * math.sinh(1.0) ** 4, rel=1e-13)
    for n in (2, 3, 6):
        assert vc_volume(n, 1e-4) / (ball_volume(2 * n) * 1e-4 ** (2 * n)) == pytest.approx(1.0, rel=1e-6)
        for r in (0.3, 1.0, 2.5):
            h = 1e-5 * r
            fd = (vc_volume(n, r + h) - vc_volume(n, r - h)) / (2 * h)
            assert vc_volume_density(n, r) == pytest.approx(fd, rel=1e-7)


def test_vc_volume_is_an_volume_for_m_one():
    for n in (2, 3, 5):
        for r in (0.5, 2.0):
            assert an_volume((2 * (n - 1), 1), r) == pytest.approx(vc_volume(n, r), rel=1e-10)


def test_an_volume_sandwich_bounded():
    for dims in [(2, 1), (4, 3), (8, 2)]:
        vals = [an_volume_sandwich(dims, float(r)) for r in np.geomspace(0.01, 20, 30)]
        assert 0.0 < min(vals) and max(vals) < 10.0


def test_an_volume_against_trapezoid_and_small_radius():
    from hyperlap.geometry import an_volume_density
    r = 1.5
    s = np.linspace(0.0, r, 200_001)
    dens = np.array([an_volume_density((2, 1), float(x)) for x in s[1:]])
    trap = float(np.sum(0.5 * (np.concatenate([[0.0], dens[:-1]]) + dens) * np.diff(s)))
    assert an_volume((2, 1), r) == pytest.approx(trap, rel=1e-8)
    for dims in [(2, 1), (4, 3)]:
        q = sum(dims) + 1
        assert an_volume(dims, 1e-4) / (ball_volume(q) * 1e-4 ** q) == pytest.approx(1.0, rel=1e-6)


def test_volume_sandwich_small_radius_reference():
    assert hn_volume_sandwich(10, 0.1) == pytest.approx(1.0, abs=0.05)
