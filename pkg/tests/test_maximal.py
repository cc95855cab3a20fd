import math

import numpy as np
import pytest
from scipy import integrate

from hyperlap import _accel, fixtures
from hyperlap.geometry import HTypeDescriptor, hn_distance_array
from hyperlap.maximal import (HalfSpaceGrid, HeisenbergSamples, SphereQuadrature, _cap_fraction, default_grid,
                              default_r_grid, empirical_opnorm, euclid_ball_average, euclid_maximal_radial,
                              heisenberg_spherical_maximal, hn_discrete_maximal, lp_norm, maximal_all,
                              standard_suite)


def unit(r):
    return 1.0 if r <= 1.0 else 0.0


# ---------------------------------------------------------------------------
# Euclidean
# ---------------------------------------------------------------------------

def test_cap_fraction_in_three_dimensions():
    # area fraction of a sphere inside a ball: (1 - c)/2 in R^3
    for s, t, R in [(1.0, 1.0, 1.0), (0.5, 1.2, 1.0), (2.0, 0.3, 2.1)]:
        c = (s * s + t * t - R * R) / (2 * s * t)
        want = min(max((1 - c) / 2, 0.0), 1.0)
        assert _cap_fraction(3, s, t, R) == pytest.approx(want, abs=1e-14)


def test_line_example_one_third():
    # indicator of [-1, 1] seen from x = 2: best interval is (-1, 5)
    assert euclid_maximal_radial(1, unit, t=2.0, breaks=(1.0,)) == pytest.approx(1 / 3, rel=1e-8)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_indicator_at_centre(d):
    assert euclid_maximal_radial(d, unit, 0.0, breaks=(1.0,)) == pytest.approx(1.0, rel=1e-10)


def test_ball_average_against_monte_carlo():
    rng = np.random.default_rng(1)
    t, R = 0.8, 1.1
    pts = rng.uniform(-R, R, (400_000, 2))
    pts = pts[np.hypot(*pts.T) < R] + np.array([t, 0.0])
    psi = lambda s: math.exp(-s * s)
    mc = np.mean(np.exp(-np.sum(pts ** 2, axis=1)))
    assert euclid_ball_average(2, psi, t, R) == pytest.approx(mc, rel=5e-3)


def test_euclid_validation():
    with pytest.raises(ValueError):
        euclid_ball_average(2, unit, 0.0, 0.0)
    with pytest.raises(ValueError):
        euclid_maximal_radial(0, unit)


# ---------------------------------------------------------------------------
# half-space grids
# ---------------------------------------------------------------------------

def test_grid_measure_and_validation():
    g = HalfSpaceGrid(2, ny=400, nx=8)
    want = 8.0 * integrate.quad(lambda l: math.exp(-l), -2, 2)[0]
    assert g.weights.sum() == pytest.approx(want, rel=1e-5)
    with pytest.raises(ValueError):
        HalfSpaceGrid(4)
    with pytest.raises(ValueError):
        g.sample(lambda y, x: -np.ones_like(y))


@pytest.fixture(scope="module", params=[2, 3])
def small(request):
    n = request.param
    grid = HalfSpaceGrid(n, ny=24, nx=20 if n == 2 else 10)
    rng = np.random.default_rng(n)
    f = rng.uniform(0, 1, grid.size) ** 3
    g = rng.uniform(0, 1, grid.size)
    r_grid = default_r_grid(grid, per_decade=24)
    res = maximal_all(grid, np.stack([f, g, f + g, 2.5 * f]), r_grid)
    return grid, f, g, r_grid, res


def test_sublinear_homogeneous_bounded(small):
    grid, f, g, _, res = small
    Mf, Mg, Mfg, M2 = res.M
    assert np.all(Mfg <= Mf + Mg + 1e-12)
    assert np.allclose(M2, 2.5 * Mf, rtol=1e-13, atol=0)
    assert np.all(Mf <= f.max() * (1 + 1e-13))
    assert np.all(Mf >= f * (1 - 1e-13))


def test_local_far_split(small):
    _, f, _, _, res = small
    assert np.all(res.M <= res.M_eps + res.S_eps + 1e-12)
    # local sup runs over every distinct radius below eps, the centre included
    assert np.all(res.M_eps[0] >= f * (1 - 1e-13))


def test_matches_reference_scan(small):
    grid, f, _, r_grid, res = small
    for c in (0, grid.center_index(), grid.size // 3, grid.size - 1):
        ref = hn_discrete_maximal(grid, f, c, r_grid)
        assert res.M[0][c] == pytest.approx(ref, rel=1e-12)


def test_edge_flags_use_attaining_radius(small):
    grid, _, _, _, res = small
    inner = grid.inner_radius()
    assert np.array_equal(res.edge[0], res.R_arg[0] > inner)
    assert 0 <= res.edge_fraction <= 1


def test_jit_and_numpy_sweeps_agree():
    grid = HalfSpaceGrid(3, ny=10, nx=8)
    vals = np.stack(list(standard_suite(grid).values()))
    r_grid = default_r_grid(grid, per_decade=16)
    prev = _accel.USE_JIT
    try:
        _accel.set_jit(True)
        a = maximal_all(grid, vals, r_grid)
        _accel.set_jit(False)
        b = maximal_all(grid, vals, r_grid)
    finally:
        _accel.set_jit(prev)
    for x, y in zip((a.M, a.M_eps, a.S_eps, a.R_arg), (b.M, b.M_eps, b.S_eps, b.R_arg)):
        assert np.array_equal(x, y)


def test_standard_suite_shapes():
    grid = HalfSpaceGrid(2, ny=16, nx=16)
    suite = standard_suite(grid)
    assert set(suite) == {"spike", "ball_0.3", "ball_0.8", "exp_tail", "bump"}
    assert all(v.shape == (grid.size,) and v.min() >= 0 for v in suite.values())
    assert suite["spike"].sum() == 1.0


def test_lp_norm():
    grid = HalfSpaceGrid(2, ny=4, nx=4)
    one = np.ones(grid.size)
    assert lp_norm(grid, one, 2.0) == pytest.approx(math.sqrt(grid.weights.sum()))
    with pytest.raises(ValueError):
        lp_norm(grid, one, 0.5)


def test_opnorm_below_budget_and_dimension_stable():
    stored = fixtures.get("opnorm")
    ratios = {}
    for n in (2, 3):
        rep = empirical_opnorm(n, 1.5)
        assert rep.max_ratio >= 1.0
        assert rep.max_ratio <= stored["budget"][str(n)]["1.5"]
        ratios[n] = rep.max_ratio
    assert max(ratios.values()) / min(ratios.values()) < 2
    assert default_grid(2).size == 64 * 64


# ---------------------------------------------------------------------------
# sphere quadrature and the Heisenberg spherical maximal function
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("dim", [2, 3, 4])
def test_sphere_quadrature_moments(dim):
    q = SphereQuadrature.build(dim, 12)
    assert q.weights.sum() == pytest.approx(q.area, rel=1e-12)
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0)
    for i in range(dim):
        assert q.average(q.nodes[:, i] ** 2) == pytest.approx(1 / dim, rel=1e-12)
        assert abs(q.average(q.nodes[:, i])) < 1e-13
    with pytest.raises(ValueError):
        SphereQuadrature.build(1)


def test_spherical_maximal_constant_and_radial():
    d = HTypeDescriptor.heisenberg(1)
    rs = np.linspace(0.1, 2.0, 20)
    one = lambda x, rho: np.ones(len(rho))
    assert heisenberg_spherical_maximal(d, one, (np.zeros(2), 0.0), rs) == pytest.approx(1.0)
    g = lambda x, rho: np.exp(-np.sum(x * x, axis=1))
    assert heisenberg_spherical_maximal(d, g, (np.zeros(2), 0.0), rs) == pytest.approx(math.exp(-0.01))


def test_spherical_maximal_off_centre():
    d = HTypeDescriptor.heisenberg(1)
    x0 = np.array([0.7, -0.2])
    g = lambda x, rho: np.exp(-np.sum(x * x, axis=1))
    r = 0.9
    want = integrate.quad(lambda th: math.exp(-((x0[0] + r * math.cos(th)) ** 2 + (x0[1] + r * math.sin(th)) ** 2)),
                          0, 2 * math.pi)[0] / (2 * math.pi)
    assert heisenberg_spherical_maximal(d, g, (x0, 0.3), [r]) == pytest.approx(want, rel=1e-12)
    # the centre-coordinate twist averages out for a linear function of rho
    lin = lambda x, rho: 5.0 + rho
    assert heisenberg_spherical_maximal(d, lin, (x0, 0.3), [r]) == pytest.approx(5.3, rel=1e-12)


def test_sampled_data_interpolation():
    lin = lambda x, rho: 1.0 + 0.1 * x[:, 0] - 0.2 * x[:, 1] + 0.05 * rho
    s = HeisenbergSamples.from_function(lin, size=(11, 11, 11))
    x = np.array([[0.3, -1.1], [5.0, 0.0]])
    out = s(x, np.array([0.7, 0.0]))
    assert out[0] == pytest.approx(lin(x[:1], np.array([0.7]))[0], rel=1e-12)
    assert out[1] == 0.0
    with pytest.raises(ValueError):
        heisenberg_spherical_maximal(HTypeDescriptor.heisenberg(2), lin, (np.zeros(4), 0.0), [1.0])


def test_constant_profile_euclid():
    assert euclid_maximal_radial(3, lambda s: 1.0, 0.7) == pytest.approx(1.0, rel=1e-9)


def test_constant_and_spike_on_grid():
    grid = HalfSpaceGrid(2, ny=16, nx=16)
    one = np.ones(grid.size)
    res = maximal_all(grid, one)
    assert np.all(res.M == 1.0)
    spike = standard_suite(grid)["spike"]
    c = grid.center_index()
    r_grid = default_r_grid(grid)
    res = maximal_all(grid, spike, r_grid)
    assert res.M[c] == 1.0 and res.R_arg[c] == r_grid[0]


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_local_far_split_both_scales(eps):
    grid = HalfSpaceGrid(2, ny=20, nx=20)
    vals = np.stack(list(standard_suite(grid).values()))
    res = maximal_all(grid, vals, eps=eps)
    assert np.all(res.M <= res.M_eps + res.S_eps)


def test_lp_norm_identities():
    grid = HalfSpaceGrid(3, ny=6, nx=5)
    rng = np.random.default_rng(5)
    f = rng.uniform(0, 1, grid.size)
    one = np.ones(grid.size)
    assert lp_norm(grid, one, 1.5) == pytest.approx(grid.weights.sum() ** (1 / 1.5), rel=1e-14)
    assert lp_norm(grid, 2 * f, 1.5) == pytest.approx(2 * lp_norm(grid, f, 1.5), rel=1e-14)
    assert lp_norm(grid, f, 2.0) ** 2 == pytest.approx(np.sum(f * f * grid.weights), rel=1e-13)


def test_opnorm_of_constant_and_p_order():
    grid = HalfSpaceGrid(2, ny=16, nx=16)
    rep = empirical_opnorm(2, 1.5, {"one": np.ones(grid.size)}, grid)
    assert rep.ratios["one"] == pytest.approx(1.0, rel=1e-14)
    spike = {"spike": standard_suite(grid)["spike"]}
    assert empirical_opnorm(2, 1.1, spike, grid).max_ratio > empirical_opnorm(2, 4.0, spike, grid).max_ratio


def test_spherical_maximal_gauge_radial_and_translation():
    from hyperlap.geometry import htype_mul, HTypePoint
    d = HTypeDescriptor.heisenberg(1)
    rs = np.linspace(0.05, 2.0, 40)
    gauge = lambda x, rho: np.exp(-(np.sum(x * x, axis=1) ** 2 + 16 * rho * rho) ** 0.25)
    at0 = heisenberg_spherical_maximal(d, gauge, (np.zeros(2), 0.0), rs)
    assert at0 <= 1.0 and at0 == pytest.approx(gauge(np.array([[0.05, 0.0]]), np.zeros(1))[0], rel=1e-12)
    # S(f o L_g)(x) = S f(g x)
    g = HTypePoint(np.array([0.4, -0.3]), np.array([0.2]))
    x = HTypePoint(np.array([-0.1, 0.6]), np.array([-0.5]))

    def shifted(xs, rho):
        out = np.empty(len(rho))
        for i in range(len(rho)):
            h = htype_mul(d, g, HTypePoint(xs[i], rho[i:i + 1]))
            out[i] = gauge(h.x[None, :], h.rho)[0]
        return out

    gx = htype_mul(d, g, x)
    lhs = heisenberg_spherical_maximal(d, shifted, (x.x, x.rho), rs)
    rhs = heisenberg_spherical_maximal(d, gauge, (gx.x, gx.rho), rs)
    assert lhs == pytest.approx(rhs, rel=1e-12)
