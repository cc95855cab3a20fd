"""Discrete centered Hardy-Littlewood maximal operators.

Euclidean averages of radial profiles, exact-membership maximal functions on
sampled half-space grids for H^2 and H^3 (with the local/far split
M <= M_eps + S_eps), L^p ratio probes, and the spherical maximal function
of the Heisenberg group H(2, 1).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, optimize, special

from . import _accel
from .geometry import hn_distance_array
from .quadrature import DEFAULT_QUAD, quad
from .special_fn import sphere_area

# ---------------------------------------------------------------------------
# Euclidean, radial profiles
# ---------------------------------------------------------------------------


def _cap_fraction(d, s, t, R):
    """Fraction of the sphere |w| = s in R^d lying in the open ball B(p, R), |p| = t."""
    if s == 0.0:
        return 1.0 if t < R else 0.0
    if t == 0.0:
        return 1.0 if s < R else 0.0
    c = (s * s + t * t - R * R) / (2.0 * s * t)
    if c >= 1.0:
        return 0.0
    if c <= -1.0:
        return 1.0
    if d == 1:
        # the "sphere" is {s, -s}
        return 0.5 * ((1.0 > c) + (-1.0 > c))
    half = 0.5 * special.betainc(0.5 * (d - 1), 0.5, 1.0 - c * c)
    return half if c >= 0 else 1.0 - half


def euclid_ball_average(d, psi, t, R, quad_spec=None, breaks=()):
    """Average of psi(|w|) over the ball B(p, R) in R^d with |p| = t."""
    quad_spec = quad_spec or DEFAULT_QUAD
    if not R > 0:
        raise ValueError("ball radius must be > 0")
    if t == 0.0:
        # d int_0^1 psi(R u) u^{d-1} du
        pts = [b / R for b in breaks if 0 < b < R]
        return d * quad(lambda u: psi(R * u) * u ** (d - 1), 0.0, 1.0, quad_spec, points=pts,
                        point={"d": d, "t": t, "R": R})
    lo, hi = max(0.0, t - R), t + R
    # (d/R) int psi(s) (s/R)^{d-1} frac(s) ds
    pts = [b for b in breaks if lo < b < hi] + ([R - t] if lo < R - t < hi else [])
    g = lambda s: psi(s) * (s / R) ** (d - 1) * _cap_fraction(d, s, t, R)
    return d * quad(g, lo, hi, quad_spec, points=pts, point={"d": d, "t": t, "R": R}) / R


def euclid_maximal_radial(d, psi, t=0.0, quad_spec=None, r_grid=None, breaks=()):
    """sup over r of the ball average of psi(|w|), centred at distance t from 0.

    The grid maximum is polished by a bounded scalar search between its
    neighbours.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    if r_grid is None:
        r_grid = np.geomspace(1e-3, 1e3, 385)
    r_grid = np.asarray(r_grid, float)
    avg = lambda r: euclid_ball_average(d, psi, t, float(r), quad_spec, breaks)
    vals = np.array([avg(r) for r in r_grid])
    k = int(np.argmax(vals))
    best = float(vals[k])
    if 0 < k < len(r_grid) - 1:
        res = optimize.minimize_scalar(lambda r: -avg(r), bounds=(r_grid[k - 1], r_grid[k + 1]),
                                       method="bounded", options={"xatol": 1e-10 * r_grid[k]})
        best = max(best, -float(res.fun))
    return best


# ---------------------------------------------------------------------------
# half-space grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpaceGrid:
    """Cell centres on [-L, L] in ln y times [-X, X]^{n-1} in x.

    Cell weights are y^{1-n} dl dx^{n-1}, the measure y^{-n} dy dx in l = ln y.
    """

    n: int
    L: float = 2.0
    X: float = 4.0
    ny: int = 64
    nx: int = 64

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("half-space grids are implemented for n = 2, 3")
        if not (self.L > 0 and self.X > 0 and self.ny >= 2 and self.nx >= 2):
            raise ValueError("grid extents and sizes must be positive")

    @property
    def dl(self):
        return 2.0 * self.L / self.ny

    @property
    def dx(self):
        return 2.0 * self.X / self.nx

    @property
    def log_y(self):
        return -self.L + self.dl * (np.arange(self.ny) + 0.5)

    @property
    def x_nodes(self):
        return -self.X + self.dx * (np.arange(self.nx) + 0.5)

    @property
    def points(self):
        axes = [np.exp(self.log_y)] + [self.x_nodes] * (self.n - 1)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.reshape(-1) for m in mesh])

    @property
    def weights(self):
        y = self.points[:, 0]
        return y ** (1 - self.n) * self.dl * self.dx ** (self.n - 1)

    @property
    def size(self):
        return self.ny * self.nx ** (self.n - 1)

    def sample(self, f):
        """Values of f(y, x) at cell centres; x has shape (N, n-1)."""
        pts = self.points
        vals = np.asarray(f(pts[:, 0], pts[:, 1:]), dtype=float)
        if vals.shape != (self.size,):
            raise ValueError(f"sampled values have shape {vals.shape}, expected ({self.size},)")
        if np.any(vals < 0):
            raise ValueError("sampled values must be nonnegative")
        return vals

    def center_index(self):
        """Index of the cell nearest to o = (1, 0)."""
        pts = self.points
        d = hn_distance_array(pts[:, 0], pts[:, 1:], 1.0, np.zeros(self.n - 1))
        return int(np.argmin(d))

    def inner_radius(self):
        """Largest r such that the hyperbolic ball about each centre stays in the box."""
        pts = self.points
        y = pts[:, 0]
        ly = np.log(y)
        r_y = np.minimum(ly + self.L, self.L - ly)
        gap = np.min(self.X - np.abs(pts[:, 1:]), axis=1)
        # the ball of radius r about (y, x) reaches |w - x| < y sinh r
        r_x = np.arcsinh(np.maximum(gap, 0.0) / y)
        return np.minimum(r_y, r_x)

    def min_cell_scale(self):
        y = np.exp(self.log_y)
        return float(min(self.dl, np.min(self.dx / y)))


def default_r_grid(grid, r_max=5.0, per_decade=64):
    """Log-spaced radii from the smallest cell scale up to r_max."""
    lo = 0.5 * grid.min_cell_scale()
    k = max(2, int(math.ceil(per_decade * math.log10(r_max / lo))) + 1)
    return np.geomspace(lo, r_max, k)


@dataclass(frozen=True)
class MaximalResult:
    M: np.ndarray = field(repr=False)
    M_eps: np.ndarray = field(repr=False)
    S_eps: np.ndarray = field(repr=False)
    R_arg: np.ndarray = field(repr=False)
    eps: float
    edge: np.ndarray = field(repr=False)

    @property
    def edge_fraction(self):
        return float(np.mean(self.edge))


def maximal_all(grid, values, r_grid=None, eps=0.5):
    """M, M_eps and S_eps at every cell centre, for one or several sampled functions.

    ``edge`` flags centres whose sup is attained by a ball leaving the grid box.
    """
    r_grid = default_r_grid(grid) if r_grid is None else np.asarray(r_grid, float)
    vals = np.atleast_2d(np.asarray(values, float))
    m, m_eps, s_eps, r_arg = _accel.maximal_sweep(grid.points, grid.weights, vals, r_grid, eps)
    edge = r_arg > grid.inner_radius()[None, :]
    if np.ndim(values) == 1:
        m, m_eps, s_eps, r_arg, edge = m[0], m_eps[0], s_eps[0], r_arg[0], edge[0]
    return MaximalResult(m, m_eps, s_eps, r_arg, eps, edge)


def hn_discrete_maximal(grid, values, center, r_grid=None):
    """sup over r_grid of the weighted average of values on {d(center, .) < r}."""
    r_grid = default_r_grid(grid) if r_grid is None else np.sort(np.asarray(r_grid, float))
    pts = grid.points
    w = grid.weights
    vals = np.asarray(values, float)
    d = hn_distance_array(pts[center, 0], pts[center, 1:], pts[:, 0], pts[:, 1:])
    order = np.argsort(d, kind="mergesort")
    ds = d[order]
    cw = np.cumsum(w[order])
    cf = np.cumsum(vals[order] * w[order])
    cnt = np.searchsorted(ds, r_grid, side="left")
    cnt = cnt[cnt > 0]
    if cnt.size == 0:
        return 0.0
    return float(np.max(cf[cnt - 1] / cw[cnt - 1]))


def lp_norm(grid, f, p):
    """(sum |f|^p w)^{1/p} against the grid measure."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    f = np.abs(np.asarray(f, float))
    return float(np.sum(f ** p * grid.weights) ** (1.0 / p))


def standard_suite(grid):
    """Named nonnegative test functions centred at o = (1, 0)."""
    pts = grid.points
    n = grid.n
    d = hn_distance_array(pts[:, 0], pts[:, 1:], 1.0, np.zeros(n - 1))
    spike = np.zeros(grid.size)
    spike[grid.center_index()] = 1.0
    return {
        "spike": spike,
        "ball_0.3": (d < 0.3).astype(float),
        "ball_0.8": (d < 0.8).astype(float),
        "exp_tail": np.exp(-3.0 * (n - 1) * d),
        "bump": np.where(d < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - d * d, 1e-300)), 0.0),
    }


@dataclass(frozen=True)
class OpnormReport:
    n: int
    p: float
    ratios: dict
    edge_fraction: float

    @property
    def max_ratio(self):
        return max(self.ratios.values())


def default_grid(n):
    return HalfSpaceGrid(n, nx=64 if n == 2 else 20, ny=64 if n == 2 else 24)


def empirical_opnorm(n, p, suite=None, grid=None, r_grid=None, result=None):
    """max over a suite of ||M f||_p / ||f||_p on a half-space grid.

    Pass ``result`` (from ``maximal_all`` on the same suite, keys sorted) to
    reuse one sweep for several p.
    """
    grid = grid or default_grid(n)
    suite = suite or standard_suite(grid)
    names = sorted(suite)
    vals = np.stack([suite[k] for k in names])
    res = result or maximal_all(grid, vals, r_grid)
    ratios = {k: lp_norm(grid, res.M[i], p) / lp_norm(grid, vals[i], p) for i, k in enumerate(names)}
    return OpnormReport(n, p, ratios, res.edge_fraction)


# ---------------------------------------------------------------------------
# Heisenberg spherical maximal function on H(2, 1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and weights on the unit sphere S^{dim-1} of R^dim.

    S^1 uses equispaced angles; higher spheres peel off one polar angle at a
    time with Gauss-Jacobi nodes in its cosine.
    """

    dim: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, dim, order=32):
        if dim < 2:
            raise ValueError("sphere dimension must be >= 2 (S^1 or higher)")
        nodes, weights = _sphere_rule(dim, order)
        return cls(dim, nodes, weights)

    @property
    def area(self):
        return sphere_area(self.dim)

    def average(self, values):
        return float(np.dot(self.weights, values) / self.weights.sum())


def _sphere_rule(dim, order):
    if dim == 2:
        th = 2.0 * math.pi * np.arange(order) / order
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(order, 2.0 * math.pi / order)
    a = 0.5 * (dim - 3)
    t, wt = special.roots_jacobi(order, a, a)
    sub_nodes, sub_w = _sphere_rule(dim - 1, order)
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate([np.column_stack([np.full(len(sub_w), ti), si * sub_nodes]) for ti, si in zip(t, s)])
    weights = np.concatenate([wi * sub_w for wi in wt])
    return nodes, weights


@dataclass(frozen=True)
class HeisenbergSamples:
    """Values on a regular (x1, x2, rho) box, linearly interpolated; zero outside."""

    axes: tuple = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.axes) != 3 or self.values.shape != tuple(len(a) for a in self.axes):
            raise ValueError("expected three axes matching the value array")

    @classmethod
    def from_function(cls, f, extent=(3.0, 3.0, 4.0), size=(61, 61, 81)):
        axes = tuple(np.linspace(-e, e, k) for e, k in zip(extent, size))
        mesh = np.meshgrid(*axes, indexing="ij")
        x = np.stack([mesh[0].reshape(-1), mesh[1].reshape(-1)], axis=1)
        vals = np.asarray(f(x, mesh[2].reshape(-1)), float).reshape(mesh[0].shape)
        return cls(axes, vals)

    def __call__(self, x, rho):
        interp = interpolate.RegularGridInterpolator(self.axes, self.values, bounds_error=False, fill_value=0.0)
        return interp(np.column_stack([x[:, 0], x[:, 1], rho]))


def heisenberg_spherical_maximal(descriptor, f, point, r_grid, sphere=None):
    """sup over r of the average of f((x, rho) . delta_r(theta, 0)) over theta in S^1.

    ``f`` takes (x of shape (k, 2), rho of shape (k,)); a ``HeisenbergSamples``
    instance interpolates sampled data and reads zero outside its box.
    """
    if descriptor.two_n != 2 or descriptor.m != 1:
        raise ValueError("the spherical maximal function is implemented for H(2, 1)")
    sphere = sphere or SphereQuadrature.build(2, 64)
    u = descriptor.U[0]
    x0 = np.asarray(point[0], float)
    rho0 = float(np.asarray(point[1], float).reshape(-1)[0])
    theta = sphere.nodes
    # (x0, rho0) . (r theta, 0) = (x0 + r theta, rho0 + r <x0, U theta> / 2)
    twist = theta @ (u.T @ x0)
    best = 0.0
    for r in np.asarray(r_grid, float):
        vals = f(x0[None, :] + r * theta, rho0 + 0.5 * r * twist)
        best = max(best, sphere.average(np.asarray(vals, float)))
    return best
