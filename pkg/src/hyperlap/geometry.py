"""Points, group laws, distances, balls and volumes.

Covers the half-space model of H^n, H-type groups R^{2n} x R^m with their
AN extensions R^+ x N (the complex hyperbolic space being R^+ x H(2(n-1), 1)).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import DEFAULT_QUAD, quad, quad_endpoint
from .special_fn import (
    ball_volume, log_ball_volume, log_gamma, log_sphere_area, sphere_area,
)

_ORTHO_TOL = 1e-12


# ---------------------------------------------------------------------------
# H^n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HnPoint:
    y: float
    x: tuple = ()

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"HnPoint needs y > 0, got {self.y}")
        object.__setattr__(self, "x", tuple(float(v) for v in np.atleast_1d(self.x)) if np.size(self.x) else ())

    @property
    def dim(self):
        return len(self.x) + 1


def hn_distance(p, q):
    """Hyperbolic distance in the upper half-space model."""
    if p.dim != q.dim:
        raise ValueError("points live in different dimensions")
    dx2 = sum((a - b) ** 2 for a, b in zip(p.x, q.x))
    arg = (p.y * p.y + q.y * q.y + dx2) / (2.0 * p.y * q.y)
    return math.acosh(max(arg, 1.0))


def hn_distance_array(y, x, v, w):
    """Vectorized distance; ``x`` and ``w`` have the horizontal axis last."""
    y, v = np.asarray(y, float), np.asarray(v, float)
    dx2 = np.sum((np.asarray(x, float) - np.asarray(w, float)) ** 2, axis=-1)
    arg = (y * y + v * v + dx2) / (2.0 * y * v)
    return np.arccosh(np.maximum(arg, 1.0))


def _log_sinh(s):
    # ln sinh s, finite for large s
    if s > 20.0:
        return s - math.log(2.0) + math.log1p(-math.exp(-2.0 * s))
    return math.log(math.sinh(s))


def log_hn_volume(n, r, quad_spec=None):
    """ln V(r) for the hyperbolic ball of radius r in H^n."""
    if n < 2 or not r > 0:
        raise ValueError("hn_volume needs n >= 2 and r > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    k = n - 1
    top = _log_sinh(r)
    # the integrand exp(k (ln sinh s - ln sinh r)) is concentrated near s = r
    width = math.tanh(r) / k if r < 20 else 1.0 / k
    f = lambda s: math.exp(k * (_log_sinh(s) - top)) if s > 0 else 0.0
    pts = [r - c * width for c in (1.0, 4.0, 16.0, 64.0) if r - c * width > 0]
    integral = quad(f, 0.0, r, quad_spec, points=pts, point={"n": n, "r": r})
    return log_sphere_area(n) + k * top + math.log(integral)


def hn_volume(n, r, quad_spec=None):
    """V(r) = omega_{n-1} int_0^r sinh^{n-1}(s) ds."""
    return math.exp(log_hn_volume(n, r, quad_spec))


def hn_volume_density(n, r):
    return math.exp(log_sphere_area(n) + (n - 1) * _log_sinh(r)) if r > 0 else 0.0


def log_psi(n, r):
    """ln of sinh^{n-1}(r) min(1, sinh r)."""
    ls = _log_sinh(r)
    return (n - 1) * ls + min(0.0, ls)


def hn_volume_sandwich(n, r, quad_spec=None):
    """V(r) / (Omega_n Psi(r)); bounded above and below uniformly in (n, r)."""
    return math.exp(log_hn_volume(n, r, quad_spec) - log_ball_volume(n) - log_psi(n, r))


# ---------------------------------------------------------------------------
# H-type groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HTypeDescriptor:
    """Dimensions (2n, m) and the structure matrices U^(1..m)."""

    two_n: int
    m: int
    U: tuple = field(repr=False)

    def __post_init__(self):
        if self.two_n < 2 or self.two_n % 2:
            raise ValueError(f"two_n must be an even integer >= 2, got {self.two_n}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        mats = tuple(np.array(u, dtype=float) for u in self.U)
        if len(mats) != self.m:
            raise ValueError(f"expected {self.m} structure matrices, got {len(mats)}")
        eye = np.eye(self.two_n)
        for j, u in enumerate(mats):
            if u.shape != (self.two_n, self.two_n):
                raise ValueError(f"U^({j + 1}) has shape {u.shape}, expected {(self.two_n, self.two_n)}")
            if np.max(np.abs(u + u.T)) > _ORTHO_TOL:
                raise ValueError(f"U^({j + 1}) is not skew-symmetric")
            if np.max(np.abs(u.T @ u - eye)) > _ORTHO_TOL:
                raise ValueError(f"U^({j + 1}) is not orthogonal")
        for i in range(self.m):
            for j in range(i + 1, self.m):
                if np.max(np.abs(mats[i] @ mats[j] + mats[j] @ mats[i])) > _ORTHO_TOL:
                    raise ValueError(f"U^({i + 1}) and U^({j + 1}) do not anticommute")
        for u in mats:
            u.setflags(write=False)
        object.__setattr__(self, "U", mats)

    @property
    def n(self):
        return self.two_n // 2

    @property
    def Q(self):
        return self.n + self.m

    @property
    def stack(self):
        return np.stack(self.U)

    def bracket(self, x, w):
        """<x, U w> as an m-vector."""
        return np.einsum("i,jik,k->j", np.asarray(x, float), self.stack, np.asarray(w, float))

    def to_dict(self):
        return {"two_n": self.two_n, "m": self.m, "U": [u.tolist() for u in self.U]}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(int(d["two_n"]), int(d["m"]), tuple(d["U"]))
        except KeyError as exc:
            raise ValueError(f"descriptor is missing field {exc}") from None

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def heisenberg(cls, k):
        """H(2k, 1): block-diagonal quarter turns, so <x, Uw> = Im <x, w> on C^k."""
        u = np.zeros((2 * k, 2 * k))
        for i in range(k):
            u[2 * i, 2 * i + 1] = -1.0
            u[2 * i + 1, 2 * i] = 1.0
        return cls(2 * k, 1, (u,))

    @classmethod
    def quaternionic(cls, k, m=3):
        """H(4k, m), m <= 3, from left multiplication by i, j, k on H^k."""
        if not 1 <= m <= 3:
            raise ValueError("quaternionic descriptors have 1 <= m <= 3")
        li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
        lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
        lk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], float)
        blocks = [np.kron(np.eye(k), b) for b in (li, lj, lk)[:m]]
        return cls(4 * k, m, tuple(blocks))


def radon_hurwitz(two_n):
    """rho(2n) = 8p + 2^q where 2n = (2l+1) 2^{4p+q}, 0 <= q <= 3."""
    if two_n < 1:
        raise ValueError("dimension must be positive")
    e = 0
    while two_n % 2 == 0:
        two_n //= 2
        e += 1
    p, q = divmod(e, 4)
    return 8 * p + 2 ** q


def kecman_admissible(two_n, m):
    """Whether m anticommuting complex structures can exist on R^{2n}."""
    return m < radon_hurwitz(two_n)


@dataclass(frozen=True)
class HTypePoint:
    x: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        rho = np.array(self.rho, dtype=float).reshape(-1)
        x.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "rho", rho)

    def check(self, d):
        if self.x.shape[0] != d.two_n or self.rho.shape[0] != d.m:
            raise ValueError(
                f"point has dims ({self.x.shape[0]}, {self.rho.shape[0]}), descriptor ({d.two_n}, {d.m})"
            )
        return self


def htype_identity(d):
    return HTypePoint(np.zeros(d.two_n), np.zeros(d.m))


def htype_mul(d, p, q):
    """(x, rho) . (w, u) = (x + w, rho + u + <x, U w>/2)."""
    p.check(d)
    q.check(d)
    return HTypePoint(p.x + q.x, p.rho + q.rho + 0.5 * d.bracket(p.x, q.x))


def htype_inv(p):
    return HTypePoint(-p.x, -p.rho)


def htype_dilate(p, r):
    if not r > 0:
        raise ValueError("dilation factor must be > 0")
    return HTypePoint(r * p.x, r * r * p.rho)


@dataclass(frozen=True)
class ANPoint:
    a: float
    n_part: HTypePoint

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"ANPoint needs a > 0, got {self.a}")


def an_identity(d):
    return ANPoint(1.0, htype_identity(d))


def an_mul(d, g, h):
    """(a, n) . (b, n') = (ab, n . delta_{sqrt a} n')."""
    return ANPoint(g.a * h.a, htype_mul(d, g.n_part, htype_dilate(h.n_part, math.sqrt(g.a))))


def an_inv(g):
    return ANPoint(1.0 / g.a, htype_dilate(htype_inv(g.n_part), 1.0 / math.sqrt(g.a)))


def _cosh_dist_to_identity(a, x2, rho2):
    q = 0.25 * x2
    return (q * q + rho2 + 1.0 + a * a + 0.5 * x2 * (1.0 + a)) / (2.0 * a)


def an_distance(d, g, h):
    """d(g, h) = d(g^{-1} h, e) with the closed form for cosh d(., e)."""
    k = an_mul(d, an_inv(g), h)
    arg = _cosh_dist_to_identity(k.a, float(k.n_part.x @ k.n_part.x), float(k.n_part.rho @ k.n_part.rho))
    return math.acosh(max(arg, 1.0))


@dataclass(frozen=True)
class BallSpec:
    center: object
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius must be > 0, got {self.radius}")


def ball_contains(d, b, xi):
    """Membership in the open ball through the slab and region conditions."""
    g, r = b.center, b.radius
    a, h = g.a, xi.a
    ratio = h / a
    if not (math.exp(-r) < ratio < math.exp(r)):
        return False
    x, rho = g.n_part.x, g.n_part.rho
    w, u = xi.n_part.x, xi.n_part.rho
    dx2 = float((x - w) @ (x - w))
    vert = (u - rho - 0.5 * d.bracket(x, w)) / a
    lhs = dx2 / (2.0 * a) * (1.0 + ratio) + dx2 * dx2 / (16.0 * a * a) + float(vert @ vert)
    return lhs < 2.0 * ratio * math.cosh(r) - (1.0 + ratio * ratio)


def kappa(a, h, r):
    """2 (h/a) cosh r - (1 + h^2/a^2), positive on the open slab."""
    ratio = h / a
    if not (math.exp(-r) < ratio < math.exp(r)):
        raise ValueError(f"h/a = {ratio} is outside the slab (e^-{r}, e^{r})")
    return 2.0 * ratio * math.cosh(r) - (1.0 + ratio * ratio)


def _region_terms(a, h, r):
    k = kappa(a, h, r)
    P = 1.0 + h / a
    S = math.sqrt(k + P * P)
    # S - P computed without cancellation
    return k, P, S, k / (S + P)


def region_volume(d, a, h, r, quad_spec=None):
    """|delta_sqrt(a)(E_{kappa, h/a})| for the AN group over H(2(n-1), 1).

    With v = |w|^2/4 the region volume reduces to

        2 a^n omega_{2n-3} 2^{2n-3} int_0^{S-P} v^{n-2} sqrt((S-P-v)(S+P+v)) dv,

    S = sqrt(kappa + P^2), P = 1 + h/a; v = (S-P) sin^2(theta) removes the
    square-root endpoint.
    """
    if d.m != 1:
        raise ValueError("region_volume is defined for m = 1 descriptors")
    quad_spec = quad_spec or DEFAULT_QUAD
    n = d.n + 1
    k, P, S, D = _region_terms(a, h, r)
    e = n - 2
    f = lambda v: (v / D) ** e * math.sqrt(max((D - v) * (S + P + v), 0.0))
    integral = quad_endpoint(f, 0.0, D, quad_spec.with_(endpoint_substitution="sin"),
                             point={"a": a, "h": h, "r": r})
    log_vol = (math.log(2.0) + n * math.log(a) + log_sphere_area(2 * n - 2)
               + (2 * n - 3) * math.log(2.0) + e * math.log(D) + math.log(integral))
    return math.exp(log_vol)


def region_volume_bound(d, a, h, r):
    """Closed upper bound for region_volume from the square-root estimate."""
    n = d.n + 1
    k, P, S, D = _region_terms(a, h, r)
    log_b = (log_gamma(n + 1.0) - math.log(2.0 * math.sqrt(math.pi)) - log_gamma(n + 0.5)
             + 2 * n * math.log(2.0) + log_ball_volume(2 * n) + n * math.log(a)
             + (n - 0.5) * math.log(D) + 0.25 * math.log(S * S))
    return math.exp(log_b)


def region_volume_mc(d, a, h, r, samples=10_000_000, seed=0, chunk=1_000_000):
    """Rejection-sampling estimate of region_volume (oracle)."""
    n = d.n + 1
    k, P, S, D = _region_terms(a, h, r)
    dim_w = 2 * (n - 1)
    wmax = 2.0 * math.sqrt(D)
    umax = math.sqrt(k)
    rng = np.random.Generator(np.random.Philox(key=seed))
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        w = rng.uniform(-wmax, wmax, size=(m, dim_w))
        u = rng.uniform(-umax, umax, size=m)
        w2 = np.einsum("ij,ij->i", w, w)
        hits += int(np.count_nonzero(0.5 * w2 * P + w2 * w2 / 16.0 + u * u < k))
        done += m
    box = (2.0 * wmax) ** dim_w * 2.0 * umax
    return a ** n * box * hits / samples


# ---------------------------------------------------------------------------
# volumes on complex hyperbolic space and AN groups
# ---------------------------------------------------------------------------

def log_vc_volume(n, r):
    if n < 2 or not r > 0:
        raise ValueError("vc_volume needs n >= 2 and r > 0")
    return 2 * n * math.log(2.0) + log_ball_volume(2 * n) + 2 * n * _log_sinh(0.5 * r)


def vc_volume(n, r):
    """Ball volume 2^{2n} Omega_{2n} sinh^{2n}(r/2) on H_c^n."""
    return math.exp(log_vc_volume(n, r))


def log_vc_volume_density(n, r):
    return ((2 * n - 1) * math.log(2.0) + log_sphere_area(2 * n)
            + (2 * n - 1) * _log_sinh(0.5 * r) + math.log(math.cosh(0.5 * r)))


def vc_volume_density(n, r):
    """d/dr of vc_volume."""
    return math.exp(log_vc_volume_density(n, r))


def _an_dims(dims):
    if isinstance(dims, HTypeDescriptor):
        return dims.two_n, dims.m
    two_n, m = dims
    if two_n < 2 or two_n % 2 or m < 1:
        raise ValueError(f"invalid H-type dimensions {dims}")
    return int(two_n), int(m)


def an_volume_density(dims, r):
    two_n, m = _an_dims(dims)
    k = two_n + m
    return math.exp(k * math.log(2.0) + log_sphere_area(k + 1)
                    + k * _log_sinh(0.5 * r) + m * math.log(math.cosh(0.5 * r)))


def log_an_volume(dims, r, quad_spec=None):
    two_n, m = _an_dims(dims)
    if not r > 0:
        raise ValueError("an_volume needs r > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    k = two_n + m
    top = k * _log_sinh(0.5 * r) + m * math.log(math.cosh(0.5 * r))

    def f(s):
        if s <= 0:
            return 0.0
        return math.exp(k * _log_sinh(0.5 * s) + m * math.log(math.cosh(0.5 * s)) - top)

    width = 2.0 * math.tanh(0.5 * r) / k
    pts = [r - c * width for c in (1.0, 4.0, 16.0) if r - c * width > 0]
    integral = quad(f, 0.0, r, quad_spec, points=pts, point={"dims": (two_n, m), "r": r})
    return k * math.log(2.0) + log_sphere_area(k + 1) + top + math.log(integral)


def an_volume(dims, r, quad_spec=None):
    """2^{2n+m} omega_{2n+m} int_0^r sinh^{2n+m}(s/2) cosh^m(s/2) ds."""
    return math.exp(log_an_volume(dims, r, quad_spec))


def an_volume_sandwich(dims, r, quad_spec=None):
    """an_volume over 2^{2n+m+1} Omega_{2n+m+1} sinh^{2n+m+1}(r/2) cosh^{m-1}(r/2)."""
    two_n, m = _an_dims(dims)
    k = two_n + m
    ref = ((k + 1) * math.log(2.0) + log_ball_volume(k + 1)
           + (k + 1) * _log_sinh(0.5 * r) + (m - 1) * math.log(math.cosh(0.5 * r)))
    return math.exp(log_an_volume((two_n, m), r, quad_spec) - ref)


__all__ = [
    "HnPoint", "HTypeDescriptor", "HTypePoint", "ANPoint", "BallSpec",
    "hn_distance", "hn_distance_array", "hn_volume", "log_hn_volume", "hn_volume_density",
    "hn_volume_sandwich", "log_psi", "radon_hurwitz", "kecman_admissible",
    "htype_identity", "htype_mul", "htype_inv", "htype_dilate",
    "an_identity", "an_mul", "an_inv", "an_distance", "ball_contains", "kappa",
    "region_volume", "region_volume_bound", "region_volume_mc",
    "vc_volume", "log_vc_volume", "vc_volume_density",
    "an_volume", "log_an_volume", "an_volume_density", "an_volume_sandwich",
    "sphere_area", "ball_volume",
]
