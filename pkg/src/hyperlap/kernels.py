"""Heat kernels on H^n, H_c^n and harmonic AN groups.

Odd-dimensional kernels on H^n are exact: iterating -(1/sinh r) d/dr on the
Gaussian stays inside a finite algebra of terms

    coeff * r^a * t^(-b) * cosh(w r)^c * sinh(w r)^(-d) * exp(-r^2/4t),

which ``RadialKernelExpr`` represents (w = 1, or w = 1/2 for the half-angle
operators of the AN formulas).  Even dimensions come from one descent
quadrature over the odd kernel one dimension up.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import _accel
from .quadrature import DEFAULT_QUAD, quad, quad_to_infinity
from .special_fn import log_sphere_area, odd_double_factorial

# relative cancellation level that triggers the extended-precision re-evaluation
_CANCEL = 1e-6
# stand-in for r = 0 (the terms are singular there; the sum is not)
_R_ORIGIN = 1e-12


@dataclass(frozen=True)
class RadialKernelExpr:
    """Exact term list for radial functions of (t, r).

    ``terms`` maps (a, b, c, d) to a coefficient; ``b`` is a half-integer
    (float) because the Gaussian carries t^(-1/2) factors, ``c`` and ``d`` are
    signed integers.  The whole expression is multiplied by exp(-exp_rate t).
    """

    terms: tuple
    exp_rate: float = 0.0
    half_angle: bool = False

    @property
    def w(self):
        return 0.5 if self.half_angle else 1.0

    @classmethod
    def gaussian(cls, half_angle=False):
        return cls(((0, 0.0, 0, 0, 1.0),), 0.0, half_angle)

    @staticmethod
    def _canon(acc):
        items = sorted((k, v) for k, v in acc.items() if v != 0.0)
        return tuple((a, b, c, d, v) for (a, b, c, d), v in items)

    def scale(self, factor, inv_t_pow=0.0, rate=0.0):
        """Multiply by factor * t^(-inv_t_pow) * exp(-rate t)."""
        acc = {}
        for a, b, c, d, v in self.terms:
            key = (a, b + inv_t_pow, c, d)
            acc[key] = acc.get(key, 0.0) + factor * v
        return RadialKernelExpr(self._canon(acc), self.exp_rate + rate, self.half_angle)

    def _derivative(self):
        w = self.w
        acc = {}

        def add(key, v):
            acc[key] = acc.get(key, 0.0) + v

        for a, b, c, d, v in self.terms:
            if a:
                add((a - 1, b, c, d), a * v)
            if c:
                add((a, b, c - 1, d - 1), c * w * v)
            if d:
                add((a, b, c + 1, d + 1), -d * w * v)
            add((a + 1, b + 1.0, c, d), -0.5 * v)
        return acc

    def d_same(self):
        """-(1/sinh(w r)) d/dr, with w the expression's own angle scale."""
        acc = {}
        for (a, b, c, d), v in self._derivative().items():
            key = (a, b, c, d + 1)
            acc[key] = acc.get(key, 0.0) - v
        return RadialKernelExpr(self._canon(acc), self.exp_rate, self.half_angle)

    def d_full(self):
        """-(1/sinh r) d/dr on a half-angle expression (sinh r = 2 sinh(r/2) cosh(r/2))."""
        if not self.half_angle:
            return self.d_same()
        acc = {}
        for (a, b, c, d), v in self._derivative().items():
            key = (a, b, c - 1, d + 1)
            acc[key] = acc.get(key, 0.0) - 0.5 * v
        return RadialKernelExpr(self._canon(acc), self.exp_rate, True)

    def _arrays(self):
        return _term_arrays(self.terms)

    def __call__(self, t, r):
        return self.evaluate(t, r)

    def evaluate(self, t, r):
        """Value at (t, r); scalars or broadcastable arrays."""
        coef, a, b, c, d = self._arrays()
        scalar = np.ndim(t) == 0 and np.ndim(r) == 0
        if scalar:
            r = float(r)
            if r <= 0.0:
                return self.evaluate_mp(float(t), _R_ORIGIN)
            s, s_abs = _accel.eval_terms(coef, a, b, c, d, self.w, self.exp_rate, float(t), r)
            if abs(s) < _CANCEL * s_abs or not math.isfinite(s):
                return self.evaluate_mp(float(t), r)
            return float(s)
        tt, rr = np.broadcast_arrays(np.asarray(t, float), np.asarray(r, float))
        rr = np.where(rr <= 0.0, _R_ORIGIN, rr)
        s, s_abs = _accel.eval_terms(coef, a, b, c, d, self.w, self.exp_rate, tt, rr)
        s = np.array(s, dtype=float)
        bad = (np.abs(s) < _CANCEL * s_abs) | ~np.isfinite(s)
        for idx in zip(*np.nonzero(bad)):
            s[idx] = self.evaluate_mp(float(tt[idx]), float(rr[idx]))
        return s

    def evaluate_mp(self, t, r, dps=None):
        """Extended-precision evaluation (used when the float sum cancels)."""
        # digits lost scale with the largest inverse power of r in the terms
        worst = max((d - a for a, _, _, d, _ in self.terms), default=0)
        lost = max(0.0, worst * -math.log10(max(r, 1e-300)))
        dps = dps or int(30 + lost)
        with mpmath.workdps(dps):
            t_ = mpmath.mpf(t)
            r_ = mpmath.mpf(r)
            wr = self.w * r_
            ch, sh = mpmath.cosh(wr), mpmath.sinh(wr)
            base = mpmath.exp(-r_ * r_ / (4 * t_) - self.exp_rate * t_)
            total = mpmath.mpf(0)
            for a, b, c, d, v in self.terms:
                total += mpmath.mpf(v) * r_ ** a * t_ ** (-mpmath.mpf(b)) * ch ** c / sh ** d
            return float(total * base)


@lru_cache(maxsize=256)
def _term_arrays(terms):
    coef = np.array([v for *_, v in terms], dtype=float)
    a = np.array([x[0] for x in terms], dtype=np.float64)
    b = np.array([x[1] for x in terms], dtype=np.float64)
    c = np.array([x[2] for x in terms], dtype=np.float64)
    d = np.array([x[3] for x in terms], dtype=np.float64)
    return coef, a, b, c, d


# ---------------------------------------------------------------------------
# H^n
# ---------------------------------------------------------------------------

def k1(t, r):
    """Gaussian heat kernel on the line."""
    t = np.asarray(t, float)
    out = np.exp(-np.asarray(r, float) ** 2 / (4.0 * t)) / np.sqrt(4.0 * math.pi * t)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def odd_heat_expr(n_odd):
    """Exact K_n on H^n for odd n: (2 pi)^{-j} e^{-j^2 t} (-(1/sinh r) d/dr)^j K_1."""
    if n_odd < 1 or n_odd % 2 == 0:
        raise ValueError(f"odd_heat_expr needs an odd dimension, got {n_odd}")
    j = (n_odd - 1) // 2
    e = RadialKernelExpr.gaussian()
    for _ in range(j):
        e = e.d_same()
    return e.scale((2.0 * math.pi) ** (-j) / math.sqrt(4.0 * math.pi), inv_t_pow=0.5, rate=float(j * j))


def even_heat(n_even, t, r, quad_spec=None):
    """K_n for even n by descent from the exact K_{n+1}.

    K_n(t, r) = sqrt(2) e^{(2n-1)t/4} int_r^inf K_{n+1}(t, s) sinh s / sqrt(cosh s - cosh r) ds,
    integrated in u with cosh s = cosh r + u^2.
    """
    if n_even < 2 or n_even % 2:
        raise ValueError(f"even_heat needs an even dimension, got {n_even}")
    if not t > 0:
        raise ValueError("t must be > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    expr = odd_heat_expr(n_even + 1).scale(1.0, rate=-(2 * n_even - 1) / 4.0)
    val = _descent(expr, t, r, quad_spec, {"n": n_even, "t": t, "r": r})
    return math.sqrt(2.0) * val


def _descent(expr, t, r, quad_spec, point):
    """int_r^inf expr(t, s) sinh s / sqrt(cosh s - cosh r) ds.

    cosh s = cosh r + u^2 turns the weight into 2 du; u = sinh v then keeps
    the decay exponential in v for every t.
    """
    ch = math.cosh(r)

    def f(v):
        sv = math.sinh(v)
        return 2.0 * math.cosh(v) * expr.evaluate(t, math.acosh(ch + sv * sv))

    scale = math.asinh(math.sqrt(max(math.sinh(r) * math.sqrt(t) + t, 1e-3)))
    return quad_to_infinity(f, 0.0, quad_spec, scale=scale, point=point)


def k2_direct(t, r, quad_spec=None):
    """K_2 from its direct integral, using an algebraic-weight rule at s = r.

    sqrt(2) (4 pi t)^{-3/2} e^{-t/4} int_r^inf s e^{-s^2/4t} / sqrt(cosh s - cosh r) ds
    """
    from scipy import integrate

    quad_spec = quad_spec or DEFAULT_QUAD
    ch = math.cosh(r)

    def g(s):
        # s e^{-s^2/4t} (s - r)^{1/2} / sqrt(cosh s - cosh r), regular at s = r
        if s == r:
            return r * math.exp(-r * r / (4.0 * t)) / math.sqrt(math.sinh(r)) if r > 0 else 0.0
        return s * math.exp(-s * s / (4.0 * t)) * math.sqrt((s - r) / (math.cosh(s) - ch))

    L = max(1.0, 12.0 * math.sqrt(t))
    head, _ = integrate.quad(g, r, r + L, weight="alg", wvar=(-0.5, 0.0),
                             epsabs=quad_spec.abs_tol, epsrel=quad_spec.rel_tol, limit=quad_spec.max_subdivisions)
    tail_f = lambda s: s * math.exp(-s * s / (4.0 * t)) / math.sqrt(math.cosh(s) - ch)
    tail = quad_to_infinity(tail_f, r + L, quad_spec, scale=L)
    return math.sqrt(2.0) * (4.0 * math.pi * t) ** -1.5 * math.exp(-t / 4.0) * (head + tail)


def hn_heat(n, t, r, quad_spec=None):
    """Heat kernel K_n(t, r) on H^n."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not t > 0:
        raise ValueError("t must be > 0")
    if n == 1:
        return k1(t, r)
    if n % 2:
        return odd_heat_expr(n).evaluate(t, r)
    return even_heat(n, t, r, quad_spec)


def hn_heat_mass(n, t, quad_spec=None):
    """int_0^inf K_n(t, r) omega_{n-1} sinh^{n-1} r dr."""
    quad_spec = quad_spec or DEFAULT_QUAD
    lw = log_sphere_area(n)

    def f(r):
        if r <= 0:
            return 0.0
        return hn_heat(n, t, r, quad_spec) * math.exp(lw + (n - 1) * math.log(math.sinh(r)))

    # mass concentrates around r ~ (n-1) t + sqrt(t)
    peak = (n - 1) * t + 2.0 * math.sqrt(t)
    return quad_to_infinity(f, 0.0, quad_spec, scale=peak, points=[0.5 * peak, peak],
                            point={"n": n, "t": t})


# ---------------------------------------------------------------------------
# Sturm-Liouville semigroup on R^+ with measure v^{-alpha-1} dv
# ---------------------------------------------------------------------------

def sl_kernel(alpha, t, y, v):
    """(4 pi t)^{-1/2} (yv)^{alpha/2} e^{-alpha^2 t/4} e^{-ln^2(v/y)/4t}."""
    if not alpha > 1 or not t > 0:
        raise ValueError("sl_kernel needs alpha > 1 and t > 0")
    y, v = np.asarray(y, float), np.asarray(v, float)
    if np.any(y <= 0) or np.any(v <= 0):
        raise ValueError("sl_kernel needs y, v > 0")
    lg = np.log(v / y)
    log_val = (-0.5 * math.log(4.0 * math.pi * t) + 0.5 * alpha * (np.log(y) + np.log(v))
               - 0.25 * alpha * alpha * t - lg * lg / (4.0 * t))
    out = np.exp(log_val)
    return float(out) if out.ndim == 0 else out


def sl_apply(alpha, t, f, y, quad_spec=None):
    """(e^{t L_alpha} f)(y) by quadrature in u = ln(v/y).

    In u the kernel times v^{-alpha-1} dv becomes a Gaussian of variance 2t
    centred at -alpha t, so f only needs to be sampled near there.
    """
    quad_spec = quad_spec or DEFAULT_QUAD
    sd = math.sqrt(2.0 * t)
    mu = -alpha * t
    ly = math.log(y)

    def g(u):
        w = math.exp(-((u - mu) ** 2) / (4.0 * t))
        if w == 0.0:
            return 0.0
        # keep v = y e^u inside the positive finite doubles
        return w * f(math.exp(min(max(ly + u, -745.0), 709.0)))

    lo, hi = mu - 40.0 * sd, mu + 40.0 * sd
    pts = [mu + k * sd for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8)]
    val = quad(g, lo, hi, quad_spec, points=pts, point={"alpha": alpha, "t": t, "y": y})
    return val / math.sqrt(4.0 * math.pi * t)


# ---------------------------------------------------------------------------
# complex hyperbolic space
# ---------------------------------------------------------------------------

def hc_heat(n, t, r, quad_spec=None):
    """K^c_n(t, r) = 2^{-2n} int_r^inf sinh(s/2)/sqrt(sinh^2(s/2)-sinh^2(r/2)) K_{2n+1}(t/4, s/2) ds.

    With sinh^2(s/2) = sinh^2(r/2) + u^2 the integrand becomes
    2 K_{2n+1}(t/4, s/2) / cosh(s/2) du.
    """
    if n < 1:
        raise ValueError("hc_heat needs n >= 1")
    if not t > 0:
        raise ValueError("t must be > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    expr = odd_heat_expr(2 * n + 1)
    sh2 = math.sinh(0.5 * r) ** 2

    def f(v):
        # u = sinh v keeps the decay exponential in v
        sv = math.sinh(v)
        half = math.asinh(math.sqrt(sh2 + sv * sv))
        return 2.0 * math.cosh(v) * expr.evaluate(0.25 * t, half) / math.cosh(half)

    scale = math.asinh(math.sqrt(max(math.sinh(0.5 * r) * math.sqrt(t) + t, 1e-3)))
    val = quad_to_infinity(f, 0.0, quad_spec, scale=scale, point={"n": n, "t": t, "r": r})
    return 2.0 ** (-2 * n) * val


def hc_heat_mass(n, t, quad_spec=None):
    from .geometry import vc_volume_density

    quad_spec = quad_spec or DEFAULT_QUAD
    f = lambda r: hc_heat(n, t, r, quad_spec) * vc_volume_density(n, r) if r > 0 else 0.0
    peak = n * t + 2.0 * math.sqrt(t)
    return quad_to_infinity(f, 0.0, quad_spec, scale=peak, points=[0.5 * peak, peak],
                            point={"n": n, "t": t})


def half_angle_identity(n, t, s):
    """Both sides of (-(1/sinh(s/2)) d/ds)^n [(pi t)^{-1/2} e^{-s^2/4t}] = pi^n e^{n^2 t/4} K_{2n+1}(t/4, s/2)."""
    e = RadialKernelExpr.gaussian(half_angle=True)
    for _ in range(n):
        e = e.d_same()
    lhs = e.scale(1.0 / math.sqrt(math.pi), inv_t_pow=0.5).evaluate(t, s)
    rhs = math.pi ** n * math.exp(n * n * t / 4.0) * odd_heat_expr(2 * n + 1).evaluate(t / 4.0, s / 2.0)
    return lhs, rhs


# ---------------------------------------------------------------------------
# AN groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CkjTable:
    k_max: int
    entries: tuple  # entries[k-1][j-1] = C(k, j)

    def __call__(self, k, j):
        if not (1 <= j <= k <= self.k_max):
            raise IndexError(f"C({k}, {j}) outside the table (k_max={self.k_max})")
        return self.entries[k - 1][j - 1]


@lru_cache(maxsize=16)
def ckj_table(k_max):
    """C(k, j), 1 <= j <= k <= k_max, from C(k+1, j) = (2k - j) C(k, j) + C(k, j-1)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    rows = [[1]]
    for k in range(1, k_max):
        prev = rows[-1]
        row = []
        for j in range(1, k + 2):
            cur = prev[j - 1] if j <= k else 0
            left = prev[j - 2] if j >= 2 else 0
            row.append((2 * k - j) * cur + left)
        rows.append(row)
    table = CkjTable(k_max, tuple(tuple(r) for r in rows))
    for k in range(2, k_max + 1):
        assert table(k, 1) == odd_double_factorial(k)
    return table


@lru_cache(maxsize=64)
def an_operator_expr(n, k):
    """(-(1/sinh r) d/dr)^k (-(1/sinh(r/2)) d/dr)^n e^{-r^2/4t}, by direct differentiation."""
    e = RadialKernelExpr.gaussian(half_angle=True)
    for _ in range(n):
        e = e.d_same()
    for _ in range(k):
        e = e.d_full()
    return e


@lru_cache(maxsize=64)
def _half_power_expr(p):
    e = RadialKernelExpr.gaussian(half_angle=True)
    for _ in range(p):
        e = e.d_same()
    return e


def an_operator_expansion(n, k, t, r):
    """The same operator power through the C(k, j) sum of half-angle powers."""
    table = ckj_table(k)
    two_c = 2.0 * math.cosh(0.5 * r)
    total = 0.0
    for j in range(1, k + 1):
        total += table(k, j) * two_c ** (j - k) * _half_power_expr(n + j).evaluate(t, r)
    return two_c ** (-k) * total


def an_lower_bound_sides(n, k, t, r):
    """Operator power and its single-term lower bound via K_{2(n+k)+1}(t/4, r/2)."""
    lhs = an_operator_expr(n, k).evaluate(t, r)
    rhs = (math.sqrt(math.pi * t) * (2.0 * math.cosh(0.5 * r)) ** (-k) * math.pi ** (n + k)
           * math.exp((n + k) ** 2 * t / 4.0) * odd_heat_expr(2 * (n + k) + 1).evaluate(t / 4.0, r / 2.0))
    return lhs, rhs


def an_heat(dims, t, r, quad_spec=None):
    """Heat kernel K^{(2n, m)}(t, r) on the AN group over H(2n, m)."""
    from .geometry import _an_dims

    two_n, m = _an_dims(dims)
    if not t > 0:
        raise ValueError("t must be > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    n = two_n // 2
    Q = n + m
    if m % 2 == 0:
        pref = 2.0 ** (-two_n - 0.5 * m - 1.0) * math.pi ** (-(two_n + m + 1) / 2.0)
        expr = an_operator_expr(n, m // 2).scale(pref, inv_t_pow=0.5, rate=Q * Q / 4.0)
        return expr.evaluate(t, r)
    expr = an_operator_expr(n, (m + 1) // 2)
    pref = 2.0 ** (-two_n - 0.5 * m - 1.0) * math.pi ** (-(two_n + m + 2) / 2.0)
    expr = expr.scale(pref, inv_t_pow=0.5, rate=Q * Q / 4.0)
    return _descent(expr, t, r, quad_spec, {"dims": (two_n, m), "t": t, "r": r})


def an_heat_mass(dims, t, quad_spec=None):
    from .geometry import an_volume_density, _an_dims

    two_n, m = _an_dims(dims)
    quad_spec = quad_spec or DEFAULT_QUAD
    f = lambda r: an_heat((two_n, m), t, r, quad_spec) * an_volume_density((two_n, m), r) if r > 0 else 0.0
    Q = two_n // 2 + m
    peak = Q * t + 2.0 * math.sqrt(t)
    return quad_to_infinity(f, 0.0, quad_spec, scale=peak, points=[0.5 * peak, peak],
                            point={"dims": (two_n, m), "t": t})
