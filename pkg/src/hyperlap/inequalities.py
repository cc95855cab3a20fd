"""Elementary extremal functions, threshold calculators and verification scans.

Everything here is a measurement: constants that only need to exist (c_o,
C_*, c(A), C(A)) are produced by explicit scans and persisted with the grid
that produced them, see ``hyperlap.fixtures``.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import (
    HTypeDescriptor, _log_sinh, hn_volume_sandwich, log_hn_volume, log_vc_volume, region_volume,
)
from .green import (
    AlphaParams, log_green_hc, log_green_hn, log_resolvent_apply_radial,
    log_resolvent_apply_radial_hc, log_s_epsilon_radial, log_s_epsilon_radial_hc, rho_c_sq, rho_sq,
)
from .kernels import sl_apply
from .maximal import euclid_ball_average, euclid_maximal_radial
from .quadrature import DEFAULT_QUAD, quad
from .special_fn import log_ball_volume

# ---------------------------------------------------------------------------
# F_beta and its maximizer
# ---------------------------------------------------------------------------

_SERIES_CUT = 0.5


def _sinh_excess(x):
    """A(x) = sinh^2 x - x^2, by its series for small x."""
    if x > _SERIES_CUT:
        return math.sinh(x) ** 2 - x * x
    x2 = x * x
    # sum_{k >= 2} 2^{2k-1} x^{2k} / (2k)!
    term = 8.0 * x2 * x2 / 24.0
    out = term
    k = 2
    while term > 1e-18 * out:
        term *= 4.0 * x2 / ((2 * k + 1) * (2 * k + 2))
        out += term
        k += 1
    return out


def _sinhc_excess(x):
    """B(x) = sinh(x)/x - 1."""
    if x > _SERIES_CUT:
        return math.sinh(x) / x - 1.0
    x2 = x * x
    term = x2 / 6.0
    out = term
    k = 1
    while term > 1e-18 * out:
        term *= x2 / ((2 * k + 2) * (2 * k + 3))
        out += term
        k += 1
    return out


def _c_diff(beta, s):
    # C(beta) - C(s) with C(x) = A(x)/x^2, termwise for small arguments
    if beta > _SERIES_CUT:
        cs = _sinh_excess(s) / (s * s) if s > 0 else 0.0
        return _sinh_excess(beta) / (beta * beta) - cs
    b2, s2 = beta * beta, s * s
    out = 0.0
    coef = 8.0 / 24.0
    pb, ps = b2, s2
    k = 2
    while True:
        term = coef * (pb - ps)
        out += term
        if abs(term) <= 1e-18 * abs(out):
            return out
        coef *= 4.0 / ((2 * k + 1) * (2 * k + 2))
        pb *= b2
        ps *= s2
        k += 1


def _log1p_plus(y):
    """log(1 - y) + y without cancellation."""
    if y < 1e-3:
        out, term, k = 0.0, y * y, 2
        while term > 1e-20 * max(abs(out), 1e-300):
            out -= term / k
            term *= y
            k += 1
        return out
    return math.log1p(-y) + y


def f_beta(beta, s):
    """(s/beta)^2 + ln(1 - sinh^2 s / sinh^2 beta), accurate at O(beta^4)."""
    if not beta > 0:
        raise ValueError("f_beta needs beta > 0")
    if not 0 <= s < beta:
        raise ValueError(f"f_beta needs 0 <= s < beta, got s = {s}")
    if s == 0:
        return 0.0
    x = (s / beta) ** 2
    cb = _sinh_excess(beta) / (beta * beta)
    one_minus_q = _c_diff(beta, s) / (1.0 + cb)
    y = x * (1.0 - one_minus_q)
    if y >= 1.0:
        return -math.inf
    return x * one_minus_q + _log1p_plus(y)


def f_beta_slope_sign(beta, s):
    """Sign-equivalent numerator of F'_beta(s): A(beta) - s^2 - A(s) - beta^2 B(2s)."""
    return _sinh_excess(beta) - s * s - _sinh_excess(s) - beta * beta * _sinhc_excess(2.0 * s)


@dataclass(frozen=True)
class FBetaResult:
    beta: float
    s_o: float
    sup_value: float

    def __post_init__(self):
        if not 0 < self.s_o < self.beta:
            raise ValueError("maximizer must lie in (0, beta)")


def s_o_solve(beta, tol=1e-14, max_iter=2000):
    """Maximizer of F_beta by bisection on the sign of F'_beta.

    ``tol`` is relative to the bracket's upper end, which keeps the answer
    meaningful when s_o ~ beta^2 is tiny.
    """
    if not beta > 0:
        raise ValueError("s_o_solve needs beta > 0")
    lo, hi = 0.0, beta
    g_hi = f_beta_slope_sign(beta, hi * (1.0 - 1e-12))
    if not g_hi < 0:
        raise ValueError(f"no sign change of F' on (0, {beta})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f_beta_slope_sign(beta, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    s_o = 0.5 * (lo + hi)
    if not s_o > 0:
        raise ValueError(f"no interior maximizer found for beta = {beta}")
    return FBetaResult(beta, s_o, f_beta(beta, s_o))


@dataclass(frozen=True)
class CoCalibration:
    c_o: float
    c_fit: float
    betas: tuple
    ratios: tuple
    fallback: bool = False


def calibrate_c_o(k_min=1, k_max=14, fallback=0.05):
    """Largest dyadic beta with sup F_beta <= 2 c_fit beta^4.

    ``c_fit`` is the ratio sup F/beta^4 at the smallest scanned beta, where
    the quartic law is sharpest.
    """
    betas, ratios = [], []
    for k in range(k_min, k_max + 1):
        b = 2.0 ** -k
        try:
            res = s_o_solve(b)
        except ValueError:
            betas.append(b)
            ratios.append(math.nan)
            continue
        betas.append(b)
        ratios.append(res.sup_value / b ** 4)
    c_fit = ratios[-1]
    c_o = None
    for b, q in zip(betas, ratios):
        if math.isfinite(q) and q > 0 and q <= 2.0 * c_fit:
            c_o = b
            break
    used_fallback = c_o is None
    return CoCalibration(fallback if used_fallback else c_o, c_fit, tuple(betas), tuple(ratios), used_fallback)


def f_beta_scan(c_o, k_max=14):
    """Rows (beta, s_o, sup F, sup F/beta^4, s_o/(beta^2/sqrt 3)) for dyadic beta <= c_o."""
    rows = []
    b = c_o
    while b >= 2.0 ** -k_max * (1 - 1e-12):
        res = s_o_solve(b)
        rows.append((b, res.s_o, res.sup_value, res.sup_value / b ** 4,
                     res.s_o / (b * b / math.sqrt(3.0))))
        b *= 0.5
    return rows


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------

def log_cosh(s):
    s = abs(s)
    if s > 20.0:
        return s - math.log(2.0) + math.log1p(math.exp(-2.0 * s))
    return math.log1p(2.0 * math.sinh(0.5 * s) ** 2)


def phi(s):
    """ln(cosh s)/s^2, extended by 1/2 at 0."""
    if s < 0:
        raise ValueError("phi needs s >= 0")
    if s < 1e-3:
        s2 = s * s
        return 0.5 - s2 / 12.0 + s2 * s2 / 45.0 - 17.0 * s2 ** 3 / 2520.0
    return log_cosh(s) / (s * s)


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

def _phi_const(p, at, power):
    return (at * phi(at) * (1.0 - p ** -0.5)) ** (-power)


def _sqrt_log_ratio(rho):
    return math.sqrt(math.log(rho) / rho)


def n_of_p(p, n_min=100, n_max=10 ** 8):
    """Smallest n >= 100 with K sqrt(ln rho / rho) < 1/2, rho = (n-1)/2."""
    k = _phi_const(p, 0.5, 0.5)
    return _first_n(lambda n: k * _sqrt_log_ratio(0.5 * (n - 1)) < 0.5, n_min, n_max)


def n_of_p_complex(p, n_min=100, n_max=10 ** 8):
    """Same threshold on H_c^n: exponent -1/4 on the Phi(1/4) constant, rho_c = n/2."""
    k = _phi_const(p, 0.25, 0.25)
    return _first_n(lambda n: k * _sqrt_log_ratio(0.5 * n) < 0.5, n_min, n_max)


def _first_n(pred, n_min, n_max):
    # ln(rho)/rho is decreasing for rho > e, so the predicate is monotone in n
    if pred(n_min):
        return n_min
    lo, hi = n_min, n_min
    while not pred(hi):
        lo, hi = hi, 2 * hi
        if hi > n_max:
            raise ValueError("threshold scan exceeded n_max")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def eps_floor(p, n):
    """Smallest admissible eps_o for the H^n part-at-infinity estimate."""
    return _phi_const(p, 0.5, 0.5) * _sqrt_log_ratio(0.5 * (n - 1))


def eps_floor_complex(p, n):
    return _phi_const(p, 0.25, 0.5) * _sqrt_log_ratio(0.5 * n)


def r_star(p, n, power=1.0):
    """Radius split; ``power=1`` is the displayed bracket exponent, 0.5 the variant."""
    return _phi_const(p, 0.5, power) * _sqrt_log_ratio(0.5 * (n - 1))


def n_star(p, c_o, power=0.5, n_min=100, n_max=10 ** 15):
    """Smallest n_* >= 100 such that K rt(n) <= (n-1)^{-1/4} <= 2 c_o for every n >= n_*.

    For rho = (n-1)/2 > e^2 the ratio K sqrt(ln rho/rho) / (n-1)^{-1/4} decreases
    in n, and (n-1)^{-1/4} does too, so "for every n >= n_*" reduces to the
    first n where both hold.
    """
    k = _phi_const(p, 0.5, power)

    def ok(n):
        quarter = (n - 1.0) ** -0.25
        return k * _sqrt_log_ratio(0.5 * (n - 1)) <= quarter <= 2.0 * c_o

    return _first_n(ok, n_min, n_max)


def n_of_a(A, c_o, n_min=100, n_max=10 ** 12):
    """Smallest n >= 100 with A (n-1)^{-1/4} / 2 <= c_o."""
    if not A > 0:
        raise ValueError("A must be > 0")
    return _first_n(lambda n: 0.5 * A * (n - 1) ** -0.25 <= c_o, n_min, n_max)


@dataclass(frozen=True)
class Thresholds:
    p: float
    A: float
    c_o: float
    n_p: int
    eps_lower: float
    alpha: float
    binding: str
    n_star_p: int
    r_star_half: float
    n_star_rstar: int
    r_star: float
    n_A: int
    checks: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def thresholds(p, A, c_o):
    """Threshold calculator for one (p, A, c_o).

    ``eps_lower`` is evaluated at n(p); ``r_star_half`` (bracket exponent
    -1/2) at n*(p); ``r_star`` (exponent -1) at the smallest n beyond which
    it satisfies the same sandwich.
    """
    ap = AlphaParams.from_p(p)
    n_p = n_of_p(p)
    rho = 0.5 * (n_p - 1)
    eps = eps_floor(p, n_p)
    conds = {
        "phi_threshold": eps < 0.5,
        "alpha_rho_gt_half": ap.alpha * rho > 0.5,
        "one_minus_alpha_rho_ge_1": (1.0 - ap.alpha) * rho >= 1.0,
    }
    # which condition is the last to switch on as n grows
    switch = {
        "phi_threshold": n_p,
        "alpha_rho_gt_half": _first_n(lambda n: ap.alpha * 0.5 * (n - 1) > 0.5, 2, 10 ** 9),
        "one_minus_alpha_rho_ge_1": _first_n(lambda n: (1.0 - ap.alpha) * 0.5 * (n - 1) >= 1.0, 2, 10 ** 9),
    }
    binding = max(switch, key=switch.get)
    ns = n_star(p, c_o, 0.5)
    ns_r = n_star(p, c_o, 1.0)
    n_a = n_of_a(A, c_o)
    r_half = r_star(p, ns, 0.5)
    r_full = r_star(p, ns_r, 1.0)
    checks = dict(conds)
    checks["eps_lower_lt_1"] = eps < 1.0
    checks["r_star_half_sandwich"] = r_half <= (ns - 1) ** -0.25 <= 2.0 * c_o
    checks["r_star_sandwich"] = r_full <= (ns_r - 1) ** -0.25 <= 2.0 * c_o
    checks["n_A_condition"] = 0.5 * A * (n_a - 1) ** -0.25 <= c_o
    return Thresholds(p, A, c_o, n_p, eps, ap.alpha, binding, ns, r_half, ns_r, r_full, n_a, checks)


# ---------------------------------------------------------------------------
# part at infinity: S_eps f <= const * resolvent(|f|)
# ---------------------------------------------------------------------------

def calibrate_c_star(ns=None, rs=None, quad_spec=None):
    """C_* = max of max(ratio, 1/ratio) for the volume sandwich on a grid."""
    if ns is None:
        ns = list(range(2, 61)) + [2 ** k for k in range(6, 13)]
    if rs is None:
        rs = np.geomspace(0.01, 10.0, 61)
    worst, arg = 1.0, None
    for n in ns:
        for r in rs:
            q = hn_volume_sandwich(n, float(r), quad_spec)
            w = max(q, 1.0 / q)
            if w > worst:
                worst, arg = w, (n, float(r))
    return worst, arg


@dataclass(frozen=True)
class RadialTest:
    """A nonnegative radial profile with its support and kinks."""

    name: str
    f: object = field(repr=False)
    support: tuple = (0.0, math.inf)
    breaks: tuple = ()


def radial_suite(eps, decay):
    """Five radial test profiles; ``decay`` sets the exponential tail rate."""

    def bump(r, a=0.5 * eps, b=3.0):
        if not a < r < b:
            return 0.0
        u = (2.0 * r - a - b) / (b - a)
        return math.exp(1.0 - 1.0 / (1.0 - u * u))

    return [
        RadialTest("shell_near", lambda r: 1.0 if eps <= r <= 2 * eps else 0.0, (eps, 2 * eps)),
        RadialTest("shell_far", lambda r: 1.0 if 1.0 <= r <= 2.0 else 0.0, (1.0, 2.0)),
        RadialTest("ball", lambda r: 1.0 if r <= 3.0 else 0.0, (0.0, 3.0), (eps,)),
        RadialTest("bump", bump, (0.5 * eps, 3.0), (eps,)),
        RadialTest("tail", lambda r: math.exp(-decay * abs(r - eps)), (0.0, math.inf), (eps,)),
    ]


@dataclass(frozen=True)
class DominationResult:
    n: int
    p: float
    eps: float
    constant: float
    kernel_worst: float
    kernel_argmax: float
    empirical_constant: float
    margins: dict

    @property
    def passed(self):
        return self.kernel_worst <= 0.0 and all(m >= 0 for m in self.margins.values())


def _kernel_scan(log_ratio, eps, r_max):
    rs = np.concatenate([np.linspace(eps, min(1.0, r_max), 41), np.geomspace(max(1.0, eps), r_max, 25)[1:]])
    vals = np.array([log_ratio(float(r)) for r in rs])
    k = int(np.argmax(vals))
    return float(vals[k]), float(rs[k])


def far_domination_hn(p, c_star, n=None, eps=None, suite=None, quad_spec=None, r_max=20.0):
    """S_eps f(o) <= 8 C_* n (n-2) R(-rho^2/p') f(o) for a radial suite.

    Returns log margins ln(RHS/LHS) per test profile plus the pointwise
    kernel comparison 1/V(r) vs 8 C_* n(n-2) G(r) on r >= eps (``kernel_worst``
    is the largest log ratio, <= 0 when dominated).  ``empirical_constant``
    is the smallest K with 1/V <= K n(n-2) G on the scanned radii.
    """
    # log G reaches ~1e3 at these n, so ~1e-10 relative noise is the floor
    quad_spec = quad_spec or DEFAULT_QUAD.with_(rel_tol=1e-8)
    n = n or n_of_p(p)
    eps = eps or eps_floor(p, n)
    if not 0 < eps < 1:
        raise ValueError(f"eps = {eps} is not in (0, 1) at n = {n}")
    lam = -rho_sq(n) / AlphaParams.from_p(p).p_prime
    log_c = math.log(8.0 * c_star * n * (n - 2))

    def log_ratio(r):
        return -log_hn_volume(n, r, quad_spec) - log_c - log_green_hn(n, lam, r, quad_spec)

    worst, arg = _kernel_scan(log_ratio, eps, r_max)
    emp = 8.0 * c_star * math.exp(worst)
    suite = suite or radial_suite(eps, decay=float(n - 1))
    margins = {}
    for t in suite:
        ls = log_s_epsilon_radial(n, eps, t.f, quad_spec, t.support, t.breaks)
        lr = log_resolvent_apply_radial(n, lam, t.f, quad_spec, t.support, t.breaks)
        margins[t.name] = log_c + lr - ls
    return DominationResult(n, p, eps, 8.0 * c_star, worst, arg, emp, margins)


def n_of_p_complex_floor(p):
    """n(p) on H_c^n, raised until the eps floor drops below 1."""
    n = n_of_p_complex(p)
    while eps_floor_complex(p, n) >= 1.0:
        n += 1
    return n


def far_domination_hc(p, n=None, eps=None, suite=None, quad_spec=None, constant=100.0, r_max=12.0):
    """S_eps f(o) <= constant * 2n(2n-2) R_c(-rho_c^2/p') f(o) on H_c^n.

    ``empirical_constant`` reports the smallest K with
    1/V_c <= K 2n(2n-2) G_c on the scanned radii, to compare with ``constant``.
    """
    quad_spec = quad_spec or DEFAULT_QUAD.with_(rel_tol=1e-7)
    n = n or n_of_p_complex_floor(p)
    eps = eps or eps_floor_complex(p, n)
    if not 0 < eps < 1:
        raise ValueError(f"eps = {eps} is not in (0, 1) at n = {n}")
    lam = -rho_c_sq(n) / AlphaParams.from_p(p).p_prime
    log_base = math.log(2.0 * n * (2.0 * n - 2.0))
    log_c = math.log(constant) + log_base

    def log_ratio(r):
        return -log_vc_volume(n, r) - log_base - log_green_hc(n, lam, r, quad_spec)

    rs = np.concatenate([np.linspace(eps, 1.0, 9), np.geomspace(1.0, r_max, 7)[1:]])
    vals = [log_ratio(float(r)) for r in rs]
    k = int(np.argmax(vals))
    emp = math.exp(vals[k])
    full = radial_suite(eps, decay=float(2 * n))
    suite = suite if suite is not None else [full[0], full[3]]
    margins = {}
    for t in suite:
        ls = log_s_epsilon_radial_hc(n, eps, t.f, quad_spec, t.support, t.breaks)
        lr = log_resolvent_apply_radial_hc(n, lam, t.f, quad_spec, t.support, t.breaks)
        margins[t.name] = log_c + lr - ls
    return DominationResult(n, p, eps, constant, vals[k] - math.log(constant), float(rs[k]), emp, margins)


# ---------------------------------------------------------------------------
# micro-local part on H^n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductTest:
    """f(v, w) = phi(v) psi(|w|) on R^+ x R^{n-1}, probed at (y, x) with |x| = t.

    ``psi=None`` means psi = 1.
    """

    name: str
    phi: object = field(repr=False)
    psi: object = field(default=None, repr=False)
    t: float = 0.0
    psi_breaks: tuple = ()
    phi_breaks: tuple = ()


def product_suite():
    """Five product test functions; all but the constant put their mass off (1, x)."""
    return [
        ProductTest("one", lambda v: 1.0),
        ProductTest("phi_window", lambda v: 1.0 if 1.15 <= v <= 1.4 else 0.0, phi_breaks=(1.15, 1.4)),
        ProductTest("phi_lognormal", lambda v: math.exp(-16.0 * math.log(v / 1.3) ** 2)),
        ProductTest("psi_ring", lambda v: 1.0, lambda s: 1.0 if 0.2 <= s <= 0.3 else 0.0,
                    psi_breaks=(0.2, 0.3)),
        ProductTest("mixed", lambda v: 1.0 if 0.8 <= v <= 1.0 else 0.0,
                    lambda s: math.exp(-100.0 * s * s), t=0.25, phi_breaks=(0.8, 1.0)),
    ]


def microlocal_ball_average(n, y, t, r, test, quad_spec=None):
    """Average of f = phi(v) psi(|w|) over the H^n ball of radius r about (y, x), |x| = t.

    With v = y e^u the slice radius is R(u) = y e^{u/2} sqrt(2(cosh r - cosh u)), and
    the measure restricted to the ball is proportional to e^{-(n-1)u/2} R^{n-1} y^{1-n} du.
    """
    quad_spec = quad_spec or DEFAULT_QUAD
    d = n - 1
    ch = math.cosh(r)
    log_top = 0.5 * d * math.log(2.0 * (ch - 1.0))

    def weight(u):
        gap = 2.0 * (ch - math.cosh(u))
        if gap <= 0:
            return 0.0
        return math.exp(-0.5 * d * u + 0.5 * d * math.log(gap) - log_top)

    def inner(u):
        if test.psi is None:
            return 1.0
        R = y * math.exp(0.5 * u) * math.sqrt(max(2.0 * (ch - math.cosh(u)), 0.0))
        if R <= 0:
            return test.psi(t)
        return euclid_ball_average(d, test.psi, t, R, quad_spec, test.psi_breaks)

    pts = [math.log(b / y) for b in test.phi_breaks if -r < math.log(b / y) < r] + [0.0]
    num = quad(lambda u: test.phi(y * math.exp(u)) * inner(u) * weight(u), -r, r, quad_spec, points=pts,
               point={"n": n, "r": r, "test": test.name})
    den = quad(weight, -r, r, quad_spec, points=[0.0], point={"n": n, "r": r})
    return num / den


@dataclass(frozen=True)
class MicrolocalRow:
    n: int
    test: str
    lhs: float
    rhs_raw: float
    s_argmax: float
    edge: bool


def microlocal_row(n, A, test, y=1.0, quad_spec=None, r_count=24, s_grid=None):
    """LHS = sup_{r < eps_o} ball average; RHS_raw = sup_s e^{sL}(M_eucl f(., x))(y)."""
    t = test.t
    quad_spec = quad_spec or DEFAULT_QUAD.with_(rel_tol=1e-8)
    eps = min(0.999, (A / (n - 1)) ** 0.25)
    rs = np.geomspace(1e-3 * eps, eps, r_count, endpoint=False)
    lhs = max(microlocal_ball_average(n, y, t, float(r), test, quad_spec) for r in rs)
    m_psi = 1.0 if test.psi is None else euclid_maximal_radial(
        n - 1, test.psi, t, quad_spec, np.geomspace(1e-4, 10.0, 161), test.psi_breaks)
    if s_grid is None:
        s_grid = np.geomspace(1e-4, 1e2, 64)
    vals = [sl_apply(n - 1, float(s), test.phi, y, quad_spec) for s in s_grid]
    k = int(np.argmax(vals))
    rhs = m_psi * vals[k]
    return MicrolocalRow(n, test.name, lhs, rhs, float(s_grid[k]), k in (0, len(s_grid) - 1))


def microlocal_scan(A, ns=(5, 9, 17), suite=None, quad_spec=None):
    suite = suite or product_suite()
    return [microlocal_row(n, A, t, quad_spec=quad_spec) for n in ns for t in suite]


def calibrate_c_a(rows):
    """c(A) = max LHS / RHS_raw over a scan."""
    return max(r.lhs / r.rhs_raw for r in rows)


def microlocal_margin(n, A, test, c_a, y=1.0, quad_spec=None):
    """c(A) RHS_raw / LHS - 1 for one product test function (>= 0 when dominated)."""
    row = microlocal_row(n, A, test, y, quad_spec)
    return c_a * row.rhs_raw / row.lhs - 1.0


# ---------------------------------------------------------------------------
# region volume shape on H_c^n
# ---------------------------------------------------------------------------

def region_bound_terms(n, a, h, r, quad_spec=None):
    """(LHS, RHS/C(A)) for one sample; n indexes H_c^n, so N = H(2(n-1), 1)."""
    d = HTypeDescriptor.heisenberg(n - 1)
    tau = math.log(h / a)
    log_lhs = (math.log(region_volume(d, a, h, r, quad_spec)) - log_ball_volume(2 * n)
               - (2 * n - 1) * (math.log(2.0) + _log_sinh(0.5 * r)))
    log_rhs = (0.5 * math.log(n - 1) + 0.5 * n * math.log(a * h) - (n - 1) * tau * tau / (r * r)
               - n * n * r * r / (16.0 * (n - 1)))
    return math.exp(log_lhs), math.exp(log_rhs)


def region_bound_samples(n, A, count=100, seed=0):
    """Deterministic (a, h, r) samples with |ln(h/a)| < r <= A (n - 1/2)^{-1/4}."""
    rng = np.random.Generator(np.random.Philox(key=[seed, n]))
    r_max = A * (n - 0.5) ** -0.25
    r = r_max * rng.uniform(0.05, 1.0, count)
    tau = r * rng.uniform(-0.98, 0.98, count)
    a = np.exp(rng.uniform(math.log(0.5), math.log(2.0), count))
    return [(float(ai), float(ai * math.exp(ti)), float(ri)) for ai, ti, ri in zip(a, tau, r)]


def region_bound_check(n, A, samples=None, quad_spec=None):
    """max over samples of LHS / (RHS / C(A)); finite values certify the shape."""
    samples = samples or region_bound_samples(n, A)
    worst = 0.0
    for a, h, r in samples:
        lhs, rhs = region_bound_terms(n, a, h, r, quad_spec)
        worst = max(worst, lhs / rhs)
    return worst

