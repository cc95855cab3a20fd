"""Green functions (resolvent kernels) on H^n and H_c^n and their lower bounds."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .geometry import (
    _log_sinh, log_hn_volume, log_vc_volume, log_vc_volume_density,
)
from .kernels import hc_heat, hn_heat
from .quadrature import DEFAULT_QUAD, QuadratureError, quad, quad_to_infinity
from .special_fn import (
    LegendreParams, log_ball_volume, log_legendre_q, log_sphere_area,
)


def rho_sq(n):
    """Bottom of the L^2 spectrum of -Laplacian on H^n."""
    return 0.25 * (n - 1) ** 2


def rho_c_sq(n):
    """Bottom of the L^2 spectrum on H_c^n."""
    return 0.25 * n * n


@dataclass(frozen=True)
class SpectralParams:
    n: int
    lam: float
    rho_sq: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.lam > -self.rho_sq:
            raise ValueError(f"lambda = {self.lam} is not above -rho^2 = {-self.rho_sq}")

    @classmethod
    def real(cls, n, lam):
        return cls(n, lam, rho_sq(n))

    @classmethod
    def complex(cls, n, lam):
        return cls(n, lam, rho_c_sq(n))


@dataclass(frozen=True)
class AlphaParams:
    """alpha in (0, 1), with p and its conjugate when alpha = p^{-1/2}."""

    alpha: float
    p: float = float("nan")
    p_prime: float = float("nan")

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @classmethod
    def from_p(cls, p):
        if not 1 < p < 2:
            raise ValueError(f"p must lie in (1, 2), got {p}")
        return cls(p ** -0.5, p, p / (p - 1.0))

    def varpi_sq(self, rho2):
        """(1 - alpha^2) rho^2; equals rho^2/p' when alpha = p^{-1/2}."""
        return (1.0 - self.alpha ** 2) * rho2


def theta(n, lam):
    """sqrt(lam + rho^2) - 1/2."""
    r2 = rho_sq(n)
    if not lam > -r2:
        raise ValueError(f"theta needs lambda > -rho^2 = {-r2}, got {lam}")
    return math.sqrt(lam + r2) - 0.5


# ---------------------------------------------------------------------------
# H^n
# ---------------------------------------------------------------------------

def log_green_hn(n, lam, r, quad_spec=None):
    """ln G(n, lam, r) through the Legendre Q representation."""
    if n < 2:
        raise ValueError("green_hn needs n >= 2")
    if not r > 0:
        raise ValueError("green_hn needs r > 0")
    th = theta(n, lam)
    if th <= 0:
        raise ValueError(f"the Legendre route needs theta > 0 (theta = {th}); use green_hn_oracle")
    gam = 0.5 * (n - 2)
    p = LegendreParams(th, gam, math.cosh(r))
    return -0.5 * n * math.log(2.0 * math.pi) - gam * _log_sinh(r) + log_legendre_q(p, quad_spec)


def green_hn(n, lam, r, quad_spec=None):
    """Resolvent kernel (lam - Laplacian)^{-1} on H^n at distance r."""
    if n == 2 and theta(n, lam) <= 0:
        return green_hn_oracle(n, lam, r, quad_spec)
    return math.exp(log_green_hn(n, lam, r, quad_spec))


def _laplace_log_t(kernel, lam, point, quad_spec):
    # int_0^inf e^{-lam t} K(t) dt with t = e^x
    def h(x):
        t = math.exp(x)
        e = x - lam * t
        if e < -745.0:
            return 0.0
        k = kernel(t)
        return math.exp(e) * k if k > 0 else 0.0

    xs = np.linspace(-12.0, 8.0, 201)
    vals = np.array([h(x) for x in xs])
    if not vals.max() > 0:
        raise QuadratureError("Laplace integrand vanished on the sampling grid", point)
    keep = np.nonzero(vals > 1e-18 * vals.max())[0]
    lo = xs[max(keep[0] - 1, 0)]
    hi = xs[min(keep[-1] + 1, len(xs) - 1)]
    if keep[0] == 0:
        # integrand does not vanish as t -> 0; the tail below is about h(lo)
        while h(lo) > 1e-18 * vals.max() and lo > -60.0:
            lo -= 4.0
    if keep[-1] == len(xs) - 1:
        # slow decay near the bottom of the spectrum: extend the window
        hi = 8.0
        while h(hi) > 1e-18 * vals.max() and hi < 20.0:
            hi += 1.0
        if h(hi) > 1e-18 * vals.max():
            raise QuadratureError("Laplace integrand has not decayed by t = e^20", point)
    k = int(np.argmax(vals))
    pts = [xs[k] + d for d in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)]
    return quad(h, lo, hi, quad_spec, points=pts, point=point)


def green_hn_oracle(n, lam, r, quad_spec=None):
    """int_0^inf e^{-lam t} K_n(t, r) dt, computed in log t."""
    quad_spec = quad_spec or DEFAULT_QUAD
    if not lam > -rho_sq(n):
        raise ValueError("green_hn_oracle needs lambda > -rho^2")
    inner = quad_spec.with_(rel_tol=max(quad_spec.rel_tol, 1e-11))
    return _laplace_log_t(lambda t: hn_heat(n, t, r, inner), lam, {"n": n, "lam": lam, "r": r}, quad_spec)


def resolvent_identity_sides(n, lam, mu, r, quad_spec=None):
    """Both sides of R(lam) - R(mu) = (mu - lam) R(lam) R(mu) at distance r.

    The left side uses the closed form; the right side is the double Laplace
    transform int int e^{-lam t - mu s} K(t + s) ds dt done as nested quadrature.
    """
    quad_spec = quad_spec or DEFAULT_QUAD
    lhs = green_hn(n, lam, r, quad_spec) - green_hn(n, mu, r, quad_spec)
    loose = quad_spec.with_(rel_tol=max(quad_spec.rel_tol, 1e-9))
    point = {"n": n, "lam": lam, "mu": mu, "r": r}

    def inner(t):
        return quad_to_infinity(lambda s: math.exp(-mu * s) * hn_heat(n, t + s, r, loose), 0.0,
                                loose, scale=max(1.0, 1.0 / max(mu + rho_sq(n), 1e-3)), point=point)

    outer = _laplace_log_t(inner, lam, point, loose)
    return lhs, (mu - lam) * outer


def _check_admissible(alpha, rho, lo, n):
    if not (alpha * rho > lo and (1.0 - alpha) * rho >= 1.0):
        raise ValueError(f"alpha = {alpha} is not admissible for n = {n}")


def log_green_lower_bound_hn(n, alpha, r):
    rho = 0.5 * (n - 1)
    if n < 3:
        raise ValueError("the lower bound needs n >= 3")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return (-math.log(n * (n - 2.0)) - log_ball_volume(n) - (n - 2) * _log_sinh(r)
            + (2.0 * rho * (1.0 - alpha) - 2.0) * math.log(math.cosh(0.5 * r)))


def green_lower_bound_hn(n, alpha, r):
    """[n(n-2) Omega_n]^{-1} sinh(r)^{-(n-2)} cosh(r/2)^{2 rho (1-alpha) - 2}."""
    return math.exp(log_green_lower_bound_hn(n, alpha, r))


def green_lower_margin_hn(n, alpha, r, quad_spec=None):
    """ln G(n, -(1-alpha^2) rho^2, r) - ln(lower bound); >= 0 when the bound holds.

    Only admissible alpha (alpha rho > 1/2, (1 - alpha) rho >= 1) are accepted.
    """
    _check_admissible(alpha, 0.5 * (n - 1), 0.5, n)
    lam = -(1.0 - alpha ** 2) * rho_sq(n)
    return log_green_hn(n, lam, r, quad_spec) - log_green_lower_bound_hn(n, alpha, r)


def admissible_alphas_hn(n, count=8):
    """Interior alpha grid with alpha rho > 1/2 and (1 - alpha) rho > 1."""
    rho = 0.5 * (n - 1)
    lo, hi = 0.5 / rho, 1.0 - 1.0 / rho
    if not lo < hi:
        return []
    return [lo + (hi - lo) * (k + 0.5) / count for k in range(count)]


def _log_f(f_radial, r):
    fv = f_radial(r)
    if fv < 0:
        raise ValueError(f"radial profile must be nonnegative (f({r}) = {fv})")
    return math.log(fv) if fv > 0 else -math.inf


def log_resolvent_apply_radial(n, lam, f_radial, quad_spec=None, support=None, breaks=()):
    """ln ((lam - Laplacian)^{-1} f)(o) for a radial f >= 0 centred at o."""
    quad_spec = quad_spec or DEFAULT_QUAD
    lw = log_sphere_area(n)

    def log_h(r):
        if r <= 0:
            return -math.inf
        lf = _log_f(f_radial, r)
        if lf == -math.inf:
            return lf
        return lf + log_green_hn(n, lam, r, quad_spec) + lw + (n - 1) * _log_sinh(r)

    return _log_radial_integral(log_h, support, quad_spec, {"n": n, "lam": lam}, breaks)


def resolvent_apply_radial(n, lam, f_radial, quad_spec=None, support=None, breaks=()):
    """((lam - Laplacian)^{-1} f)(o) for radial f, as a 1-D integral in r."""
    return _exp(log_resolvent_apply_radial(n, lam, f_radial, quad_spec, support, breaks))


def log_s_epsilon_radial(n, epsilon, f_radial, quad_spec=None, support=None, breaks=()):
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    lw = log_sphere_area(n)

    def log_h(r):
        lf = _log_f(f_radial, r)
        if lf == -math.inf:
            return lf
        return lf + lw + (n - 1) * _log_sinh(r) - log_hn_volume(n, r, quad_spec)

    lo, hi = support or (0.0, math.inf)
    return _log_radial_integral(log_h, (max(lo, epsilon), hi), quad_spec, {"n": n, "eps": epsilon}, breaks)


def s_epsilon_radial(n, epsilon, f_radial, quad_spec=None, support=None, breaks=()):
    """int_{r >= eps} f(r) / V(r) dmu at the centre of a radial f."""
    return _exp(log_s_epsilon_radial(n, epsilon, f_radial, quad_spec, support, breaks))


def _exp(x):
    return math.exp(x) if x < 709.0 else math.inf


def _log_radial_integral(log_h, support, quad_spec, point, breaks=()):
    # integrate exp(log_h) over the support after factoring out its sampled peak
    lo, hi = support or (0.0, math.inf)
    if hi <= lo:
        return -math.inf
    if math.isinf(hi):
        xs, lv = [lo], [log_h(lo)]
        step = 0.125
        while True:
            xs.append(xs[-1] + step)
            lv.append(log_h(xs[-1]))
            top = max(lv)
            if top > -math.inf and lv[-1] < top - 45.0 and lv[-1] <= lv[-2]:
                break
            if top == -math.inf and xs[-1] > lo + 50.0:
                return -math.inf
            if xs[-1] > lo + 500.0:
                raise QuadratureError("radial integrand did not decay", point)
            step = min(2.0 * step, 1.0)
        hi = xs[-1]
    else:
        xs = np.linspace(lo, hi, 33).tolist()
        lv = [log_h(x) for x in xs]
    top = max(lv)
    if top == -math.inf:
        return -math.inf
    k = int(np.argmax(lv))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(lambda r: -log_h(r), bounds=(a, b), method="bounded")
    if np.isfinite(res.fun) and -res.fun > top:
        top = -float(res.fun)
        xs = list(xs) + [float(res.x)]
    f = lambda r: math.exp(log_h(r) - top)
    pts = [x for x in list(xs[1:-1]) + list(breaks) if lo < x < hi]
    val = quad(f, lo, hi, quad_spec, points=pts, point=point)
    return top + math.log(val) if val > 0 else -math.inf


# ---------------------------------------------------------------------------
# H_c^n
# ---------------------------------------------------------------------------

def log_green_hc(n, lam, varsigma, quad_spec=None):
    """ln of 8 * 2^{-2n} int_{s/2}^inf sinh r / sqrt(sinh^2 r - sinh^2(s/2)) G(2n+1, 4 lam, r) dr.

    With sinh r = sinh(s/2) cosh v the weight becomes sinh(s/2) cosh v / cosh r
    and the integrand decays exponentially in v.
    """
    if n < 2:
        raise ValueError("green_hc needs n >= 2")
    if not lam > -rho_c_sq(n):
        raise ValueError("green_hc needs lambda > -n^2/4")
    if not varsigma > 0:
        raise ValueError("green_hc needs varsigma > 0")
    quad_spec = quad_spec or DEFAULT_QUAD
    N = 2 * n + 1
    S = math.sinh(0.5 * varsigma)
    lS = math.log(S)

    def logf(v):
        lc = math.log(math.cosh(v))
        r = math.asinh(S * math.cosh(v))
        return log_green_hn(N, 4.0 * lam, r, quad_spec) + lS + lc - math.log(math.cosh(r))

    # the log integrand falls at least linearly in v: march until 45 nats below the top
    vs, lv = [0.0], [logf(0.0)]
    step = 0.25
    while lv[-1] > max(lv) - 45.0 and vs[-1] < 60.0:
        vs.append(vs[-1] + step)
        lv.append(logf(vs[-1]))
        step = min(2.0 * step, 2.0)
    top = max(lv)
    f = lambda v: math.exp(logf(v) - top)
    val = quad(f, 0.0, vs[-1], quad_spec, points=vs[1:-1],
               point={"n": n, "lam": lam, "varsigma": varsigma})
    return math.log(8.0) - 2 * n * math.log(2.0) + top + math.log(val)


def green_hc(n, lam, varsigma, quad_spec=None):
    """Resolvent kernel on H_c^n at distance varsigma."""
    return math.exp(log_green_hc(n, lam, varsigma, quad_spec))


def green_hc_oracle(n, lam, varsigma, quad_spec=None):
    """int_0^inf e^{-lam t} K^c_n(t, varsigma) dt."""
    quad_spec = quad_spec or DEFAULT_QUAD
    inner = quad_spec.with_(rel_tol=max(quad_spec.rel_tol, 1e-11))
    return _laplace_log_t(lambda t: hc_heat(n, t, varsigma, inner), lam,
                          {"n": n, "lam": lam, "varsigma": varsigma}, quad_spec)


def log_green_lower_bound_hc(n, alpha, varsigma):
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return (-math.log(2.0 * n * (2.0 * n - 2.0)) - 2 * n * math.log(2.0) - log_ball_volume(2 * n)
            - (2 * n - 2) * _log_sinh(0.5 * varsigma)
            + (2.0 * (1.0 - alpha) * n - 4.0) * math.log(math.cosh(0.25 * varsigma)))


def green_lower_bound_hc(n, alpha, varsigma):
    """[2n(2n-2)]^{-1} [2^{2n} Omega_{2n}]^{-1} sinh(s/2)^{-(2n-2)} cosh(s/4)^{2(1-alpha)n - 4}."""
    return math.exp(log_green_lower_bound_hc(n, alpha, varsigma))


def green_lower_margin_hc(n, alpha, varsigma, quad_spec=None):
    _check_admissible(alpha, 0.5 * n, 0.25, n)
    lam = -(1.0 - alpha ** 2) * rho_c_sq(n)
    return log_green_hc(n, lam, varsigma, quad_spec) - log_green_lower_bound_hc(n, alpha, varsigma)


def admissible_alphas_hc(n, count=8):
    rho = 0.5 * n
    lo, hi = 0.25 / rho, 1.0 - 1.0 / rho
    if not lo < hi:
        return []
    return [lo + (hi - lo) * (k + 0.5) / count for k in range(count)]


def log_resolvent_apply_radial_hc(n, lam, f_radial, quad_spec=None, support=None, breaks=()):
    quad_spec = quad_spec or DEFAULT_QUAD

    def log_h(r):
        if r <= 0:
            return -math.inf
        lf = _log_f(f_radial, r)
        if lf == -math.inf:
            return lf
        return lf + log_green_hc(n, lam, r, quad_spec) + log_vc_volume_density(n, r)

    return _log_radial_integral(log_h, support, quad_spec, {"n": n, "lam": lam}, breaks)


def resolvent_apply_radial_hc(n, lam, f_radial, quad_spec=None, support=None, breaks=()):
    return _exp(log_resolvent_apply_radial_hc(n, lam, f_radial, quad_spec, support, breaks))


def log_s_epsilon_radial_hc(n, epsilon, f_radial, quad_spec=None, support=None, breaks=()):
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    quad_spec = quad_spec or DEFAULT_QUAD

    def log_h(r):
        lf = _log_f(f_radial, r)
        if lf == -math.inf:
            return lf
        return lf + log_vc_volume_density(n, r) - log_vc_volume(n, r)

    lo, hi = support or (0.0, math.inf)
    return _log_radial_integral(log_h, (max(lo, epsilon), hi), quad_spec, {"n": n, "eps": epsilon}, breaks)


def s_epsilon_radial_hc(n, epsilon, f_radial, quad_spec=None, support=None, breaks=()):
    return _exp(log_s_epsilon_radial_hc(n, epsilon, f_radial, quad_spec, support, breaks))
