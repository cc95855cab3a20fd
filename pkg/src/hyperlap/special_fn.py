"""Gamma-family functions, sphere/ball constants and the Legendre Q function."""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_QUAD, QuadratureError, quad, quad_endpoint

# Lanczos approximation, g = 671/128 with 14 coefficients
# (Numerical Recipes, 3rd ed., gammln).
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005


def log_gamma(x):
    """ln Gamma(x) for real x > 0."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x}")
    if x < 0.5:
        # the series is tuned for x >= 1/2; shift up once
        return log_gamma(x + 1.0) - math.log(x)
    tmp = x + _LANCZOS_G
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = x
    for c in _LANCZOS_COEF:
        y += 1.0
        ser += c / y
    return tmp + math.log(_SQRT_2PI * ser / x)


def log_sphere_area(n):
    """ln omega_{n-1}, the area of the unit sphere of R^n."""
    if n < 1:
        raise ValueError("sphere_area needs n >= 1")
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - log_gamma(0.5 * n)


def sphere_area(n):
    """omega_{n-1} = 2 pi^{n/2} / Gamma(n/2)."""
    return math.exp(log_sphere_area(n))


def log_ball_volume(n):
    if n < 1:
        raise ValueError("ball_volume needs n >= 1")
    return 0.5 * n * math.log(math.pi) - log_gamma(0.5 * n + 1.0)


def ball_volume(n):
    """Omega_n = pi^{n/2} / Gamma(n/2 + 1)."""
    return math.exp(log_ball_volume(n))


def odd_double_factorial(k):
    """(2k - 3)!! for k >= 2, as an exact integer."""
    if k < 2:
        raise ValueError("odd_double_factorial needs k >= 2")
    out = 1
    for j in range(2 * k - 3, 0, -2):
        out *= j
    return out


def log_beta(a, b):
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


@dataclass(frozen=True)
class LegendreParams:
    """Degree ``eta``, order ``gamma`` and argument ``z = cosh r``."""

    eta: float
    gamma: float
    z: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"Legendre degree must be > 0, got {self.eta}")
        if self.gamma < 0:
            raise ValueError(f"Legendre order must be >= 0, got {self.gamma}")
        if not self.z > 1:
            raise ValueError(f"Legendre argument must be > 1, got {self.z}")


def _legendre_log_integrand(p):
    expo = p.gamma - p.eta - 1.0
    z = p.z

    def logf(t):
        # z + cos t, written to keep accuracy near t = pi when z is close to 1
        base = (z - 1.0) + 2.0 * math.cos(0.5 * t) ** 2
        s = math.sin(t)
        if s <= 0.0:
            return -math.inf
        return expo * math.log(base) + (2.0 * p.eta + 1.0) * math.log(s)

    return logf


def _log_legendre_grid(p, t):
    base = (p.z - 1.0) + 2.0 * np.cos(0.5 * t) ** 2
    with np.errstate(divide="ignore"):
        return (p.gamma - p.eta - 1.0) * np.log(base) + (2.0 * p.eta + 1.0) * np.log(np.sin(t))


def _log_legendre_integral(p, quad_spec):
    logf = _legendre_log_integrand(p)
    # the log integrand is concave on (0, pi): bracket the peak on a grid,
    # then refine by golden section and integrate exp(logf - peak)
    ts = np.linspace(0.0, math.pi, 257)[1:-1]
    vals = _log_legendre_grid(p, ts)
    k = int(np.argmax(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    phi = 0.5 * (math.sqrt(5.0) - 1.0)
    for _ in range(40):
        m1 = hi - phi * (hi - lo)
        m2 = lo + phi * (hi - lo)
        if logf(m1) < logf(m2):
            lo = m1
        else:
            hi = m2
    t_peak = 0.5 * (lo + hi)
    peak = max(logf(t_peak), vals[k])
    # breakpoints at the peak and at its curvature width
    n_eff = abs(p.gamma - p.eta - 1.0) + 2.0 * p.eta + 1.0
    width = min(math.pi / 4, 4.0 / math.sqrt(max(n_eff, 1.0)))
    f = lambda t: math.exp(logf(t) - peak)
    pts = [t_peak - 2 * width, t_peak - width, t_peak, t_peak + width, t_peak + 2 * width]
    pts = [x for x in pts if 0.0 < x < math.pi]
    # split at pi/2 so the endpoint substitution only sees the right half
    mid = 0.5 * math.pi
    point = {"eta": p.eta, "gamma": p.gamma, "z": p.z}
    left = quad(f, 0.0, mid, quad_spec, points=[x for x in pts if x < mid], point=point)
    right = quad_endpoint(f, mid, math.pi, quad_spec, side="right", points=[x for x in pts if x > mid], point=point)
    total = left + right
    if not total > 0:
        raise QuadratureError("Legendre integral is not positive", point)
    return peak + math.log(total)


def log_legendre_q(p, quad_spec=None):
    """ln of the real value e^{-i pi gamma} Q_eta^gamma(z) (see ``legendre_q``)."""
    quad_spec = quad_spec or DEFAULT_QUAD
    sinh_r = math.sqrt((p.z - 1.0) * (p.z + 1.0))
    return (
        -(p.eta + 1.0) * math.log(2.0)
        + log_gamma(p.eta + p.gamma + 1.0) - log_gamma(p.eta + 1.0)
        - p.gamma * math.log(sinh_r)
        + _log_legendre_integral(p, quad_spec)
    )


def legendre_q(p, quad_spec=None):
    """Legendre function of the second kind via its integral representation.

    Returns the real number

        2^{-eta-1} Gamma(eta+gamma+1)/Gamma(eta+1) (sinh r)^{-gamma}
            * int_0^pi (cosh r + cos t)^{gamma-eta-1} (sin t)^{2 eta + 1} dt

    with ``z = cosh r``; this is Q_eta^gamma(cosh r) with its e^{-i pi gamma}
    phase folded in.  Gamma ratios and the integral are handled in log space.
    """
    return math.exp(log_legendre_q(p, quad_spec))


def legendre_q_trapezoid(p, nodes=1_000_000):
    """Plain trapezoid evaluation of the same integral (independent oracle)."""
    t = np.linspace(0.0, math.pi, nodes)
    with np.errstate(divide="ignore"):
        g = (p.z + np.cos(t)) ** (p.gamma - p.eta - 1.0) * np.sin(t) ** (2.0 * p.eta + 1.0)
    integral = float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(t)))
    sinh_r = math.sqrt(p.z * p.z - 1.0)
    pref = 2.0 ** (-p.eta - 1.0) * math.gamma(p.eta + p.gamma + 1.0) / math.gamma(p.eta + 1.0)
    return pref * sinh_r ** (-p.gamma) * integral
