"""One-dimensional quadrature used by every integral in the package.

Adaptive Gauss-Kronrod from scipy does the work; this module adds the
endpoint substitutions, the deterministic truncation of infinite ranges and
error reporting that carries the offending parameter point.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

SUBSTITUTIONS = ("none", "sqrt", "sin")


class QuadratureError(RuntimeError):
    """Raised when an integral does not reach its tolerance."""

    def __init__(self, message, point=None):
        if point:
            message = f"{message} at {point}"
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-300
    max_subdivisions: int = 400
    endpoint_substitution: str = "sqrt"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.endpoint_substitution not in SUBSTITUTIONS:
            raise ValueError(f"endpoint_substitution must be one of {SUBSTITUTIONS}")

    def with_(self, **kw):
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in ("rel_tol", "abs_tol", "max_subdivisions", "endpoint_substitution") if k in d})

    def to_dict(self):
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_subdivisions": self.max_subdivisions,
            "endpoint_substitution": self.endpoint_substitution,
        }


DEFAULT_QUAD = QuadratureSpec()


def quad(f, a, b, spec=DEFAULT_QUAD, points=None, point=None):
    """Integrate ``f`` over the finite interval [a, b]."""
    if b == a:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b]
        points = sorted(set(points)) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, points=points, full_output=1,
        )[:3]
    if not np.isfinite(val):
        raise QuadratureError("non-finite integral", point)
    tol = max(spec.abs_tol, spec.rel_tol * abs(val))
    # roundoff/limit flags are tolerated when the error estimate is still small
    if err > 100.0 * tol and err > 1e-13 * abs(val):
        raise QuadratureError(f"quadrature did not converge (est. error {err:.3g}, value {val:.6g})", point)
    return val


def quad_endpoint(f, a, b, spec=DEFAULT_QUAD, side="right", points=None, point=None):
    """Integrate over [a, b] after regularizing an endpoint.

    ``sqrt``: x = b - u^2 (or a + u^2 for ``side="left"``); ``sin``:
    x = a + (b - a) sin^2(theta), which smooths both ends; ``none``: direct.
    """
    kind = spec.endpoint_substitution
    if kind == "none":
        return quad(f, a, b, spec, points=points, point=point)
    if kind == "sqrt":
        L = math.sqrt(b - a)
        if side == "right":
            g = lambda u: 2.0 * u * f(b - u * u)
            pts = None if points is None else [math.sqrt(b - p) for p in points if a < p < b]
        else:
            g = lambda u: 2.0 * u * f(a + u * u)
            pts = None if points is None else [math.sqrt(p - a) for p in points if a < p < b]
        return quad(g, 0.0, L, spec, points=pts, point=point)
    h = b - a
    g = lambda th: h * math.sin(2.0 * th) * f(a + h * math.sin(th) ** 2)
    pts = None if points is None else [math.asin(math.sqrt((p - a) / h)) for p in points if a < p < b]
    return quad(g, 0.0, 0.5 * math.pi, spec, points=pts, point=point)


def quad_to_infinity(f, a, spec=DEFAULT_QUAD, scale=1.0, points=None, point=None, max_doublings=60):
    """Integrate ``f`` over [a, inf) by truncation with interval doubling.

    The upper limit starts at ``a + scale`` and doubles until the integrand
    falls below ``1e-3 * rel_tol`` relative to its peak on the sampled points;
    the result is accepted once two consecutive truncations agree.
    """
    b = a + scale
    peak = abs(f(a + 0.5 * scale))
    for _ in range(max_doublings):
        fb = abs(f(b))
        peak = max(peak, fb)
        if fb <= max(spec.abs_tol, 1e-3 * spec.rel_tol * peak):
            break
        b = a + 2.0 * (b - a)
    else:
        raise QuadratureError("integrand did not decay on [a, inf)", point)
    prev = quad(f, a, b, spec, points=points, point=point)
    for _ in range(max_doublings):
        b2 = a + 2.0 * (b - a)
        cur = prev + quad(f, b, b2, spec, point=point)
        if abs(cur - prev) <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return cur
        prev, b = cur, b2
    raise QuadratureError("truncated integrals did not stabilize", point)


def trapezoid(f, a, b, nodes):
    """Composite trapezoid rule with a vectorized integrand (oracle use)."""
    x = np.linspace(a, b, nodes)
    return float(np.trapezoid(f(x), x)) if hasattr(np, "trapezoid") else float(np.trapz(f(x), x))
