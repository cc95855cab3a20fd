"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``HYPERLAP_DISABLE_JIT`` is
unset (or "0").  Both paths implement the same contract and are checked
against each other in the test suite; ``benchmarks/bench_accel.py`` times
them side by side.
"""

import math
import os
import warnings

import numpy as np


def _jit_requested():
    return os.environ.get("HYPERLAP_DISABLE_JIT", "0").strip().lower() in ("", "0", "false", "no")


try:
    import numba

    HAS_NUMBA = True
    # an old system TBB only disables that layer; numba falls back on its own
    warnings.filterwarnings("ignore", message="The TBB threading layer")
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and _jit_requested()

_NJIT_OPTS = dict(cache=True, nogil=True, fastmath=False, error_model="numpy")


# ---------------------------------------------------------------------------
# radial term sums
#
# A term is coeff * r^a * t^(-b) * cosh(w r)^c * sinh(w r)^(-d) * exp(-r^2/4t - rate t)
# evaluated in log space; returns (signed sum, sum of absolute values) so the
# caller can detect cancellation.
# ---------------------------------------------------------------------------

def _terms_numpy(coef, a, b, c, d, w, rate, t, r):
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    tt, rr = np.broadcast_arrays(t, r)
    shape = tt.shape
    tt = tt.reshape(-1)
    rr = rr.reshape(-1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lr = np.log(rr)[:, None]
        lt = np.log(tt)[:, None]
        wr = w * rr
        # log cosh / log sinh that stay finite for large arguments
        lc = (wr + np.log1p(np.exp(-2.0 * wr)) - math.log(2.0))[:, None]
        ls = (wr + np.log1p(-np.exp(-2.0 * wr)) - math.log(2.0))[:, None]
        base = (-(rr * rr) / (4.0 * tt) - rate * tt)[:, None]
        # r^0 must stay 1 at r == 0
        ar = np.where(a[None, :] == 0, 0.0, a[None, :] * lr)
        logs = np.log(np.abs(coef))[None, :] + ar - b[None, :] * lt + c[None, :] * lc - d[None, :] * ls + base
        vals = np.exp(logs)
    signed = (np.sign(coef)[None, :] * vals).sum(axis=1)
    absum = vals.sum(axis=1)
    return signed.reshape(shape), absum.reshape(shape)


if HAS_NUMBA:

    @numba.njit(**_NJIT_OPTS)
    def _terms_scalar_jit(coef, a, b, c, d, w, rate, t, r):
        lr = math.log(r) if r > 0.0 else -np.inf
        lt = math.log(t)
        wr = w * r
        lc = wr + math.log1p(math.exp(-2.0 * wr)) - math.log(2.0)
        if wr > 0.0:
            ls = wr + math.log1p(-math.exp(-2.0 * wr)) - math.log(2.0)
        else:
            ls = -np.inf
        base = -(r * r) / (4.0 * t) - rate * t
        s = 0.0
        s_abs = 0.0
        for k in range(coef.shape[0]):
            la = 0.0 if a[k] == 0 else a[k] * lr
            lg = math.log(abs(coef[k])) + la - b[k] * lt + c[k] * lc - d[k] * ls + base
            v = math.exp(lg)
            s_abs += v
            s += v if coef[k] > 0 else -v
        return s, s_abs

    @numba.njit(**_NJIT_OPTS)
    def _terms_array_jit(coef, a, b, c, d, w, rate, t, r):
        n = t.shape[0]
        out = np.empty(n)
        out_abs = np.empty(n)
        for i in range(n):
            out[i], out_abs[i] = _terms_scalar_jit(coef, a, b, c, d, w, rate, t[i], r[i])
        return out, out_abs


def eval_terms(coef, a, b, c, d, w, rate, t, r):
    """Signed and absolute sums of the radial term list at (t, r)."""
    if USE_JIT:
        if np.ndim(t) == 0 and np.ndim(r) == 0:
            return _terms_scalar_jit(coef, a, b, c, d, float(w), float(rate), float(t), float(r))
        tt, rr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
        s, s_abs = _terms_array_jit(coef, a, b, c, d, float(w), float(rate),
                                    np.ascontiguousarray(tt).reshape(-1), np.ascontiguousarray(rr).reshape(-1))
        return s.reshape(tt.shape), s_abs.reshape(tt.shape)
    s, s_abs = _terms_numpy(coef, a, b, c, d, w, rate, t, r)
    if s.ndim == 0:
        return float(s), float(s_abs)
    return s, s_abs


# ---------------------------------------------------------------------------
# discrete maximal sweep on half-space grids
#
# points: (N, n) rows (y, x_1, ..., x_{n-1}); weights: (N,); values: (F, N)
# returns M over r_grid, M_eps over every distinct radius < eps, S_eps and
# the radius attaining M, each (F, N).  Both paths sort on cosh d, built from
# correctly rounded arithmetic only, so ties are bit-identical; radii enter
# as cosh r.
# ---------------------------------------------------------------------------

def _hn_cosh_row(points, i):
    y = points[i, 0]
    v = points[:, 0]
    # accumulate column by column, in the same order as the jit loop, so
    # both paths see bit-identical distances and therefore identical ties
    dx2 = np.zeros_like(v)
    for k in range(1, points.shape[1]):
        diff = points[:, k] - points[i, k]
        dx2 = dx2 + diff * diff
    return np.maximum((y * y + v * v + dx2) / (2.0 * y * v), 1.0)


def _sweep_center_numpy(d, weights, values, r_grid, eps):
    order = np.argsort(d, kind="mergesort")
    ds = d[order]
    ws = weights[order]
    fw = values[:, order] * ws[None, :]
    cw = np.cumsum(ws)
    cf = np.cumsum(fw, axis=1)
    n = ds.shape[0]
    # end index of each tie group (closed balls)
    last = np.empty(n, dtype=np.int64)
    is_end = np.ones(n, dtype=bool)
    is_end[:-1] = ds[1:] > ds[:-1]
    ends = np.nonzero(is_end)[0]
    group = np.searchsorted(ends, np.arange(n), side="left")
    last[:] = ends[group]

    cnt = np.searchsorted(ds, r_grid, side="left")
    valid = cnt > 0
    cnt = cnt[valid]
    if cnt.size:
        avg = cf[:, cnt - 1] / cw[cnt - 1][None, :]
        k = avg.argmax(axis=1)
        m = avg[np.arange(avg.shape[0]), k]
        arg = r_grid[valid][k]
    else:
        m = np.zeros(values.shape[0])
        arg = np.zeros(values.shape[0])

    loc = ends[ds[ends] < eps]
    if loc.size:
        m_eps = (cf[:, loc] / cw[loc][None, :]).max(axis=1)
    else:
        m_eps = np.zeros(values.shape[0])

    far = ds >= eps
    if far.any():
        s_eps = (fw[:, far] / cw[last[far]][None, :]).sum(axis=1)
    else:
        s_eps = np.zeros(values.shape[0])
    return m, m_eps, s_eps, arg


def _sweep_numpy(points, weights, values, r_grid, eps):
    f, n = values.shape
    out_m = np.zeros((f, n))
    out_loc = np.zeros((f, n))
    out_far = np.zeros((f, n))
    out_arg = np.zeros((f, n))
    for i in range(n):
        d = _hn_cosh_row(points, i)
        out_m[:, i], out_loc[:, i], out_far[:, i], out_arg[:, i] = _sweep_center_numpy(
            d, weights, values, r_grid, eps)
    return out_m, out_loc, out_far, out_arg


if HAS_NUMBA:

    @numba.njit(**_NJIT_OPTS)
    def _sweep_one(points, weights, values, r_grid, eps, i, out_m, out_loc, out_far, out_arg):
        nf = values.shape[0]
        n = points.shape[0]
        dim = points.shape[1]
        nr = r_grid.shape[0]
        d = np.empty(n)
        cw = np.empty(n)
        cf = np.empty((nf, n))
        closed = np.empty(n)
        y = points[i, 0]
        for j in range(n):
            v = points[j, 0]
            dx2 = 0.0
            for k in range(1, dim):
                diff = points[j, k] - points[i, k]
                dx2 += diff * diff
            arg = (y * y + v * v + dx2) / (2.0 * y * v)
            if arg < 1.0:
                arg = 1.0
            d[j] = arg
        order = np.argsort(d, kind="mergesort")
        acc_w = 0.0
        for j in range(n):
            o = order[j]
            acc_w += weights[o]
            cw[j] = acc_w
            for q in range(nf):
                prev = cf[q, j - 1] if j > 0 else 0.0
                cf[q, j] = prev + values[q, o] * weights[o]
        # closed-ball weights, filled from the back over tie groups
        j = n - 1
        while j >= 0:
            dj = d[order[j]]
            wend = cw[j]
            k = j
            while k >= 0 and d[order[k]] == dj:
                closed[k] = wend
                k -= 1
            j = k
        for q in range(nf):
            best = -1.0
            best_r = 0.0
            pos = 0
            for ir in range(nr):
                rr = r_grid[ir]
                while pos < n and d[order[pos]] < rr:
                    pos += 1
                if pos > 0:
                    val = cf[q, pos - 1] / cw[pos - 1]
                    if val > best:
                        best = val
                        best_r = rr
            out_m[q, i] = max(best, 0.0)
            out_arg[q, i] = best_r
        for q in range(nf):
            best = 0.0
            far = 0.0
            for j in range(n):
                o = order[j]
                dj = d[o]
                if dj < eps:
                    if j == n - 1 or d[order[j + 1]] > dj:
                        val = cf[q, j] / cw[j]
                        if val > best:
                            best = val
                else:
                    far += values[q, o] * weights[o] / closed[j]
            out_loc[q, i] = best
            out_far[q, i] = far

    @numba.njit(parallel=True, **_NJIT_OPTS)
    def _sweep_jit(points, weights, values, r_grid, eps):
        nf = values.shape[0]
        n = points.shape[0]
        out_m = np.zeros((nf, n))
        out_loc = np.zeros((nf, n))
        out_far = np.zeros((nf, n))
        out_arg = np.zeros((nf, n))
        for i in numba.prange(n):
            _sweep_one(points, weights, values, r_grid, eps, i, out_m, out_loc, out_far, out_arg)
        return out_m, out_loc, out_far, out_arg


def thread_cap():
    """Thread count from HYPERLAP_THREADS (unset or invalid: no cap)."""
    raw = os.environ.get("HYPERLAP_THREADS", "").strip()
    try:
        k = int(raw)
    except ValueError:
        return None
    return k if k >= 1 else None


def _apply_thread_cap():
    k = thread_cap()
    if HAS_NUMBA and k is not None:
        numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


def maximal_sweep(points, weights, values, r_grid, eps):
    """Discrete centered maximal data at every grid point.

    Returns ``(M, M_eps, S_eps, R_arg)`` with shape ``values.shape``, where
    ``R_arg`` is the smallest grid radius attaining M.  Balls are
    exact membership sets ``{d < r}``; ``S_eps`` divides by the closed-ball
    weight at each distance so that ``M <= M_eps + S_eps`` holds exactly.
    """
    points = np.ascontiguousarray(points, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    values = np.ascontiguousarray(np.atleast_2d(values), dtype=float)
    r_grid = np.ascontiguousarray(np.sort(np.asarray(r_grid, dtype=float)))
    c_grid = np.cosh(r_grid)
    c_eps = math.cosh(float(eps))
    if USE_JIT:
        _apply_thread_cap()
        m, m_eps, s_eps, c_arg = _sweep_jit(points, weights, values, c_grid, c_eps)
    else:
        m, m_eps, s_eps, c_arg = _sweep_numpy(points, weights, values, c_grid, c_eps)
    # map the attaining cosh r back to its grid radius
    idx = np.clip(np.searchsorted(c_grid, c_arg), 0, len(r_grid) - 1)
    r_arg = np.where(c_arg > 0, r_grid[idx], 0.0)
    return m, m_eps, s_eps, r_arg


def set_jit(enabled):
    """Switch paths at runtime (used by tests and the benchmark)."""
    global USE_JIT
    USE_JIT = bool(enabled) and HAS_NUMBA
    return USE_JIT
