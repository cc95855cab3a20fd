"""Time the numba and numpy paths of the hot kernels side by side.

    python3 benchmarks/bench_accel.py [--sizes 400,1600,4096] [--repeat 3]

The first jit call compiles (or loads from the on-disk cache); it is timed
separately and excluded from the steady-state numbers.  Results are checked
for agreement before timing is reported.
"""

import argparse
import time

import numpy as np

from hyperlap import _accel
from hyperlap.kernels import odd_heat_expr
from hyperlap.maximal import HalfSpaceGrid, default_r_grid, standard_suite


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_sweep(size, repeat):
    side = int(round(size ** 0.5))
    grid = HalfSpaceGrid(2, ny=side, nx=side)
    suite = standard_suite(grid)
    vals = np.stack([suite[k] for k in sorted(suite)])
    r_grid = default_r_grid(grid)
    args = (grid.points, grid.weights, vals, r_grid, 0.5)
    row = {"kernel": "maximal_sweep", "size": grid.size}
    if _accel.HAS_NUMBA:
        _accel.set_jit(True)
        t0 = time.perf_counter()
        _accel.maximal_sweep(*args)
        row["jit_first"] = time.perf_counter() - t0
        row["jit"], a = _best(lambda: _accel.maximal_sweep(*args), repeat)
    _accel.set_jit(False)
    row["numpy"], b = _best(lambda: _accel.maximal_sweep(*args), repeat)
    if _accel.HAS_NUMBA:
        row["max_diff"] = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
    return row


def bench_terms(size, repeat):
    expr = odd_heat_expr(7)
    coef, a, b, c, d = expr._arrays()
    t = np.linspace(0.1, 2.0, size)
    r = np.linspace(0.01, 8.0, size)
    args = (coef, a, b, c, d, expr.w, expr.exp_rate, t, r)
    row = {"kernel": "eval_terms(K_7)", "size": size}
    if _accel.HAS_NUMBA:
        _accel.set_jit(True)
        t0 = time.perf_counter()
        _accel.eval_terms(*args)
        row["jit_first"] = time.perf_counter() - t0
        row["jit"], x = _best(lambda: _accel.eval_terms(*args), repeat)
    _accel.set_jit(False)
    row["numpy"], y = _best(lambda: _accel.eval_terms(*args), repeat)
    if _accel.HAS_NUMBA:
        row["max_diff"] = float(np.max(np.abs(x[0] - y[0]) / np.maximum(y[1], 1e-300)))
    return row


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--sizes", default="400,1600,4096")
    ap.add_argument("--terms", default="10000,1000000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = [bench_sweep(int(s), args.repeat) for s in args.sizes.split(",")]
    rows += [bench_terms(int(s), args.repeat) for s in args.terms.split(",")]
    print(f"threads cap: {_accel.thread_cap()}  numba: {_accel.HAS_NUMBA}")
    print(f"{'kernel':18s} {'size':>8s} {'numpy s':>10s} {'jit s':>10s} {'speedup':>8s} {'compile s':>10s} {'max diff':>10s}")
    for row in rows:
        jit = row.get("jit", float("nan"))
        print(f"{row['kernel']:18s} {row['size']:8d} {row['numpy']:10.4f} {jit:10.4f} "
              f"{row['numpy'] / jit:8.2f} {row.get('jit_first', float('nan')):10.3f} {row.get('max_diff', float('nan')):10.2e}")
    return rows


if __name__ == "__main__":
    main()
