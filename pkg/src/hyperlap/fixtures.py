"""Measured constants and golden values, stored with the grids that produced them.

``data/fixtures.json`` is written by ``regenerate`` (``python3 -m
hyperlap.fixtures``) and read by the verification suites.  Each entry can be
re-measured with ``measure(name)``; ``reproduce`` compares against the
stored value at 1% relative.
"""

import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import green, inequalities, kernels, maximal

FIXTURE_FILE = "fixtures.json"
REPRODUCE_REL = 0.01


def _data_path():
    return Path(str(resources.files("hyperlap").joinpath("data", FIXTURE_FILE)))


def load(path=None):
    path = Path(path) if path else _data_path()
    with open(path) as fh:
        return json.load(fh)


def get(name, path=None):
    data = load(path)
    if name not in data:
        raise KeyError(f"no fixture named {name!r}; have {sorted(data)}")
    return data[name]


# ---------------------------------------------------------------------------
# measurements; each returns {"value": ..., "grid": {...}, ...}
# ---------------------------------------------------------------------------

def _c_star():
    ns = list(range(2, 61)) + [2 ** k for k in range(6, 13)]
    rs = np.geomspace(0.01, 10.0, 61)
    worst, arg = inequalities.calibrate_c_star(ns, rs)
    return {"value": worst, "argmax": {"n": arg[0], "r": arg[1]},
            "grid": {"n": "2..60 and 2^6..2^12", "r": "geomspace(0.01, 10, 61)"}}


def _c_o():
    cal = inequalities.calibrate_c_o(1, 14)
    return {"value": cal.c_o, "c_fit": cal.c_fit, "fallback": cal.fallback,
            "grid": {"beta": "2^-k, k = 1..14"}}


def _c_a():
    A, ns = 1.0, (5, 9, 17)
    rows = inequalities.microlocal_scan(A, ns)
    best = max(rows, key=lambda r: r.lhs / r.rhs_raw)
    return {"value": inequalities.calibrate_c_a(rows), "A": A,
            "argmax": {"n": best.n, "test": best.test},
            "grid": {"n": list(ns), "tests": [t.name for t in inequalities.product_suite()],
                     "r": "geomspace(1e-3 eps, eps, 24, endpoint=False)",
                     "s": "geomspace(1e-4, 1e2, 64)"}}


def _region_c():
    A, count, seed = 1.0, 100, 0
    vals = {str(n): inequalities.region_bound_check(n, A, inequalities.region_bound_samples(n, A, count, seed))
            for n in (4, 8)}
    return {"value": vals, "A": A, "grid": {"samples": count, "seed": seed, "generator": "Philox"}}


def _opnorm():
    ps = (1.1, 1.5, 4.0)
    measured = {}
    for n in (2, 3):
        grid = maximal.default_grid(n)
        suite = maximal.standard_suite(grid)
        vals = np.stack([suite[k] for k in sorted(suite)])
        res = maximal.maximal_all(grid, vals)
        measured[str(n)] = {str(p): maximal.empirical_opnorm(n, p, suite, grid, result=res).max_ratio
                            for p in ps}
    # the budget is a fixed ceiling a quarter above the first measurement
    budget = {n: {p: math.ceil(125.0 * v) / 100.0 for p, v in row.items()} for n, row in measured.items()}
    return {"value": measured, "budget": budget,
            "grid": {"2": "64 x 64, L=2, X=4", "3": "24 x 20 x 20, L=2, X=4",
                     "r": "default_r_grid, r_max=5, 64 per decade"}}


def _golden():
    ind = lambda r: 1.0 if 1.0 <= r <= 2.0 else 0.0
    return {"value": {
        "K3(t=1,r=1)": kernels.hn_heat(3, 1.0, 1.0),
        "green_oracle(n=3,lam=0,r=1)": green.green_hn_oracle(3, 0.0, 1.0),
        "resolvent(n=3,lam=1,1[1,2])": green.resolvent_apply_radial(3, 1.0, ind, support=(1.0, 2.0)),
        "S_eps(n=3,eps=1,1[1,2])": green.s_epsilon_radial(3, 1.0, ind, support=(1.0, 2.0)),
    }}


MEASUREMENTS = {
    "c_star": _c_star,
    "c_o": _c_o,
    "c_A": _c_a,
    "region_C": _region_c,
    "opnorm": _opnorm,
    "golden": _golden,
}


def measure(name):
    if name not in MEASUREMENTS:
        raise KeyError(f"no measurement named {name!r}")
    return MEASUREMENTS[name]()


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _flat(v, prefix=""):
    if isinstance(v, dict):
        out = {}
        for k, x in v.items():
            out.update(_flat(x, f"{prefix}{k}/"))
        return out
    return {prefix.rstrip("/"): float(v)}


def reproduce(name, rel=REPRODUCE_REL, path=None):
    """Re-measure ``name``; returns (worst relative drift, ok)."""
    stored = _flat(get(name, path)["value"])
    fresh = _flat(measure(name)["value"])
    if stored.keys() != fresh.keys():
        return math.inf, False
    worst = max(_rel(fresh[k], stored[k]) for k in stored)
    return worst, worst <= rel


def regenerate(path=None, names=None):
    path = Path(path) if path else _data_path()
    data = load(path) if path.exists() else {}
    for name in names or MEASUREMENTS:
        data[name] = measure(name)
        print(f"measured {name}", file=sys.stderr)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return data


if __name__ == "__main__":
    regenerate(names=sys.argv[1:] or None)
