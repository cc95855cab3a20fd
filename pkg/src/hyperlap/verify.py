"""Verification suites: parameter scans with recorded margins.

Each suite takes a JSON-style config (defaults below, overridable key by key)
and returns a ``VerificationReport``.  A margin is >= 0 exactly when the
checked inequality holds at that point; ``worst_margin`` is the minimum over
the scan.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import fixtures, green, inequalities, kernels
from .geometry import HTypeDescriptor, region_volume, region_volume_mc
from .quadrature import DEFAULT_QUAD, QuadratureSpec


class ConfigError(ValueError):
    pass


@dataclass
class VerificationReport:
    lemma: str
    anchor: str
    grid: dict
    worst_margin: float
    passed: bool
    columns: tuple = ()
    rows: list = field(default_factory=list, repr=False)
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {"lemma": self.lemma, "anchor": self.anchor, "grid": self.grid,
                "worst_margin": self.worst_margin, "pass": self.passed, "notes": self.notes}


def _report(name, grid, columns, rows, notes=None, extra_ok=True):
    margins = [r[-1] for r in rows]
    worst = float(min(margins)) if margins else math.nan
    ok = bool(margins) and extra_ok and all(m >= 0 for m in margins)
    return VerificationReport(name, SUITES[name].anchor, grid, worst, ok, tuple(columns), rows, notes or {})


def _quad(cfg, default):
    return QuadratureSpec.from_dict(cfg["quad"]) if cfg.get("quad") else default


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _f_beta_suite(cfg):
    c_o = cfg["c_o"] if cfg["c_o"] is not None else fixtures.get("c_o")["value"]
    cal = inequalities.calibrate_c_o(1, cfg["k_max"])
    bound = 2.0 * cal.c_fit
    rows = []
    for beta, s_o, sup_f, q, ratio in inequalities.f_beta_scan(c_o, cfg["k_max"]):
        m = 1.0 - q / bound if sup_f > 0 else -1.0
        if beta <= cfg["small_beta"]:
            m = min(m, 1.0 - abs(ratio - 1.0) / cfg["ratio_tol"])
        rows.append((beta, s_o, sup_f, q, ratio, m))
    grid = {"beta": f"{c_o} * 2^-k down to 2^-{cfg['k_max']}", "bound": bound}
    return _report("fbeta-quartic", grid, ("beta", "s_o", "sup_F", "sup_F_over_beta4", "s_o_ratio", "margin"),
                   rows, {"c_o": c_o, "c_fit": cal.c_fit})


def _phi_suite(cfg):
    s = np.arange(1, int(round(cfg["s_max"] / cfg["step"])) + 1) * cfg["step"]
    vals = np.array([inequalities.phi(float(x)) for x in s])
    at0 = inequalities.phi(cfg["s_zero"])
    rows = [(cfg["s_zero"], at0, math.nan, cfg["tol"] - abs(at0 - 0.5))]
    prev = at0
    for x, v in zip(s, vals):
        # strict decrease; scaled so a tie reads as a violation
        rows.append((float(x), float(v), prev - v, (prev - v) / abs(prev) - 1e-15))
        prev = v
    grid = {"s": f"({cfg['step']}, {cfg['s_max']}] step {cfg['step']}", "s_zero": cfg["s_zero"]}
    return _report("phi-monotone", grid, ("s", "phi", "drop", "margin"), rows)


def _margin_scan(name, fn, alphas_fn, cfg, quad_spec):
    rows = []
    rs = np.linspace(cfg["r_min"], cfg["r_max"], cfg["r_count"])
    for n in cfg["n"]:
        for a in alphas_fn(n, cfg["alpha_count"]):
            if a * a < cfg["alpha_sq_min"]:
                continue
            for r in rs:
                rows.append((n, a, float(r), fn(n, a, float(r), quad_spec)))
    grid = {"n": list(cfg["n"]), "alpha_count": cfg["alpha_count"],
            "r": f"linspace({cfg['r_min']}, {cfg['r_max']}, {cfg['r_count']})"}
    return _report(name, grid, ("n", "alpha", "r", "log_margin"), rows)


def _green_lower_hn(cfg):
    return _margin_scan("green-lower-hn", green.green_lower_margin_hn, green.admissible_alphas_hn, cfg, _quad(cfg, DEFAULT_QUAD))


def _green_lower_hc(cfg):
    return _margin_scan("green-lower-hc", green.green_lower_margin_hc, green.admissible_alphas_hc, cfg, _quad(cfg, DEFAULT_QUAD))


def _domination_rows(res):
    rows = [(res.p, res.n, res.eps, "kernel", -res.kernel_worst)]
    rows += [(res.p, res.n, res.eps, k, v) for k, v in sorted(res.margins.items())]
    return rows


def _far_hn(cfg):
    c_star = cfg["c_star"] if cfg["c_star"] is not None else fixtures.get("c_star")["value"]
    rows, emp = [], {}
    for p in cfg["p"]:
        res = inequalities.far_domination_hn(p, c_star, quad_spec=_quad(cfg, None))
        rows += _domination_rows(res)
        emp[str(p)] = res.empirical_constant
    return _report("far-domination-hn", {"p": list(cfg["p"]), "c_star": c_star},
                   ("p", "n", "eps", "test", "log_margin"), rows, {"empirical_constant": emp})


def _far_hc(cfg):
    rows, emp = [], {}
    for p in cfg["p"]:
        res = inequalities.far_domination_hc(p, quad_spec=_quad(cfg, None), constant=cfg["constant"])
        rows += _domination_rows(res)
        emp[str(p)] = res.empirical_constant
    return _report("far-domination-hc", {"p": list(cfg["p"]), "constant": cfg["constant"]},
                   ("p", "n", "eps", "test", "log_margin"), rows, {"empirical_constant": emp})


def _microlocal(cfg):
    stored = fixtures.get("c_A")
    rows_raw = inequalities.microlocal_scan(cfg["A"], tuple(cfg["n"]))
    fresh = inequalities.calibrate_c_a(rows_raw)
    c_a = stored["value"]
    rows = [(r.n, r.test, r.lhs, r.rhs_raw, r.s_argmax, c_a * r.rhs_raw / r.lhs - 1.0) for r in rows_raw]
    drift = abs(fresh - c_a) / c_a
    notes = {"c_A_stored": c_a, "c_A_fresh": fresh, "drift": drift,
             "edge_rows": sum(bool(r.edge) for r in rows_raw)}
    return _report("microlocal", {"A": cfg["A"], "n": list(cfg["n"])},
                   ("n", "test", "lhs", "rhs_raw", "s_argmax", "margin"), rows, notes,
                   extra_ok=drift <= cfg["reproduce_rel"])


def _region_shape(cfg):
    rows, ratios = [], {}
    for n in cfg["n"]:
        samples = inequalities.region_bound_samples(n, cfg["A"], cfg["samples"], cfg["seed"])
        ratios[n] = inequalities.region_bound_check(n, cfg["A"], samples)
        rows.append(("max_ratio", n, ratios[n], 1.0 if math.isfinite(ratios[n]) else -1.0))
    vals = list(ratios.values())
    spread = max(vals) / min(vals)
    rows.append(("stability", 0, spread, math.log(cfg["stability"]) - math.log(spread)))
    d = HTypeDescriptor.heisenberg(1)
    exact = region_volume(d, 1.0, 1.0, 1.0)
    mc = region_volume_mc(d, 1.0, 1.0, 1.0, cfg["mc_samples"], cfg["seed"])
    rel = abs(exact - mc) / mc
    rows.append(("region_volume_mc", 2, rel, cfg["mc_tol"] - rel))
    notes = {"region_volume": exact, "monte_carlo": mc}
    ok = True
    if cfg["A"] == 1.0 and cfg["samples"] == 100 and cfg["seed"] == 0:
        stored = fixtures.get("region_C")["value"]
        drift = max(abs(ratios[n] - stored[str(n)]) / stored[str(n)] for n in ratios if str(n) in stored)
        notes["drift"] = drift
        ok = drift <= cfg["reproduce_rel"]
    return _report("region-shape", {"n": list(cfg["n"]), "A": cfg["A"], "samples": cfg["samples"], "seed": cfg["seed"]},
                   ("check", "n", "value", "margin"), rows, notes, extra_ok=ok)


def _an_lower(cfg):
    rows = []
    for n in cfg["n"]:
        for k in cfg["k"]:
            for t in cfg["t"]:
                for r in cfg["r"]:
                    lhs, rhs = kernels.an_lower_bound_sides(n, k, t, r)
                    rows.append((n, k, t, r, lhs, rhs, lhs / rhs - 1.0 + cfg["rel_tol"]))
    grid = {key: list(cfg[key]) for key in ("n", "k", "t", "r")}
    return _report("an-lower-bound", grid, ("n", "k", "t", "r", "lhs", "rhs", "margin"), rows)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Suite:
    name: str
    anchor: str
    run: object = field(repr=False)
    defaults: dict = field(default_factory=dict)


_QUAD_DEFAULT = None

SUITES = {s.name: s for s in (
    Suite("fbeta-quartic", "0 < sup_s F_beta(s) <= c beta^4 and s_o ~ beta^2/sqrt(3) as beta -> 0", _f_beta_suite,
          {"c_o": None, "k_max": 14, "small_beta": 0.01, "ratio_tol": 0.02}),
    Suite("phi-monotone", "Phi(s) = ln(cosh s)/s^2: Phi(0+) = 1/2 and strictly decreasing", _phi_suite,
          {"s_zero": 1e-6, "step": 0.01, "s_max": 10.0, "tol": 1e-9}),
    Suite("green-lower-hn", "G_n(-(1-alpha^2) rho^2, r) >= Gamma-ratio lower bound on H^n", _green_lower_hn,
          {"n": [5, 7, 9, 15], "alpha_count": 8, "alpha_sq_min": 0.1, "r_min": 0.1, "r_max": 5.0,
           "r_count": 25, "quad": _QUAD_DEFAULT}),
    Suite("green-lower-hc", "G^c_n(-(1-alpha^2) rho_c^2, r) >= Gamma-ratio lower bound on H_c^n", _green_lower_hc,
          {"n": [3, 4, 6], "alpha_count": 8, "alpha_sq_min": 0.1, "r_min": 0.1, "r_max": 5.0,
           "r_count": 25, "quad": _QUAD_DEFAULT}),
    Suite("far-domination-hn", "S_eps f(o) <= 8 C_* n(n-2) (-rho^2/p' - Laplacian)^{-1} f(o) on H^n", _far_hn,
          {"p": [1.25, 1.5, 1.75], "c_star": None, "quad": _QUAD_DEFAULT}),
    Suite("microlocal", "micro-local part dominated by c(A) sup_s of the semigroup product bound", _microlocal,
          {"A": 1.0, "n": [5, 9, 17], "reproduce_rel": fixtures.REPRODUCE_REL}),
    Suite("far-domination-hc", "S_eps f(o) <= 100 * 2n(2n-2) (-rho_c^2/p' - Laplacian)^{-1} f(o) on H_c^n", _far_hc,
          {"p": [1.75], "constant": 100.0, "quad": _QUAD_DEFAULT}),
    Suite("region-shape", "|delta_sqrt(a) E| bounded by C(A) times the closed region-volume bound", _region_shape,
          {"n": [4, 8], "A": 1.0, "samples": 100, "seed": 0, "stability": 2.0,
           "mc_samples": 10_000_000, "mc_tol": 0.005, "reproduce_rel": fixtures.REPRODUCE_REL}),
    Suite("an-lower-bound", "AN operator power >= single-term lower bound via K_{2(n+k)+1}(t/4, r/2)", _an_lower,
          {"n": [1, 2, 3], "k": [1, 2, 3], "t": [0.1, 0.5, 1.0, 2.0], "r": [0.1, 0.5, 1.0, 2.0, 4.0],
           "rel_tol": 1e-8}),
)}


def _check_type(key, value, default):
    if default is None:
        ok = value is None or isinstance(value, (int, float, dict)) and not isinstance(value, bool)
    elif isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif isinstance(default, list):
        ok = (isinstance(value, list) and len(value) > 0
              and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value))
        if ok and all(isinstance(v, int) for v in default):
            ok = all(isinstance(v, int) for v in value)
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise ConfigError(f"config key {key!r}: expected a value like {default!r}, got {value!r}")


# short labels accepted on the command line
ALIASES = {
    "lemma31": "fbeta-quartic",
    "phi": "phi-monotone",
    "lemma42": "green-lower-hn",
    "lemma52": "green-lower-hc",
    "prop43": "far-domination-hn",
    "prop45": "microlocal",
    "prop53": "far-domination-hc",
    "cp2b": "region-shape",
    "eq62": "an-lower-bound",
}


def canonical(name):
    return ALIASES.get(name, name)


def resolve_config(name, overrides=None):
    """Defaults for ``name`` with ``overrides`` applied; raises ConfigError on bad keys or types."""
    name = canonical(name)
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    cfg = dict(SUITES[name].defaults)
    for key, value in (overrides or {}).items():
        if key not in cfg:
            raise ConfigError(f"unknown config key {key!r} for suite {name!r}; allowed: {sorted(cfg)}")
        _check_type(key, value, cfg[key])
        if key == "quad" and value is not None:
            if not isinstance(value, dict):
                raise ConfigError("config key 'quad' must be an object")
            try:
                QuadratureSpec.from_dict(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config key 'quad': {exc}") from exc
        cfg[key] = value
    return cfg


def run_suite(name, overrides=None):
    name = canonical(name)
    return SUITES[name].run(resolve_config(name, overrides))
