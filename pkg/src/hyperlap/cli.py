"""Command line entry point.

    hyperlap kernel  --space hn --n 3 --t 1 --r 0.5,1,2
    hyperlap green   --space hn --n 5 --lam 0 --r 1 [--oracle]
    hyperlap volume  --space hc --n 4 --r 1
    hyperlap verify  fbeta-quartic [--config cfg.json] [--csv margins.csv]
    hyperlap verify  --list
    hyperlap maximal --space hn --n 2 --p 1.5 --suite standard

Exit status: 0 success, 1 usage/domain/numeric error, 2 verification failure.
Tables go to CSV, reports and summaries to JSON.  Floats are written with
``repr`` so a fixed config and seed give identical bytes.
"""

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fixtures, geometry, green, kernels, maximal, verify
from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSpec

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

RUN_KEYS = {"command", "space", "n", "m", "t", "r", "lam", "p", "quad", "format", "output",
            "seed", "oracle", "suite", "eps", "summary"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _clean(v):
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, (np.floating, np.integer)):
        return _clean(v.item())
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def to_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def to_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _table(args, columns, rows):
    if args.format == "json":
        _emit(to_json([dict(zip(columns, r)) for r in rows]), args.output)
    else:
        _emit(to_csv(columns, rows), args.output)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _floats(text):
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty range")
    return vals


def _ints(text):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _quad_spec(args):
    return QuadratureSpec.from_dict(args.quad) if args.quad else DEFAULT_QUAD


def _dims(n, m):
    if m is None:
        raise UsageError("--space an needs --m")
    return (2 * n, m)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_kernel(args):
    q = _quad_spec(args)
    rows = []
    for n in args.n:
        for t in args.t:
            for r in args.r:
                if args.space == "hn":
                    v = kernels.hn_heat(n, t, r, q)
                elif args.space == "hc":
                    v = kernels.hc_heat(n, t, r, q)
                else:
                    v = kernels.an_heat(_dims(n, args.m), t, r, q)
                rows.append((args.space, n, args.m or 0, t, r, v))
    _table(args, ("space", "n", "m", "t", "r", "value"), rows)
    return EXIT_OK


def cmd_green(args):
    q = _quad_spec(args)
    rows = []
    for n in args.n:
        for lam in args.lam:
            for r in args.r:
                if args.space == "hn":
                    v = (green.green_hn_oracle if args.oracle else green.green_hn)(n, lam, r, q)
                elif args.space == "hc":
                    v = (green.green_hc_oracle if args.oracle else green.green_hc)(n, lam, r, q)
                else:
                    raise UsageError("green supports --space hn or hc")
                rows.append((args.space, n, lam, r, v))
    _table(args, ("space", "n", "lam", "r", "value"), rows)
    return EXIT_OK


def cmd_volume(args):
    q = _quad_spec(args)
    rows = []
    for n in args.n:
        for r in args.r:
            if args.space == "hn":
                v = geometry.hn_volume(n, r, q)
            elif args.space == "hc":
                v = geometry.vc_volume(n, r)
            else:
                v = geometry.an_volume(_dims(n, args.m), r, q)
            rows.append((args.space, n, args.m or 0, r, v))
    _table(args, ("space", "n", "m", "r", "value"), rows)
    return EXIT_OK


def list_suites():
    short = {v: k for k, v in verify.ALIASES.items()}
    lines = [f"{name:18s} {short.get(name, ''):8s} {s.anchor}" for name, s in verify.SUITES.items()]
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    if args.list or not args.suite:
        if not args.list:
            raise UsageError("verify needs a suite name (or --list)")
        sys.stdout.write(list_suites())
        return EXIT_OK
    args.suite = verify.canonical(args.suite)
    overrides = dict(args.suite_config or {})
    if args.seed is not None and "seed" in verify.SUITES[args.suite].defaults:
        overrides.setdefault("seed", args.seed)
    try:
        cfg = verify.resolve_config(args.suite, overrides)
    except verify.ConfigError as exc:
        raise UsageError(str(exc))
    report = verify.SUITES[args.suite].run(cfg)
    _emit(to_json(report.to_dict()), args.output)
    if args.csv:
        _emit(to_csv(report.columns, report.rows), args.csv)
    return EXIT_OK if report.passed else EXIT_FAIL


def _load_suite(spec, grid):
    if spec in (None, "standard"):
        return maximal.standard_suite(grid)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--suite must be 'standard' or a JSON file, got {spec!r}")
    data = json.loads(path.read_text())
    if not isinstance(data, dict) or not data:
        raise UsageError("suite file must map names to value lists")
    out = {}
    for name, vals in data.items():
        arr = np.asarray(vals, dtype=float)
        if arr.shape != (grid.size,):
            raise UsageError(f"suite function {name!r} has {arr.size} values, grid has {grid.size}")
        if np.any(arr < 0):
            raise UsageError(f"suite function {name!r} has negative values")
        out[name] = arr
    return out


def cmd_maximal(args):
    if args.space != "hn":
        raise UsageError("maximal supports --space hn only")
    n = args.n[0]
    if n not in (2, 3) or len(args.n) != 1:
        raise UsageError("maximal needs a single --n in {2, 3}")
    grid = maximal.default_grid(n)
    suite = _load_suite(args.suite, grid)
    names = sorted(suite)
    vals = np.stack([suite[k] for k in names])
    res = maximal.maximal_all(grid, vals, eps=args.eps)
    rows, summary = [], {"n": n, "eps": args.eps, "edge_fraction": res.edge_fraction,
                         "grid": {"L": grid.L, "X": grid.X, "ny": grid.ny, "nx": grid.nx}, "p": {}}
    status = EXIT_OK
    budgets = fixtures.get("opnorm")["budget"].get(str(n), {})
    for p in args.p:
        rep = maximal.empirical_opnorm(n, p, suite, grid, result=res)
        for k in names:
            rows.append((n, p, k, rep.ratios[k]))
        budget = budgets.get(str(float(p)))
        below = None if budget is None else rep.max_ratio < budget
        if below is False:
            status = EXIT_FAIL
        summary["p"][str(p)] = {"max_ratio": rep.max_ratio, "budget": budget, "below_budget": below}
    _emit(to_csv(("n", "p", "function", "ratio"), rows), args.output)
    if args.summary:
        _emit(to_json(summary), args.summary)
    return status


COMMANDS = {"kernel": cmd_kernel, "green": cmd_green, "volume": cmd_volume,
            "verify": cmd_verify, "maximal": cmd_maximal}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="hyperlap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--list", action="store_true", help="list verification suites and exit")
    parser.add_argument("--config", help="JSON run config (may name the command)")
    sub = parser.add_subparsers(dest="command")

    def common(p, spaces):
        p.add_argument("--config", help="JSON run config overriding flag defaults")
        p.add_argument("--space", choices=spaces, default=spaces[0])
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.set_defaults(quad=None)

    p = sub.add_parser("kernel", help="heat kernel values")
    common(p, ("hn", "hc", "an"))
    p.add_argument("--n", type=_ints, default=[3])
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--t", type=_floats, default=[1.0])
    p.add_argument("--r", type=_floats, default=[1.0])

    p = sub.add_parser("green", help="Green function values")
    common(p, ("hn", "hc"))
    p.add_argument("--n", type=_ints, default=[3])
    p.add_argument("--lam", type=_floats, default=[0.0])
    p.add_argument("--r", type=_floats, default=[1.0])
    p.add_argument("--oracle", action="store_true", help="Laplace-transform route")

    p = sub.add_parser("volume", help="ball volumes")
    common(p, ("hn", "hc", "an"))
    p.add_argument("--n", type=_ints, default=[3])
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--r", type=_floats, default=[1.0])

    p = sub.add_parser("verify", help="run a verification suite")
    common(p, ("hn",))
    p.add_argument("suite", nargs="?", choices=sorted(verify.SUITES) + sorted(verify.ALIASES))
    p.add_argument("--list", action="store_true")
    p.add_argument("--csv", default=None, help="write per-point margins here")
    p.set_defaults(suite_config=None)

    p = sub.add_parser("maximal", help="empirical maximal-operator ratios")
    common(p, ("hn",))
    p.add_argument("--n", type=_ints, default=[2])
    p.add_argument("--p", type=_floats, default=[1.5])
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--suite", default="standard", help="'standard' or a JSON file of sampled values")
    p.add_argument("--summary", default=None, help="write the JSON summary here")
    return parser


def _read_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _check_run_value(key, value):
    if key == "quad":
        if not isinstance(value, dict):
            raise UsageError("config key 'quad' must be an object")
        try:
            QuadratureSpec.from_dict(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"config key 'quad': {exc}")
    elif key in ("n", "t", "r", "lam", "p"):
        value = value if isinstance(value, list) else [value]
        if not value or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise UsageError(f"config key {key!r} must be a number or a nonempty list of numbers")
        if key == "n":
            if not all(float(v).is_integer() for v in value):
                raise UsageError("config key 'n' must hold integers")
            value = [int(v) for v in value]
    elif key in ("m", "seed") and not (isinstance(value, int) and not isinstance(value, bool)):
        raise UsageError(f"config key {key!r} must be an integer")
    elif key in ("eps",) and not isinstance(value, (int, float)):
        raise UsageError(f"config key {key!r} must be a number")
    return value


def _apply_config(parser, args, argv, data):
    """Config values fill in flags that were not given on the command line.

    For ``verify`` every key other than command/suite/output/csv/seed is a
    suite setting, validated against that suite's defaults.
    """
    command = data.get("command", args.command)
    if command not in COMMANDS:
        raise UsageError(f"config command must be one of {sorted(COMMANDS)}")
    if args.command is None:
        rest = [a for i, a in enumerate(argv) if a != "--config" and (i == 0 or argv[i - 1] != "--config")]
        try:
            args = parser.parse_args([command] + rest)
        except SystemExit:
            raise UsageError(f"bad arguments for {command!r}")
        args.config = None
    if args.command != command:
        raise UsageError(f"config is for {command!r}, command line says {args.command!r}")
    given = {a[2:].split("=")[0] for a in argv if a.startswith("--")}
    if command == "verify":
        if data.get("suite") and not args.suite:
            if verify.canonical(data["suite"]) not in verify.SUITES:
                raise UsageError(f"unknown suite {data['suite']!r}")
            args.suite = data["suite"]
        suite_cfg = {}
        for key, value in data.items():
            if key in ("command", "suite"):
                continue
            if key in ("output", "csv", "seed"):
                if key not in given:
                    setattr(args, key, _check_run_value(key, value))
            else:
                suite_cfg[key] = value
        args.suite_config = suite_cfg
        return args
    bad = sorted(set(data) - RUN_KEYS)
    if bad:
        raise UsageError(f"unknown config keys {bad}; allowed: {sorted(RUN_KEYS)}")
    for key, value in data.items():
        if key == "command" or key in given:
            continue
        if not hasattr(args, key):
            raise UsageError(f"config key {key!r} does not apply to {command!r}")
        setattr(args, key, _check_run_value(key, value))
    return args


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # a top-level --config may name the command; subcommand flags can follow it
        if "--config" in argv and not any(a in COMMANDS for a in argv):
            i = argv.index("--config")
            if i + 1 < len(argv):
                command = _read_config(argv[i + 1]).get("command")
                if command in COMMANDS:
                    argv = [command] + argv
    except UsageError as exc:
        print(f"hyperlap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.list:
            sys.stdout.write(list_suites())
            return EXIT_OK
        if args.config:
            args = _apply_config(parser, args, argv, _read_config(args.config))
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hyperlap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"hyperlap: numeric failure: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"hyperlap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
