"""Command-line interface: ``bkmcurv {point,curve,scan,validate}``.

Settings are resolved as command-line flags, then keys of an optional JSON
file given by ``--config``, then built-in defaults.  Errors are reported as one
line of JSON on stderr.

Exit codes: 0 ok, 1 validation or numerical failure, 2 configuration error,
3 degenerate metric (point mode), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .analysis import SweepConfig, classify, scan_gamma, sweep
from .errors import BKMError, ConfigError, DegenerateMetricError
from .geometry import scalar_curvature
from .output import atomic_write, curve_csv, render_svg, spectrum_csv, to_json
from .potentials import (
    ClosedForm1,
    ClosedForm2,
    ClosedForm3,
    ExactDiag,
    Frame,
    ThermoLimit,
)
from .spinchain import FdSpec, SpinChainSpec, spectrum

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3, 4

MODELS = ("closed1", "closed2", "closed3", "thermo", "exact")
DEFAULTS = {
    "model": "closed1", "n": None, "bc": "open", "j": None, "h": None, "gamma": 1.0,
    "t": None, "theta": None, "x": None, "t_min": 0.05, "t_max": 50.0, "points": 400,
    "gammas": None, "gamma_min": 0.1, "gamma_max": 3.0, "gamma_count": 24,
    "mono_tol": 1e-9, "neg_tol": 1e-9, "out_csv": None, "out_json": None, "out_svg": None,
    "log_y": False, "dump_spectrum": False, "fd_tol": None, "as_printed": False,
}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser():
    S = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON file with default settings (flags take precedence)")
    common.add_argument("--model", choices=MODELS, default=S, help="potential backend (default closed1)")
    common.add_argument("--n", type=int, default=S, help="number of sites for --model exact")
    common.add_argument("--bc", choices=("open", "periodic"), default=S, help="boundary for --model exact")
    common.add_argument("--j", type=float, default=S, help="coupling J (not for closed1)")
    common.add_argument("--h", type=float, default=S, help="longitudinal field h (closed1 only)")
    common.add_argument("--gamma", type=float, default=S, help="transverse field Gamma (default 1)")
    common.add_argument("--as-printed", action="store_true", default=S,
                        help="closed3: use the weight 2 of the printed formula instead of 4")
    common.add_argument("--fd-tol", type=float, default=S, help="finite-difference Richardson tolerance")
    common.add_argument("--t-min", type=float, default=S)
    common.add_argument("--t-max", type=float, default=S)
    common.add_argument("--points", type=int, default=S, help="number of log-spaced temperatures (default 400)")
    common.add_argument("--mono-tol", type=float, default=S)
    common.add_argument("--neg-tol", type=float, default=S)
    common.add_argument("--out-csv", default=S, metavar="PATH")
    common.add_argument("--out-json", default=S, metavar="PATH")
    common.add_argument("--out-svg", default=S, metavar="PATH")
    common.add_argument("--log-y", action="store_true", default=S, help="logarithmic R axis in the SVG")

    parser = _Parser(prog="bkmcurv", description="BKM scalar curvature of transverse-field Ising exponential families")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("point", parents=[common], help="curvature report at one point")
    p.add_argument("--t", type=float, default=S, help="temperature (uses --j/--h and --gamma)")
    p.add_argument("--theta", type=float, default=S, help="first natural parameter")
    p.add_argument("--x", type=float, default=S, help="second natural parameter")
    p.add_argument("--dump-spectrum", action="store_true", default=S,
                   help="exact model: write the eigenvalues as CSV to --out-csv")
    sub.add_parser("curve", parents=[common], help="temperature sweep to CSV and optional SVG")
    s = sub.add_parser("scan", parents=[common], help="monotonicity verdicts over a range of Gamma")
    s.add_argument("--gammas", type=_float_list, default=S, help="comma-separated Gamma values")
    s.add_argument("--gamma-min", type=float, default=S)
    s.add_argument("--gamma-max", type=float, default=S)
    s.add_argument("--gamma-count", type=int, default=S)
    sub.add_parser("validate", parents=[common], help="run the acceptance checks")
    return parser


def resolve(argv):
    """Parse ``argv`` into a settings dict (flags > config file > defaults)."""
    ns = vars(build_parser().parse_args(argv))
    cfg = dict(DEFAULTS)
    path = ns.pop("config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a JSON object")
        unknown = sorted(set(data) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    cfg.update(ns)
    return cfg


def make_model(cfg):
    """Potential model and the coupling that plays the role of J."""
    name = cfg["model"]
    if name not in MODELS:
        raise ConfigError(f"unknown model {name!r}")
    fd = FdSpec() if cfg["fd_tol"] is None else FdSpec(rel_tol=float(cfg["fd_tol"]))
    if name == "closed1":
        if cfg["j"] is not None:
            raise ConfigError("--j does not apply to closed1 (a single qubit has no coupling); use --h for the longitudinal field")
        coupling = 1.0 if cfg["h"] is None else float(cfg["h"])
        return ClosedForm1(), coupling
    if cfg["h"] is not None:
        raise ConfigError(f"--h applies only to closed1; use --j for the coupling of {name}")
    coupling = 1.0 if cfg["j"] is None else float(cfg["j"])
    if name == "closed2":
        return ClosedForm2(), coupling
    if name == "closed3":
        return ClosedForm3(as_printed=bool(cfg["as_printed"])), coupling
    if name == "thermo":
        return ThermoLimit(), coupling
    if cfg["n"] is None:
        raise ConfigError("--model exact requires --n")
    return ExactDiag(SpinChainSpec(int(cfg["n"]), cfg["bc"]), fd), coupling


def _sweep_config(cfg, model, coupling, gamma=None):
    return SweepConfig(
        model=model, j=coupling, gamma=float(cfg["gamma"] if gamma is None else gamma),
        t_min=float(cfg["t_min"]), t_max=float(cfg["t_max"]), n_points=int(cfg["points"]),
        mono_tol=float(cfg["mono_tol"]), neg_tol=float(cfg["neg_tol"]),
    )


def _write(path, text):
    try:
        atomic_write(path, text)
    except OSError as exc:
        raise OutputError(f"cannot write {path!r}: {exc}") from exc


class OutputError(BKMError, OSError):
    pass


def _use_color(stream):
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def run_point(cfg):
    model, coupling = make_model(cfg)
    if cfg["t"] is not None:
        if cfg["theta"] is not None or cfg["x"] is not None:
            raise ConfigError("give either --t or --theta/--x, not both")
        t = float(cfg["t"])
        if not t > 0:
            raise ConfigError(f"temperature must be positive, got {t}")
        at = (coupling / t, float(cfg["gamma"]) / t)
    else:
        if cfg["theta"] is None or cfg["x"] is None:
            raise ConfigError("point needs --t or both --theta and --x")
        t = None
        at = (float(cfg["theta"]), float(cfg["x"]))
    if not all(math.isfinite(v) for v in at):
        raise ConfigError("natural parameters must be finite")
    if cfg["dump_spectrum"]:
        if not isinstance(model, ExactDiag):
            raise ConfigError("--dump-spectrum requires --model exact")
        if not cfg["out_csv"]:
            raise ConfigError("--dump-spectrum requires --out-csv")
        _write(cfg["out_csv"], spectrum_csv(spectrum(model.chain, at)))
    if model.supports_ray and any(at):
        jet, basis = model.ray_jet(at), Frame.ray(at).basis
    else:
        jet, basis = model.jet(at), None
    report = scalar_curvature(jet, basis=basis)
    out = report.as_dict()
    out.update(model=model.name, theta=at[0], x=at[1], t=t,
               psi=float(model.value(at)) if isinstance(model, ExactDiag) else float(jet.value))
    text = to_json(out)
    if cfg["out_json"]:
        _write(cfg["out_json"], text + "\n")
    print(text)
    return EXIT_OK


def run_curve(cfg):
    model, coupling = make_model(cfg)
    sc = _sweep_config(cfg, model, coupling)
    points = sweep(sc)
    csv_text = curve_csv(points)
    if cfg["out_csv"]:
        _write(cfg["out_csv"], csv_text)
    else:
        sys.stdout.write(csv_text)
    summary = {"model": model.name, "j": coupling, "gamma": sc.gamma, "points": len(points),
               "quality": {q: sum(p.quality == q for p in points) for q in ("ok", "degenerate", "fd_noisy")}}
    try:
        summary["verdict"] = classify(points, sc.mono_tol, sc.neg_tol).as_dict()
    except BKMError as exc:
        summary["verdict"] = {"error": f"{type(exc).__name__}: {exc}"}
    if cfg["out_json"]:
        _write(cfg["out_json"], to_json(summary, indent=2) + "\n")
    if cfg["out_svg"]:
        ok = [p for p in points if p.ok]
        label = f"{model.name} J={coupling:g} Gamma={sc.gamma:g}"
        try:
            svg = render_svg([(label, [p.t for p in ok], [p.scalar_r for p in ok])], log_y=bool(cfg["log_y"]),
                             title=f"scalar curvature, {label}")
        except ValueError as exc:
            raise ConfigError(f"cannot plot: {exc}") from exc
        _write(cfg["out_svg"], svg)
    return EXIT_OK


def _scan_gammas(cfg):
    if cfg["gammas"]:
        return [float(g) for g in cfg["gammas"]]
    lo, hi, n = float(cfg["gamma_min"]), float(cfg["gamma_max"]), int(cfg["gamma_count"])
    if not (0 < lo <= hi) or n < 1:
        raise ConfigError("scan range needs 0 < gamma_min <= gamma_max and gamma_count >= 1")
    return [float(g) for g in np.geomspace(lo, hi, n)]


def run_scan(cfg):
    model, coupling = make_model(cfg)
    gammas = _scan_gammas(cfg)
    base = _sweep_config(cfg, model, coupling, gamma=gammas[0])
    rows = scan_gamma(model, coupling, gammas, base)
    table = [{k: v for k, v in r.as_dict().items() if k in ("gamma", "classification", "violations", "min_r", "error")}
             for r in rows]
    text = to_json(table, indent=2) + "\n"
    n_nm = sum(r["classification"] == "non_monotone" for r in table)
    n_err = sum(r["classification"] == "error" for r in table)
    n_neg = sum(1 for r in table if r.get("min_r") is not None and r["min_r"] < -base.neg_tol)
    summary = (f"{model.name}: {len(table)} values of Gamma, {n_nm} non_monotone, "
               f"{n_neg} with negative R, {n_err} errors")
    if cfg["out_json"]:
        _write(cfg["out_json"], text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def run_validate(cfg):
    from .validation import Validator

    color = _use_color(sys.stdout)
    all_ok = True
    results = []
    for res in Validator(fd_tol=cfg["fd_tol"]).run_all():
        all_ok &= res.passed
        line = res.line()
        if color:
            code = "32" if res.passed else "31"
            line = f"\033[{code}m{line[:4]}\033[0m{line[4:]}"
        print(line, flush=True)
        results.append({"key": res.key, "title": res.title, "passed": res.passed, "detail": res.detail,
                        "seconds": res.seconds})
    print(f"{'all checks passed' if all_ok else 'validation FAILED'} ({sum(r['passed'] for r in results)}/{len(results)})")
    if cfg["out_json"]:
        _write(cfg["out_json"], to_json(results, indent=2) + "\n")
    return EXIT_OK if all_ok else EXIT_VALIDATION


COMMANDS = {"point": run_point, "curve": run_curve, "scan": run_scan, "validate": run_validate}


def _fail(code, exc):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv in (["-h"], ["--help"]) or not argv:
        build_parser().print_help()
        return EXIT_OK if argv else EXIT_CONFIG
    try:
        cfg = resolve(argv)
        return COMMANDS[cfg["command"]](cfg)
    except DegenerateMetricError as exc:
        return _fail(EXIT_DEGENERATE if cfg["command"] == "point" else EXIT_VALIDATION, exc)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except BKMError as exc:
        return _fail(EXIT_VALIDATION, exc)


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
