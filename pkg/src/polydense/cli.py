"""Batch driver: configure weight/target/schedules, emit convergence tables.

Configuration is a flat key=value file plus command-line overrides; output
is plot-ready CSV (comma separated, '.' decimal, 17 significant digits)
with run metadata in leading '#' comment lines.

Exit codes: 0 success, 1 final error above target, 2 config error,
3 numeric error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .certify import (
    bound_eq3,
    bound_eq4,
    eq5_diagnostic,
    transfer_constants,
)
from .conjugate import SampledFunction, lemma_gap, random_superlinear_family
from .errors import (
    ConfigError,
    DivergingRatioError,
    EvaluationError,
    QuadratureError,
    SlopeGuardError,
)
from .pipeline import (
    build_VN,
    cutoff_apply,
    cutoff_error,
    moment_tensor,
    stage2_error_estimate,
)
from .weights import (
    make_target,
    make_weight,
    membership_check,
    tensor_grid,
)

__all__ = ["main", "run_convergence", "run_lemma_suite"]

EXIT_OK = 0
EXIT_TARGET_MISSED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CSV_HEADER = "nu,lambda,N,cutoff_error,stage2_error,measured_error,bound3,bound4"


def _fmt(x):
    return format(float(x), ".17g")


def parse_weight_spec(spec, dim):
    """Parse "family:key=value,key=value"; list values use ';' separators."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"malformed weight parameter {item!r}")
            if ";" in value:
                params[key.strip()] = [float(v) for v in value.split(";")]
            else:
                params[key.strip()] = float(value)
    try:
        return make_weight(name.strip(), dim, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad weight spec {spec!r}: {exc}") from exc


def _parse_schedule(text, cast=float):
    try:
        values = [cast(v) for v in str(text).split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"bad schedule {text!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"empty schedule {text!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"schedule {text!r} must be strictly increasing")
    return values


def read_config_file(path):
    """Flat key=value file; '#' comments; errors carry line numbers."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


DEFAULTS = {
    "dim": "1",
    "weight": "exp-power:a=1,p=2",
    "target": "sin",
    "nu_schedule": "2,4",
    "lambda_schedule": "5,20",
    "n_max": "24",
    "n_schedule": "",
    "tol": "1e-9",
    "seed": "0",
    "out": "",
    "target_error": "1e-3",
}


def _resolve_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = str(flag)
    try:
        cfg["dim"] = int(cfg["dim"])
        cfg["tol"] = float(cfg["tol"])
        cfg["seed"] = int(cfg["seed"])
        cfg["target_error"] = float(cfg["target_error"])
        cfg["n_max"] = int(cfg["n_max"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["tol"] <= 0 or cfg["target_error"] <= 0:
        raise ConfigError("tolerances must be positive")
    return cfg


def run_convergence(cfg, stream):
    """One CSV row per (nu, lambda, N); returns the final measured error."""
    dim = cfg["dim"]
    w = parse_weight_spec(cfg["weight"], dim)
    try:
        f = make_target(cfg["target"], dim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    nus = _parse_schedule(cfg["nu_schedule"], int)
    lams = _parse_schedule(cfg["lambda_schedule"], float)
    if cfg["n_schedule"]:
        n_values = _parse_schedule(cfg["n_schedule"], int)
    else:
        n_values = list(range(0, cfg["n_max"] + 1))
    tol = cfg["tol"]

    member = membership_check(w)
    eq5 = eq5_diagnostic(w)
    admissible = member.consistent and eq5.admissible_consistent

    stream.write("# polydense convergence table\n")
    stream.write(f"# weight={cfg['weight']}\n")
    stream.write(f"# target={cfg['target']}\n")
    stream.write(f"# dim={dim}\n")
    stream.write(f"# seed={cfg['seed']}\n")
    stream.write(f"# membership_consistent={str(member.consistent).lower()}\n")
    stream.write(
        f"# eq5_admissible_consistent={str(eq5.admissible_consistent).lower()}\n"
    )
    stream.write(f"# admissible={str(admissible).lower()}\n")
    stream.write(CSV_HEADER + "\n")

    final_measured = math.inf
    grid_m = 201 if dim == 1 else 61
    for nu in nus:
        stage = cutoff_apply(f, nu)
        R = 2.0 * nu + 2.0
        cut_err = cutoff_error(f, w, nu, R)
        tens = moment_tensor(stage, max(n_values), tol=tol)
        pts = tensor_grid(R, grid_m, dim)
        fvals = np.asarray(f(pts), dtype=float)
        wvals = np.exp(-np.asarray(w.phi(pts), dtype=float))
        for lam in lams:
            s2_err = stage2_error_estimate(stage, lam, w)
            c1, c2 = transfer_constants(stage, lam)
            for N in n_values:
                vn = build_VN(stage, lam, N, tol=tol, _moments=tens)
                measured = float(np.max(np.abs(fvals - vn(pts)) * wvals))
                b3 = bound_eq3(c1, c2, w, N)
                try:
                    b4 = bound_eq4(c1, c2, w, N)
                except SlopeGuardError:
                    b4 = math.inf
                row = [
                    str(nu), _fmt(lam), str(N), _fmt(cut_err), _fmt(s2_err),
                    _fmt(measured), _fmt(b3), _fmt(b4),
                ]
                stream.write(",".join(row) + "\n")
                final_measured = measured
    return final_measured


def run_lemma_suite(count, seed, x_max, stream):
    """Randomized certification of the half-line conjugate inequality."""
    if count < 1:
        raise ConfigError("lemma suite needs a positive sample count")
    if x_max <= 0:
        raise ConfigError("x-max must be positive")
    xs = np.linspace(0.0, x_max, 41)
    min_gap = math.inf
    for g in random_superlinear_family(count, seed):
        min_gap = min(min_gap, float(np.min(lemma_gap(g, xs))))
    quad = SampledFunction.from_callable(lambda y: y * y, 10.0, 1e-3, slope=20.0)
    eq_xs = np.linspace(2.0, min(20.0, x_max) if x_max >= 2 else x_max, 19)
    residual = float(np.max(np.abs(lemma_gap(quad, eq_xs))))
    stream.write("# polydense lemma suite\n")
    stream.write(f"# count={count}\n")
    stream.write(f"# seed={seed}\n")
    stream.write(f"min_gap={_fmt(min_gap)}\n")
    stream.write(f"quadratic_equality_residual={_fmt(residual)}\n")
    return min_gap, residual


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polydense",
        description="Weighted polynomial approximation with certified bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("run-convergence", help="run the three-stage pipeline")
    conv.add_argument("--config", help="key=value configuration file")
    conv.add_argument("--weight", help="weight spec, e.g. exp-power:a=1,p=2")
    conv.add_argument("--target", help="target name (zero|one|sin|sincos|gauss)")
    conv.add_argument("--dim", type=int, help="dimension n")
    conv.add_argument("--nu-schedule", dest="nu_schedule",
                      help="comma list of increasing cutoff radii")
    conv.add_argument("--lambda-schedule", dest="lambda_schedule",
                      help="comma list of increasing mollification scales")
    conv.add_argument("--n-max", dest="n_max", type=int,
                      help="largest polynomial degree (runs N = 0..n_max)")
    conv.add_argument("--n-schedule", dest="n_schedule",
                      help="explicit comma list of degrees")
    conv.add_argument("--tol", type=float, help="quadrature tolerance")
    conv.add_argument("--out", help="output CSV path (default stdout)")
    conv.add_argument("--seed", type=int, help="seed recorded in metadata")
    conv.add_argument("--target-error", dest="target_error", type=float,
                      help="success threshold on the final measured error")

    lem = sub.add_parser("lemma-suite", help="randomized conjugate-inequality run")
    lem.add_argument("--count", type=int, default=50)
    lem.add_argument("--seed", type=int, default=0)
    lem.add_argument("--x-max", dest="x_max", type=float, default=20.0)
    lem.add_argument("--out", help="output path (default stdout)")
    return parser


def _open_out(path):
    if path:
        return open(path, "w", newline="")
    return sys.stdout


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run-convergence":
            cfg = _resolve_config(args)
            out = _open_out(cfg["out"])
            try:
                final = run_convergence(cfg, out)
            finally:
                if out is not sys.stdout:
                    out.close()
            return EXIT_OK if final < cfg["target_error"] else EXIT_TARGET_MISSED
        if args.command == "lemma-suite":
            out = _open_out(args.out)
            try:
                run_lemma_suite(args.count, args.seed, args.x_max, out)
            finally:
                if out is not sys.stdout:
                    out.close()
            return EXIT_OK
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, EvaluationError, DivergingRatioError,
            SlopeGuardError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
