"""Command-line harness: reproducible experiments over the series engine,
late-term analysis, Stokes smoothing, and the direct BVP solve.

Commands

    series          exact table {u_n, c_n} -> JSON
    lambda          late-term report (Lam extrapolation, beta fit) -> JSON/CSV
    stokes-profile  multiplier profile(s) across the Stokes line -> CSV
    tails           BVP sweep, tail measurements -> JSON lines, exponent fit
    compare         optimal truncation vs the BVP value at a point

Every command writes its outputs atomically and records a run manifest
(<first output>.manifest.json) listing parameters and produced files.
Exit codes: 0 success, 1 math failure, 2 validation failure.
The default output directory is $FKDV_OUT_DIR, else the working directory.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .series import RecurrenceError, ResourceLimitError, build_series, save_table
from .evaluation import (EvalPoint, PoleProximityError, empirical_optimum,
                         optimal_N, partial_sum)
from .late_terms import (InsufficientDataError as LateInsufficientData,
                         lambda_csv_rows, report_to_json, singulant_report)
from .stokes import (DEFAULT_LAMBDA, QuadratureError, StokesFrame,
                     ValidityWedgeError, frame_for, integrate_multiplier,
                     profile_csv_rows)
from .bvp import (FitQualityError, IllConditionedError,
                  InsufficientDataError as BvpInsufficientData,
                  NonConvergenceError, ResolutionError, SolverConfig,
                  TailMeasurement, WindowContaminatedError, check_window,
                  fit_exponent, measure_tail, predicted_amplitude, solve)

EXIT_OK = 0
EXIT_MATH = 1
EXIT_VALIDATION = 2

_MATH_ERRORS = (RecurrenceError, PoleProximityError, QuadratureError,
                ValidityWedgeError, NonConvergenceError, IllConditionedError,
                FitQualityError)
_VALIDATION_ERRORS = (ResourceLimitError, LateInsufficientData,
                      BvpInsufficientData, ResolutionError,
                      WindowContaminatedError, ValueError)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str
    outputs: list[str]
    duration_seconds: float


def _out_dir(args) -> Path:
    if getattr(args, "out_dir", None):
        return Path(args.out_dir)
    return Path(os.environ.get("FKDV_OUT_DIR", "."))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _atomic_write(path, buf.getvalue())


def _finish(command: str, args, outputs: list[Path], t0: float) -> None:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = RunManifest(command=command, parameters=params,
                           version=__version__,
                           outputs=[str(p) for p in outputs],
                           duration_seconds=time.perf_counter() - t0)
    if outputs:
        _write_json(Path(str(outputs[0]) + ".manifest.json"),
                    dataclasses.asdict(manifest))


def cmd_series(args) -> int:
    t0 = time.perf_counter()
    table = build_series(args.n_max, Fraction(args.gamma))
    out = Path(args.out) if args.out else _out_dir(args) / "series_table.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_table(table, out)
    print("c =", "[" + ", ".join(str(ci) for ci in table.c) + "]")
    print(f"wrote {out} ({table.n_max + 1} orders, gamma = {table.gamma})")
    _finish("series", args, [out], t0)
    return EXIT_OK


def cmd_lambda(args) -> int:
    t0 = time.perf_counter()
    if args.n_max < 5:
        raise LateInsufficientData(
            f"insufficient data: need --n-max >= 5, got {args.n_max}")
    if args.n_max < args.order + 2:
        raise LateInsufficientData(
            f"insufficient data: order {args.order} needs n_max >= {args.order + 2}")
    table = build_series(args.n_max, Fraction(args.gamma))
    report = singulant_report(table, order=args.order)
    out = Path(args.out) if args.out else _out_dir(args) / "lambda_report.json"
    _write_json(out, report_to_json(report, table))
    outputs = [out]
    if args.emit_csv:
        csv_path = out.with_suffix(".csv")
        _write_csv(csv_path, ["n", "lambda_n"], lambda_csv_rows(report))
        outputs.append(csv_path)
    print(f"lambda_final = {report.lambda_final:.6f} "
          f"+/- {report.lambda_error:.2e} (order {args.order}, "
          f"n_max {args.n_max}); beta = {report.beta_selected}")
    _finish("lambda", args, outputs, t0)
    return EXIT_OK


def cmd_stokes_profile(args) -> int:
    t0 = time.perf_counter()
    gamma = Fraction(args.gamma)
    outputs = []
    for eps in args.epsilon:
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        if args.r is not None:
            frame = StokesFrame(r=args.r, epsilon=eps, rho=args.rho or 0.0,
                                lambda_const=args.lambda_const)
        else:
            frame = frame_for(eps, gamma, args.lambda_const)
            if args.rho is not None:
                frame = StokesFrame(r=frame.r, epsilon=eps, rho=args.rho,
                                    lambda_const=args.lambda_const)
        span = (-math.pi / 2 - args.width, -math.pi / 2 + args.width)
        profile = integrate_multiplier(frame, span, steps=args.steps)
        rows = profile_csv_rows(profile, frame)
        out = _out_dir(args) / f"stokes_profile_eps{eps:g}.csv"
        _write_csv(out, ["eta", "re_S", "im_S", "re_S_closed", "im_S_closed"],
                   rows)
        outputs.append(out)
        ratio = (abs(profile.jump_numeric / profile.jump_closed_form)
                 if profile.jump_closed_form != 0 else math.nan)
        print(f"eps = {eps:g}: jump_numeric/jump_closed = {ratio:.6f} "
              f"(|jump| = {abs(profile.jump_numeric):.6e}), wrote {out}")
    _finish("stokes-profile", args, outputs, t0)
    return EXIT_OK


def cmd_tails(args) -> int:
    t0 = time.perf_counter()
    epsilons = sorted(set(args.epsilon), reverse=True)
    configs = []
    for eps in epsilons:
        overrides = {}
        if args.domain_length is not None:
            overrides["half_length"] = args.domain_length
        cfg = SolverConfig(epsilon=eps, gamma=float(Fraction(args.gamma)),
                           grid_spacing=args.grid_h or eps / 20.0, **overrides)
        cfg.validate()
        check_window(cfg, args.lambda_const)  # validate before any solve
        configs.append(cfg)

    records = []
    solution_files = []
    prev_sol = None
    for cfg in configs:
        guess = None
        if prev_sol is not None:
            x_new = np.arange(cfg.n_cells + 1) * cfg.grid_spacing
            guess = np.interp(x_new, prev_sol.nodes, prev_sol.u, right=0.0)
        sol = solve(cfg, guess)
        meas = measure_tail(sol, cfg, args.lambda_const)
        if args.dump_solutions:
            spath = _out_dir(args) / f"bvp_solution_eps{cfg.epsilon:g}.csv"
            _write_csv(spath, ["x", "u"],
                       zip(sol.nodes.tolist(), sol.u.tolist()))
            solution_files.append(spath)
        records.append({
            "epsilon": meas.epsilon,
            "amplitude_measured": meas.amplitude_measured,
            "amplitude_predicted": meas.amplitude_predicted,
            "wavelength_measured": meas.wavelength_measured,
            "iterations": sol.iterations,
            "residual_norm": sol.residual_norm,
            "half_length": cfg.half_length,
            "grid_spacing": cfg.grid_spacing,
        })
        prev_sol = sol
        print(f"eps = {meas.epsilon:g}: amplitude = {meas.amplitude_measured:.6e} "
              f"(predicted {meas.amplitude_predicted:.6e}), "
              f"wavelength = {meas.wavelength_measured:.4f}")

    out = Path(args.out) if args.out else _out_dir(args) / "tail_measurements.jsonl"
    _atomic_write(out, "".join(json.dumps(r, sort_keys=True) + "\n"
                               for r in sorted(records, key=lambda r: r["epsilon"])))
    outputs = [out] + solution_files
    if len(records) >= 4:
        meas_list = [TailMeasurement(r["epsilon"], r["amplitude_measured"],
                                     r["amplitude_predicted"],
                                     r["wavelength_measured"]) for r in records]
        fit = fit_exponent(meas_list, float(Fraction(args.gamma)))
        target = -math.pi / (2.0 * float(Fraction(args.gamma)))
        print(f"fit: slope = {fit.slope:.4f} (model {target:.4f}), "
              f"log prefactor = {fit.log_prefactor:.3f}, r^2 = {fit.r_squared:.5f}")
    else:
        print("fewer than 4 measurements: skipping the exponent fit")
    _finish("tails", args, outputs, t0)
    return EXIT_OK


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    gamma = Fraction(args.gamma)
    eps = args.epsilon
    cfg = SolverConfig(epsilon=eps, gamma=float(gamma),
                       grid_spacing=args.grid_h or eps / 20.0,
                       half_length=args.domain_length)
    cfg.validate()
    if abs(args.x) > cfg.half_length:
        raise ValueError(f"x = {args.x} lies beyond the domain [0, {cfg.half_length}]")

    table = build_series(args.n_max, gamma)
    point = EvalPoint(complex(args.x), eps)
    n_opt = optimal_N(args.x, eps, gamma)
    n_emp = empirical_optimum(table, point)
    sol = solve(cfg)
    u_bvp = float(np.interp(abs(args.x), sol.nodes, sol.u))

    scale = predicted_amplitude(cfg, DEFAULT_LAMBDA)
    n_hi = min(14, table.n_max + 1)
    errors = []
    for N in range(2, n_hi + 1):
        ps = partial_sum(table, point, N)
        errors.append((N, abs(ps.value - u_bvp)))
    err_opt = dict(errors).get(n_opt)
    print(f"optimal_N = {n_opt}, empirical argmin of terms at n = {n_emp}")
    print(f"u_bvp({args.x}) = {u_bvp:.10f}")
    for N, e in errors:
        marker = "  <- optimal" if N == n_opt else ""
        print(f"  N = {N:2d}: |partial - u_bvp| = {e:.6e}{marker}")
    if err_opt is not None and scale > 0:
        print(f"err(optimal) / tail scale = {err_opt / scale:.3f} "
              f"(scale {scale:.3e})")
    outputs = []
    if args.out:
        out = Path(args.out)
        _write_json(out, {
            "epsilon": eps, "x": args.x, "optimal_N": n_opt,
            "empirical_argmin": n_emp, "u_bvp": u_bvp,
            "errors": [[N, e] for N, e in errors],
            "tail_scale": scale,
        })
        outputs.append(out)
    _finish("compare", args, outputs, t0)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkdv",
        description="Exponential asymptotics laboratory for the fifth-order KdV equation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--gamma", default="1",
                       help="sech width parameter as an exact rational, e.g. 3/2")
        p.add_argument("--out-dir", default=None,
                       help="output directory (default $FKDV_OUT_DIR or cwd)")

    p = sub.add_parser("series", help="build the exact series table")
    common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out", default=None, help="table JSON path")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("lambda", help="late-term report and Lam extrapolation")
    common(p)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--order", type=int, default=3,
                   help="Richardson extrapolation order")
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--emit-csv", action="store_true",
                   help="also write (n, lambda_n) CSV next to the report")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("stokes-profile",
                       help="integrate the multiplier across the Stokes line")
    common(p)
    p.add_argument("--epsilon", type=float, nargs="+", required=True)
    p.add_argument("--r", type=float, default=None,
                   help="singulant modulus (default pi/(2 gamma))")
    p.add_argument("--rho", type=float, default=None,
                   help="truncation offset (default from optimal_N)")
    p.add_argument("--lambda-const", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--width", type=float, default=1.0,
                   help="half-width of the theta span around -pi/2")
    p.set_defaults(func=cmd_stokes_profile)

    p = sub.add_parser("tails", help="BVP sweep and tail exponent fit")
    common(p)
    p.add_argument("--epsilon", type=float, nargs="+",
                   default=[0.08, 0.10, 0.12, 0.15])
    p.add_argument("--domain-length", type=float, default=None,
                   help="half length L (default 10 + 20 pi eps)")
    p.add_argument("--grid-h", type=float, default=None,
                   help="grid spacing (default eps/20)")
    p.add_argument("--lambda-const", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--out", default=None, help="measurement JSONL path")
    p.add_argument("--dump-solutions", action="store_true",
                   help="also write one (x, u) CSV per epsilon")
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("compare",
                       help="optimal truncation against the BVP solution")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--domain-length", type=float, default=None)
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--out", default=None, help="comparison JSON path")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _MATH_ERRORS as exc:
        print(f"math failure: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
