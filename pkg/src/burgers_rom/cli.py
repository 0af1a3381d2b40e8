"""Command line driver.

Subcommands:
    fom        run the full-order solve and write snapshot files
    pod        snapshot files -> basis files
    calibrate  snapshot + basis files -> closure model files
    bench      full pipeline from a config file -> CSV report

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .bench import BenchConfig, parse_config, run_pipeline
from .closure import (
    assemble_normal_matrices,
    compute_gsnap,
    solve_calibration,
    solve_calibration_quadratic,
    write_closure_model,
)
from .errors import ConfigError, NumericsError
from .fe_core import assemble_mass
from .fom import read_snapshots, run_fom, write_snapshots
from .galerkin import snapshot_coefficients
from .pod import compute_pod, read_basis, write_basis

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def _load_config(path) -> BenchConfig:
    return parse_config(path) if path else BenchConfig()


def _cmd_fom(args) -> int:
    cfg = _load_config(args.config)
    snaps = run_fom(cfg.fom)
    write_snapshots(snaps, cfg.fom, args.out)
    print(f"wrote {len(snaps)} snapshots to {args.out}.{{header,f64}}")
    return EXIT_OK


def _cmd_pod(args) -> int:
    snaps, _ = read_snapshots(args.snapshots)
    mass = assemble_mass(snaps.mesh)
    basis = compute_pod(snaps, mass, args.cutoff)
    write_basis(basis, args.out)
    print(f"wrote {basis.d} modes to {args.out}.{{header,f64}}")
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    snaps, fom_cfg = read_snapshots(args.snapshots)
    basis = read_basis(args.basis)
    if basis.mesh.n_elements != snaps.mesh.n_elements:
        raise ConfigError("snapshot and basis meshes differ")
    m = args.m if args.m is not None else min(2 * args.r, basis.d)
    coeffs = snapshot_coefficients(snaps, basis, max(m, args.r))
    target = compute_gsnap(coeffs, basis, args.r, m)
    if args.ansatz == "linear":
        D, E = assemble_normal_matrices(coeffs.a[: args.r], target)
        model = solve_calibration(
            D, E, reg=args.reg, sign=args.sign,
            target_sq_norm=float(np.sum(target.g**2)),
        )
    else:
        model = solve_calibration_quadratic(
            coeffs.a[: args.r], target, reg=args.reg, sign=args.sign
        )
    write_closure_model(model, args.out)
    print(
        f"calibrated r={args.r} m={m} ({args.ansatz}); "
        f"fit residual {model.fit_residual:.6e}, cond(D) {model.cond_D:.3e}; "
        f"wrote {args.out}.{{header,f64}}"
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    if args.out:
        cfg = replace(cfg, output_path=args.out)
    if args.cache:
        cfg = replace(cfg, cache_dir=args.cache)
    report = run_pipeline(cfg)
    print(f"wrote {len(report.rows)} rows to {cfg.output_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burgers-rom",
        description="Reduced order models for 1D viscous Burgers with calibrated closure.",
    )
    parser.add_argument(
        "--seed", type=int, default=None,
        help="seed for property-test data generation; the pipeline itself is deterministic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fom = sub.add_parser("fom", help="run the full-order solve, write snapshot files")
    p_fom.add_argument("--config", help="key = value configuration file")
    p_fom.add_argument("--out", required=True, help="output base path for snapshot files")
    p_fom.set_defaults(func=_cmd_fom)

    p_pod = sub.add_parser("pod", help="compute a POD basis from snapshot files")
    p_pod.add_argument("snapshots", help="snapshot base path")
    p_pod.add_argument("--out", required=True, help="output base path for basis files")
    p_pod.add_argument("--cutoff", type=float, default=1e-12, help="relative eigenvalue cutoff")
    p_pod.set_defaults(func=_cmd_pod)

    p_cal = sub.add_parser("calibrate", help="fit a closure model from snapshots and basis")
    p_cal.add_argument("snapshots", help="snapshot base path")
    p_cal.add_argument("basis", help="basis base path")
    p_cal.add_argument("--out", required=True, help="output base path for the closure model")
    p_cal.add_argument("--r", type=int, required=True, help="retained rank")
    p_cal.add_argument("--m", type=int, default=None, help="truncation rank (default 2r)")
    p_cal.add_argument("--ansatz", choices=("linear", "quadratic"), default="linear")
    p_cal.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    p_cal.add_argument("--reg", type=float, default=0.0, help="ridge parameter")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_bench = sub.add_parser("bench", help="run the full benchmark pipeline")
    p_bench.add_argument("--config", help="key = value configuration file")
    p_bench.add_argument("--out", help="report CSV path (overrides config)")
    p_bench.add_argument("--cache", help="snapshot cache directory (overrides config)")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
