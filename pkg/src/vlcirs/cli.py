"""Command-line interface.

Exit codes: 0 success, 1 invalid input or configuration, 2 geometry or
runtime failure, 3 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from vlcirs.config import ExperimentConfig, load_config
from vlcirs.errors import GeometryError, ValidationError
from vlcirs.optimizer import fob_spot, pso_ii
from vlcirs.radiometry import orientation_grid_for_spot
from vlcirs.reference import secrecy_triples
from vlcirs.secrecy import evaluate_spot, fit_noise_variance
from vlcirs.sweeps import (
    EVE_COLUMNS,
    SIZE_COLUMNS,
    calibrated,
    emit_csv,
    run_sweep_eve,
    run_sweep_mirror_size,
    write_csv,
)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML experiment file (defaults when omitted)")
    common.add_argument("--seed", type=int, help="override the PSO seed")
    common.add_argument("--output", help="output CSV path (sweeps and calibrate-noise)")
    common.add_argument("--edge", type=float, help="quadrature element edge in meters (e.g. 1e-4 to refine)")

    parser = argparse.ArgumentParser(prog="vlcirs", description="Mirror-array VLC secrecy toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gains", parents=[common], help="channel gains and secrecy rate for one method or spot")
    p.add_argument("--method", choices=["RSF", "FoB", "NoIRS"], default="FoB")
    p.add_argument("--spot", nargs=2, type=float, metavar=("X", "Y"), help="explicit reflected spot (room x, y)")

    sub.add_parser("optimize", parents=[common], help="run the spot search and print the mirror angles")
    sub.add_parser("sweep-eve", parents=[common], help="sweep Eve's offset along the wall")
    sub.add_parser("sweep-mirrors", parents=[common], help="sweep mirror edge and array size")

    p = sub.add_parser("calibrate-noise", parents=[common], help="fit the noise variance to (h_bob, h_eve, rate) data")
    p.add_argument("--triples", help="CSV with columns h_bob,h_eve,rate (default: built-in reference curves)")
    p.add_argument("--peak", type=float, help="peak amplitude A (default: from config)")
    p.add_argument("--trim", type=float, default=5e-3, help="drop points with larger residual and refit (0: plain fit)")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, pso=replace(cfg.pso, seed=args.seed))
    if args.edge is not None:
        sc = cfg.scenario.with_quadrature(args.edge)
        cfg = replace(cfg, scenario=sc)
    return cfg


def _print_gains(ev, out) -> None:
    print(f"{'user':<6}{'los':>20}{'irs':>20}{'total':>20}", file=out)
    for name, g in (("Bob", ev.bob), ("Eve", ev.eve)):
        print(f"{name:<6}{g.los:>20.12g}{g.irs:>20.12g}{g.total:>20.12g}", file=out)
    print(f"secrecy rate: {ev.rate:.12g} nats/channel use (unclamped {ev.raw_rate:.12g})", file=out)


def _cmd_gains(args, out) -> int:
    cfg = _config(args)
    sc = calibrated(cfg.scenario, cfg.gain_calibration)
    if args.spot is not None:
        spot = (args.spot[0], args.spot[1], sc.bob.depth)
    elif args.method == "NoIRS":
        spot = None
    elif args.method == "FoB":
        spot = fob_spot(sc)
    else:
        spot = pso_ii(sc, cfg.pso).best_spot
    print(f"gain scale: {sc.gain_scale:.12g}", file=out)
    if spot is not None:
        print(f"spot: x={spot[0]:.6f} y={spot[1]:.6f} h={spot[2]:.6f}", file=out)
    _print_gains(evaluate_spot(sc, spot), out)
    return EXIT_OK


def _cmd_optimize(args, out) -> int:
    cfg = _config(args)
    sc = calibrated(cfg.scenario, cfg.gain_calibration)
    res = pso_ii(sc, cfg.pso)
    q = res.best_spot
    print(f"best spot: x={q.x:.6f} y={q.y:.6f} h={q.h:.6f}", file=out)
    print(f"secrecy rate: {res.best_fitness:.12g} nats/channel use ({res.evaluations} evaluations)", file=out)
    grid = orientation_grid_for_spot(sc, q)
    with np.printoptions(precision=4, suppress=True):
        print("roll (deg):", file=out)
        print(np.degrees(grid.roll), file=out)
        print("yaw (deg):", file=out)
        print(np.degrees(grid.yaw), file=out)
    return EXIT_OK


def _cmd_sweep(args, out, runner, columns) -> int:
    cfg = _config(args)
    rows = runner(cfg)
    path = args.output or cfg.output_path
    if path:
        emit_csv(rows, path, columns)
        print(f"wrote {len(rows)} rows to {path}", file=out)
    else:
        write_csv(rows, out, columns)
    return EXIT_OK


def _read_triples(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"h_bob", "h_eve", "rate"} - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing column(s) {sorted(missing)}")
        rows = list(reader)
    try:
        return tuple(np.array([float(r[c]) for r in rows]) for c in ("h_bob", "h_eve", "rate"))
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _cmd_calibrate(args, out) -> int:
    cfg = _config(args)
    peak = args.peak if args.peak is not None else cfg.scenario.peak
    if args.triples:
        hb, he, rate = _read_triples(args.triples)
    else:
        hb, he, rate, _ = secrecy_triples()
    fit = fit_noise_variance(hb, he, rate, peak, trim=args.trim or None)
    print(f"noise_variance: {fit.noise_variance:.9g}", file=out)
    print(f"points kept: {int(fit.kept.sum())} of {fit.kept.size}", file=out)
    print(f"max |residual|: {fit.max_abs_residual:.6g} nats", file=out)
    if args.output:
        rows = [
            {"h_bob": b, "h_eve": e, "rate": r, "residual": d, "kept": int(k)}
            for b, e, r, d, k in zip(hb, he, rate, fit.residuals, fit.kept)
        ]
        emit_csv(rows, args.output, ["h_bob", "h_eve", "rate", "residual", "kept"])
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gains":
            return _cmd_gains(args, out)
        if args.command == "optimize":
            return _cmd_optimize(args, out)
        if args.command == "sweep-eve":
            return _cmd_sweep(args, out, run_sweep_eve, EVE_COLUMNS)
        if args.command == "sweep-mirrors":
            return _cmd_sweep(args, out, run_sweep_mirror_size, SIZE_COLUMNS)
        return _cmd_calibrate(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GeometryError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
