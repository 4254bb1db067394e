"""Experiment sweeps and CSV output.

Each sweep point is evaluated for every configured method:

* ``RSF``: particle-swarm search for the reflected spot;
* ``FoB``: every mirror aimed at Bob;
* ``NoIRS``: direct links only.

Reported gains include the gain calibration factor (column ``gain_scale``).
A point that cannot be evaluated yields a row with NaN values and the
reason in the ``error`` column instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import math
from dataclasses import replace
from pathlib import Path

from vlcirs.config import ExperimentConfig
from vlcirs.errors import GeometryError, ValidationError
from vlcirs.optimizer import fob_spot, pso_ii
from vlcirs.scenario import Scenario
from vlcirs.secrecy import evaluate_spot, reference_gain_calibration

__all__ = [
    "EVE_COLUMNS",
    "SIZE_COLUMNS",
    "calibrated",
    "emit_csv",
    "evaluate_method",
    "run_sweep_eve",
    "run_sweep_mirror_size",
    "write_csv",
]

_GAIN_COLUMNS = [
    "los_bob",
    "los_eve",
    "irs_bob",
    "irs_eve",
    "sum_bob",
    "sum_eve",
    "secrecy_rate",
    "spot_x",
    "spot_y",
    "gain_scale",
]
EVE_COLUMNS = ["eve_x", *_GAIN_COLUMNS, "method", "seed", "error"]
SIZE_COLUMNS = ["array_size", "mirror_edge", "eve_x", *_GAIN_COLUMNS, "method", "seed", "error"]

#: Eve's offset in the mirror-size sweep, meters.
SIZE_SWEEP_EVE_X = 0.1


def calibrated(sc: Scenario, calibration) -> Scenario:
    """``sc`` with the gain calibration applied (``None`` keeps raw gains)."""
    if calibration is None:
        return sc.with_gain_scale(1.0)
    if calibration == "reference":
        return sc.with_gain_scale(reference_gain_calibration(sc))
    return sc.with_gain_scale(float(calibration))


def evaluate_method(sc: Scenario, method: str, pso) -> dict:
    """Gain and rate columns for one method on an already calibrated scenario."""
    if method == "NoIRS":
        spot = None
    elif method == "FoB":
        spot = fob_spot(sc)
    elif method == "RSF":
        spot = pso_ii(sc, pso).best_spot
    else:
        raise ValidationError(f"unknown method {method!r}")
    ev = evaluate_spot(sc, spot)
    return {
        "los_bob": ev.bob.los,
        "los_eve": ev.eve.los,
        "irs_bob": ev.bob.irs,
        "irs_eve": ev.eve.irs,
        "sum_bob": ev.bob.total,
        "sum_eve": ev.eve.total,
        "secrecy_rate": ev.rate,
        "spot_x": math.nan if spot is None else spot[0],
        "spot_y": math.nan if spot is None else spot[1],
        "gain_scale": sc.gain_scale,
    }


def _row(make_scenario, method: str, cfg: ExperimentConfig, head: dict) -> dict:
    row = dict(head)
    try:
        sc = calibrated(make_scenario(), cfg.gain_calibration)
        row.update(evaluate_method(sc, method, cfg.pso))
        row["error"] = ""
    except (ValidationError, GeometryError) as exc:
        row.update({c: math.nan for c in _GAIN_COLUMNS})
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["method"] = method
    row["seed"] = cfg.pso.seed
    return row


def run_sweep_eve(cfg: ExperimentConfig) -> list[dict]:
    """One row per (Eve offset, method), in sweep order then method order."""
    sweep = cfg.sweep_for("eve_x")
    rows = []
    for x in sweep.values:
        for method in cfg.methods:
            rows.append(_row(lambda x=x: cfg.scenario.with_eve_x(x), method, cfg, {"eve_x": x}))
    return rows


def run_sweep_mirror_size(cfg: ExperimentConfig) -> list[dict]:
    """One row per (array size, mirror edge, method) with Eve at 0.1 m."""
    sweep = cfg.sweep_for("mirror_edge")
    base = cfg.scenario.with_eve_x(SIZE_SWEEP_EVE_X)
    rows = []
    for n in sweep.array_sizes:
        for edge in sweep.values:
            def make(n=n, edge=edge):
                # keep the quadrature edge below the mirror edge
                quad = replace(base.quadrature, edge=min(base.quadrature.edge, edge))
                array = replace(base.array, n_rows=n, n_cols=n, width=edge, height=edge)
                return replace(base, array=array, quadrature=quad)

            head = {"array_size": n, "mirror_edge": edge, "eve_x": SIZE_SWEEP_EVE_X}
            for method in cfg.methods:
                rows.append(_row(make, method, cfg, head))
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def emit_csv(rows: list[dict], path, columns: list[str] | None = None) -> None:
    """Write ``rows`` as UTF-8 CSV, reals with 15 significant digits.

    ``columns`` defaults to the keys of the first row; an empty table needs
    explicit ``columns`` to get a header.
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        write_csv(rows, fh, columns)


def write_csv(rows: list[dict], stream, columns: list[str] | None = None) -> None:
    """Like :func:`emit_csv` but writes to an open text stream."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
