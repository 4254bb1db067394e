"""Experiment configuration files (TOML).

Every section and key is optional; omitted values fall back to the default
room, source, receiver and 5 x 5 mirror array.  Angles are in degrees,
lengths in meters.  Example::

    [array]
    n_rows = 5
    n_cols = 5
    width = 0.1
    height = 0.1

    [eve]
    x = 0.1

    [signal]
    peak = 0.14
    noise_variance = 1e-6     # or: n0 = 1e-22, bandwidth = 1e16

    [quadrature]
    edge = 1e-3

    [pso]
    swarm_size = 30
    max_iterations = 100
    seed = 0

    [sweep]
    axis = "eve_x"            # or "mirror_edge"
    values = [-1.0, -0.9, 0.0, 1.0]
    array_sizes = [4, 5, 6]   # mirror_edge sweeps only

    [experiment]
    methods = ["RSF", "FoB", "NoIRS"]
    gain_calibration = "reference"   # or a positive number; 1.0 keeps raw gains
    output = "results.csv"
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from vlcirs.errors import ValidationError
from vlcirs.geometry import MirrorArraySpec
from vlcirs.optimizer import PsoParams
from vlcirs.scenario import (
    QuadratureSpec,
    ReceiverSpec,
    RoomSpec,
    Scenario,
    SourceSpec,
    noise_variance_from_psd,
)

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "SweepSpec",
    "default_sweep",
    "load_config",
    "parse_config",
]

METHODS = ("RSF", "FoB", "NoIRS")
AXES = ("eve_x", "mirror_edge")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    array_sizes: tuple = (5,)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValidationError(f"sweep.axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValidationError("sweep.values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError("sweep.values must be strictly increasing")
        sizes = tuple(int(n) for n in self.array_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ValidationError("sweep.array_sizes must be positive integers")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "array_sizes", sizes)


def default_sweep(axis: str) -> SweepSpec:
    if axis == "eve_x":
        return SweepSpec("eve_x", tuple(round(-1.0 + 0.1 * k, 10) for k in range(21)))
    if axis == "mirror_edge":
        return SweepSpec("mirror_edge", tuple(round(0.01 * k, 10) for k in range(4, 13)), (4, 5, 6))
    raise ValidationError(f"unknown sweep axis {axis!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario = field(default_factory=Scenario)
    methods: tuple = METHODS
    sweep: SweepSpec | None = None
    pso: PsoParams = field(default_factory=PsoParams)
    output_path: str | None = None
    gain_calibration: float | str | None = "reference"

    def __post_init__(self):
        methods = tuple(self.methods)
        bad = [m for m in methods if m not in METHODS]
        if bad or not methods or len(set(methods)) != len(methods):
            raise ValidationError(f"experiment.methods must be distinct entries of {METHODS}, got {list(methods)}")
        # canonical output order
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in methods))
        cal = self.gain_calibration
        if isinstance(cal, str):
            if cal != "reference":
                raise ValidationError(f"gain_calibration must be 'reference' or a positive number, got {cal!r}")
        elif cal is not None and not (isinstance(cal, (int, float)) and math.isfinite(cal) and cal > 0):
            raise ValidationError(f"gain_calibration must be positive, got {cal!r}")

    def sweep_for(self, axis: str) -> SweepSpec:
        """The configured sweep, or the default one for ``axis``."""
        if self.sweep is None:
            return default_sweep(axis)
        if self.sweep.axis != axis:
            raise ValidationError(f"config sweeps {self.sweep.axis!r} but a {axis!r} sweep was requested")
        return self.sweep


_DEG = math.pi / 180.0

# section -> {config key: (target field, converter)}
_SCHEMA = {
    "room": {"x_r": ("x_r", float), "y_r": ("y_r", float), "z_r": ("z_r", float)},
    "source": {
        "center": ("center", tuple),
        "width": ("width", float),
        "length": ("length", float),
        "semi_angle_deg": ("semi_angle", lambda v: float(v) * _DEG),
        "efficiency": ("efficiency", float),
    },
    "receiver": {
        "area": ("area", float),
        "responsivity": ("responsivity", float),
        "refractive_index": ("refractive_index", float),
        "fov_deg": ("fov", lambda v: float(v) * _DEG),
        "tia_gain": ("tia_gain", float),
        "normal": ("normal", tuple),
        "irs_extra_cosine": ("irs_extra_cosine", bool),
    },
    "array": {
        "n_rows": ("n_rows", int),
        "n_cols": ("n_cols", int),
        "width": ("width", float),
        "height": ("height", float),
        "offset_x": ("offset_x", float),
        "offset_y": ("offset_y", float),
        "offset_z": ("offset_z", float),
        "wall_offset": ("wall_offset", float),
        "reflectivity": ("reflectivity", float),
    },
    "bob": {"x": ("x", float), "y": ("y", float), "depth": ("depth", float)},
    "eve": {"x": ("x", float), "y": ("y", float), "depth": ("depth", float)},
    "signal": {
        "peak": ("peak", float),
        "noise_variance": ("noise_variance", float),
        "n0": ("n0", float),
        "bandwidth": ("bandwidth", float),
    },
    "quadrature": {"edge": ("edge", float), "rule": ("rule", str)},
    "pso": {
        "swarm_size": ("swarm_size", int),
        "max_iterations": ("max_iterations", int),
        "inertia": ("inertia", float),
        "learn_personal": ("learn_personal", float),
        "learn_global": ("learn_global", float),
        "velocity_clamp": ("velocity_clamp", float),
        "seed": ("seed", int),
    },
    "sweep": {"axis": ("axis", str), "values": ("values", list), "array_sizes": ("array_sizes", list)},
    "experiment": {
        "methods": ("methods", list),
        "gain_calibration": ("gain_calibration", lambda v: v),
        "output": ("output", str),
    },
}


def _section(data: dict, name: str) -> dict:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ValidationError(f"[{name}] must be a table")
    schema = _SCHEMA[name]
    out = {}
    for key, value in raw.items():
        if key not in schema:
            raise ValidationError(f"unknown key {name}.{key}; expected one of {sorted(schema)}")
        target, conv = schema[key]
        if conv is bool:
            if not isinstance(value, bool):
                raise ValidationError(f"{name}.{key} must be true or false, got {value!r}")
        elif isinstance(value, bool) or (conv in (float, int) and not isinstance(value, (int, float))):
            raise ValidationError(f"{name}.{key} must be a number, got {value!r}")
        if conv is int and isinstance(value, float) and not value.is_integer():
            raise ValidationError(f"{name}.{key} must be an integer, got {value!r}")
        try:
            out[target] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{name}.{key}: {exc}") from None
    return out


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Build a validated :class:`ExperimentConfig` from TOML text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"{source}: parse error: {exc}") from None
    unknown = sorted(set(data) - set(_SCHEMA))
    if unknown:
        raise ValidationError(f"{source}: unknown section(s) {unknown}")
    s = {name: _section(data, name) for name in _SCHEMA}

    base = Scenario()
    signal = s["signal"]
    if "noise_variance" in signal and ("n0" in signal or "bandwidth" in signal):
        raise ValidationError("give either signal.noise_variance or signal.n0/bandwidth, not both")
    if "n0" in signal or "bandwidth" in signal:
        if "bandwidth" not in signal:
            raise ValidationError("signal.n0 needs signal.bandwidth")
        noise = noise_variance_from_psd(signal.get("n0", 1e-22), signal["bandwidth"])
    else:
        noise = signal.get("noise_variance", base.noise_variance)

    scenario = Scenario(
        room=RoomSpec(**s["room"]),
        source=SourceSpec(**s["source"]),
        receiver=ReceiverSpec(**s["receiver"]),
        array=MirrorArraySpec(**s["array"]),
        bob=replace(base.bob, **s["bob"]),
        eve=replace(base.eve, **s["eve"]),
        peak=signal.get("peak", base.peak),
        noise_variance=noise,
        quadrature=QuadratureSpec(**s["quadrature"]),
    )
    if s["sweep"] and "axis" not in s["sweep"]:
        raise ValidationError("sweep.axis is required when a [sweep] section is present")
    if s["sweep"]:
        fallback = default_sweep(s["sweep"]["axis"])
        s["sweep"].setdefault("values", fallback.values)
        s["sweep"].setdefault("array_sizes", fallback.array_sizes)
    sweep = SweepSpec(**s["sweep"]) if s["sweep"] else None
    exp = s["experiment"]
    return ExperimentConfig(
        scenario=scenario,
        methods=tuple(exp.get("methods", METHODS)),
        sweep=sweep,
        pso=PsoParams(**s["pso"]),
        output_path=exp.get("output"),
        gain_calibration=exp.get("gain_calibration", "reference"),
    )


def load_config(path) -> ExperimentConfig:
    """Read and validate a config file; raises ``OSError`` if unreadable."""
    p = Path(path)
    return parse_config(p.read_text(encoding="utf-8"), source=str(p))
