"""Scenario description: room, source, receiver, users and numerics.

User and spot positions follow the room convention used in configuration
files: ``x`` along the wall measured from the source centre, ``y`` measured
from the mirror wall into the room, and ``depth`` measured down from the
ceiling.  :meth:`Scenario.point` converts such a triple to the global frame of
:mod:`vlcirs.geometry`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from vlcirs.errors import ValidationError
from vlcirs.geometry import MirrorArraySpec, lambertian_order

__all__ = [
    "ChannelGains",
    "QuadratureSpec",
    "ReceiverSpec",
    "RoomSpec",
    "Scenario",
    "SourceSpec",
    "UserSpec",
    "ValidationError",
    "noise_variance_from_psd",
    "default_scenario",
]

#: Noise power spectral density quoted for VLC receivers, A^2/Hz.
N0_DEFAULT = 1e-22


def _positive(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValidationError(f"{type(obj).__name__}.{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class RoomSpec:
    x_r: float = 5.0
    y_r: float = 5.0
    z_r: float = 3.0

    def __post_init__(self):
        _positive(self, "x_r", "y_r", "z_r")


@dataclass(frozen=True)
class SourceSpec:
    """Extended planar Lambertian source facing down from the ceiling."""

    center: tuple = (0.0, 0.0, 0.0)
    width: float = 0.01
    length: float = 0.01
    semi_angle: float = math.radians(70.0)
    efficiency: float = 0.44

    def __post_init__(self):
        _positive(self, "width", "length", "efficiency")
        if not 0 < self.semi_angle < math.pi / 2:
            raise ValidationError("SourceSpec.semi_angle must lie in (0, pi/2)")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def lambertian_order(self) -> float:
        return lambertian_order(self.semi_angle)


@dataclass(frozen=True)
class ReceiverSpec:
    """Photodiode with a concentrator; the normal points up at the ceiling.

    The mirror irradiance already carries the incidence cosine at the
    receiver.  ``irs_extra_cosine`` applies it a second time per mirror, at
    the mirror centre; the default leaves it out.
    """

    area: float = 1e-4
    responsivity: float = 0.54
    refractive_index: float = 1.5
    fov: float = math.pi / 2
    tia_gain: float = 1.0
    normal: tuple = (0.0, 0.0, -1.0)
    irs_extra_cosine: bool = False

    def __post_init__(self):
        _positive(self, "area", "responsivity", "refractive_index", "tia_gain")
        if not 0 < self.fov <= math.pi / 2:
            raise ValidationError("ReceiverSpec.fov must lie in (0, pi/2]")
        n = np.asarray(self.normal, dtype=float)
        if n.shape != (3,) or abs(float(n @ n) - 1.0) > 1e-9:
            raise ValidationError("ReceiverSpec.normal must be a unit 3-vector")
        object.__setattr__(self, "normal", tuple(float(c) for c in n))


@dataclass(frozen=True)
class UserSpec:
    role: str
    x: float
    y: float
    depth: float

    def __post_init__(self):
        if self.role not in ("Bob", "Eve"):
            raise ValidationError(f"user role must be 'Bob' or 'Eve', got {self.role!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Square elements of side ``edge`` meters.

    ``rule`` is ``"clipped"`` (midpoint rule with the source-aperture
    indicator integrated exactly per element) or ``"midpoint"`` (indicator
    sampled at the midpoint too).  See :mod:`vlcirs.radiometry`.
    """

    edge: float = 1e-3
    rule: str = "clipped"

    def __post_init__(self):
        _positive(self, "edge")
        if self.rule not in ("clipped", "midpoint"):
            raise ValidationError(f"unsupported quadrature rule {self.rule!r}")


@dataclass(frozen=True)
class ChannelGains:
    los: float
    irs: float

    def __post_init__(self):
        if self.los < 0 or self.irs < 0:
            raise ValidationError("channel gains are non-negative")

    @property
    def total(self) -> float:
        return self.los + self.irs

    def scaled(self, factor: float) -> "ChannelGains":
        return ChannelGains(self.los * factor, self.irs * factor)


def noise_variance_from_psd(n0: float = N0_DEFAULT, bandwidth: float = 1.0) -> float:
    """``sigma^2 = N0 * B``."""
    if n0 < 0 or bandwidth < 0:
        raise ValidationError("noise PSD and bandwidth must be non-negative")
    return n0 * bandwidth


@dataclass(frozen=True)
class Scenario:
    """Everything a gain or secrecy computation needs.

    ``gain_scale`` multiplies every channel gain before it enters the
    secrecy bound; the raw radiometric gains are left untouched.
    """

    room: RoomSpec = field(default_factory=RoomSpec)
    source: SourceSpec = field(default_factory=SourceSpec)
    receiver: ReceiverSpec = field(default_factory=ReceiverSpec)
    array: MirrorArraySpec = field(default_factory=MirrorArraySpec)
    bob: UserSpec = field(default_factory=lambda: UserSpec("Bob", 0.2, 2.0, 3.0))
    eve: UserSpec = field(default_factory=lambda: UserSpec("Eve", 0.1, 2.0, 3.0))
    peak: float = 0.14
    noise_variance: float = 1e-6
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    gain_scale: float = 1.0

    def __post_init__(self):
        _positive(self, "peak", "gain_scale")
        if not (math.isfinite(self.noise_variance) and self.noise_variance >= 0):
            raise ValidationError("noise_variance must be non-negative")
        if self.bob.role != "Bob" or self.eve.role != "Eve":
            raise ValidationError("bob/eve slots must hold users with matching roles")
        for user in (self.bob, self.eve):
            self._check_inside(user)
        a = self.array
        x_lo, x_hi = self.x_bounds
        if a.offset_x < x_lo - 1e-12 or a.offset_x + a.n_cols * a.width > x_hi + 1e-12:
            raise ValidationError("mirror array does not fit along the wall")
        if a.offset_z + a.n_rows * a.height > self.room.z_r + 1e-12:
            raise ValidationError("mirror array extends below the floor")
        if a.offset_y > self.room.y_r:
            raise ValidationError("source lies outside the room (array.offset_y > room.y_r)")
        q = self.quadrature.edge
        if q > min(self.source.width, self.source.length, a.width, a.height) + 1e-15:
            raise ValidationError("quadrature edge exceeds the smallest integrated dimension")

    @property
    def x_bounds(self) -> tuple[float, float]:
        """Room extent along the wall, relative to the source centre."""
        lo = -self.array.wall_offset + self.array.offset_x
        return lo, lo + self.room.x_r

    def _check_inside(self, user: UserSpec) -> None:
        lo, hi = self.x_bounds
        ok = (
            lo - 1e-12 <= user.x <= hi + 1e-12
            and -1e-12 <= user.y <= self.room.y_r + 1e-12
            and 0 < user.depth <= self.room.z_r + 1e-12
        )
        if not ok:
            raise ValidationError(f"{user.role} at ({user.x}, {user.y}, {user.depth}) lies outside the room")

    @property
    def origin(self) -> np.ndarray:
        return np.asarray(self.source.center, dtype=float)

    def point(self, x: float, y: float, depth: float) -> np.ndarray:
        """Room-convention coordinates to the global frame."""
        return self.origin + np.array([x, y - self.array.offset_y, depth])

    def user_point(self, user: UserSpec) -> np.ndarray:
        return self.point(user.x, user.y, user.depth)

    def with_eve_x(self, x: float) -> "Scenario":
        return replace(self, eve=replace(self.eve, x=x))

    def with_mirrors(self, n: int, edge: float) -> "Scenario":
        """Square ``n x n`` array of square mirrors with side ``edge``."""
        return replace(self, array=replace(self.array, n_rows=n, n_cols=n, width=edge, height=edge))

    def with_quadrature(self, edge: float, rule: str | None = None) -> "Scenario":
        quad = replace(self.quadrature, edge=edge, rule=rule or self.quadrature.rule)
        return replace(self, quadrature=quad)

    def with_gain_scale(self, factor: float) -> "Scenario":
        return replace(self, gain_scale=factor)


def default_scenario(**overrides) -> Scenario:
    """Default simulation scenario (5 x 5 array of 10 cm mirrors)."""
    return replace(Scenario(), **overrides) if overrides else Scenario()
