"""Vector geometry for the mirror array.

Global frame (meters):

* origin at the centre of the optical AP (the source), which lies in the
  ceiling plane ``z = 0``;
* ``x`` runs parallel to the mirror wall;
* ``y`` is perpendicular to the wall, growing into the room; the wall is the
  plane ``y = source_y - offset_y``;
* ``z`` points *down*, so the receive plane of a user sits at ``z = h_d``.

Every mirror carries a local frame centred on it with the same axis
directions.  Rotating a mirror by roll ``alpha`` and yaw ``beta`` maps the
local frame through ``R = Rz(-beta) @ Rx(alpha)``; the columns of ``R`` are
the in-plane width axis, the surface normal and the in-plane height axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from vlcirs.errors import DegenerateGeometryError, GeometryError, ValidationError

__all__ = [
    "DegenerateGeometryError",
    "GeometryError",
    "MirrorArraySpec",
    "MirrorOrientation",
    "OrientationGrid",
    "angles_from_normal",
    "lambertian_order",
    "mirror_center",
    "mirror_centers",
    "normal_from_angles",
    "pre_reflection_image",
    "reflect_about_normal",
    "rotation_matrix",
    "snell_normal",
    "unit",
]

E3 = np.array([0.0, 0.0, 1.0])
_TINY = 1e-15


class MirrorOrientation(NamedTuple):
    """Roll (``alpha``) and yaw (``beta``) of one mirror, radians."""

    roll: float
    yaw: float


@dataclass(frozen=True)
class MirrorArraySpec:
    """An ``n_rows x n_cols`` array of identical rectangular mirrors.

    ``offset_x``, ``offset_y`` and ``offset_z`` locate the top-left corner of
    the array relative to the source centre (along the wall, across the room
    to the wall, and down from the ceiling).  ``wall_offset`` is the distance
    from the left edge of the room to that same corner.
    """

    n_rows: int = 5
    n_cols: int = 5
    width: float = 0.1
    height: float = 0.1
    offset_x: float = -0.26
    offset_y: float = 2.5
    offset_z: float = 0.5
    wall_offset: float = 2.24
    reflectivity: float = 0.8

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValidationError("mirror array needs at least one row and one column")
        for name in ("width", "height", "offset_y"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"array.{name} must be strictly positive")
        for name in ("offset_z", "wall_offset"):
            if not getattr(self, name) >= 0:
                raise ValidationError(f"array.{name} must be non-negative")
        if not 0 < self.reflectivity <= 1:
            raise ValidationError("array.reflectivity must lie in (0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def n_mirrors(self) -> int:
        return self.n_rows * self.n_cols


@dataclass(frozen=True)
class OrientationGrid:
    """Per-mirror roll/yaw angles, stored as two ``(rows, cols)`` arrays."""

    roll: np.ndarray
    yaw: np.ndarray

    def __post_init__(self):
        roll = np.array(self.roll, dtype=float, ndmin=2)
        yaw = np.array(self.yaw, dtype=float, ndmin=2)
        if roll.shape != yaw.shape or roll.ndim != 2:
            raise ValidationError("roll and yaw grids must be 2-D arrays of equal shape")
        roll.setflags(write=False)
        yaw.setflags(write=False)
        object.__setattr__(self, "roll", roll)
        object.__setattr__(self, "yaw", yaw)

    @classmethod
    def uniform(cls, rows: int, cols: int, orientation: MirrorOrientation) -> "OrientationGrid":
        return cls(np.full((rows, cols), orientation.roll), np.full((rows, cols), orientation.yaw))

    @classmethod
    def from_orientations(cls, entries: Sequence[Sequence[MirrorOrientation]]) -> "OrientationGrid":
        return cls([[o.roll for o in row] for row in entries], [[o.yaw for o in row] for row in entries])

    @property
    def rows(self) -> int:
        return self.roll.shape[0]

    @property
    def cols(self) -> int:
        return self.roll.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.roll.shape

    def __getitem__(self, index: tuple[int, int]) -> MirrorOrientation:
        i, j = index
        return MirrorOrientation(float(self.roll[i, j]), float(self.yaw[i, j]))

    def normals(self) -> np.ndarray:
        """Unit normals as a ``(rows, cols, 3)`` array."""
        ca = np.cos(self.roll)
        return np.stack([np.sin(self.yaw) * ca, np.cos(self.yaw) * ca, np.sin(self.roll)], axis=-1)

    def check_matches(self, array: MirrorArraySpec) -> None:
        if self.shape != array.shape:
            raise ValidationError(
                f"orientation grid shape {self.shape} does not match array shape {array.shape}"
            )


def unit(v) -> np.ndarray:
    """Normalise ``v``; raises on a zero vector."""
    v = np.asarray(v, dtype=float)
    norm = math.sqrt(float(v @ v))
    if norm < _TINY:
        raise DegenerateGeometryError("cannot normalise a zero-length vector")
    return v / norm


def lambertian_order(semi_angle_half_power: float) -> float:
    """Lambertian emission order ``-ln 2 / ln cos(phi_half)``."""
    if not semi_angle_half_power > 0:
        raise ValueError("half-power semi-angle must be positive")
    c = math.cos(semi_angle_half_power)
    if c <= 0 or semi_angle_half_power >= math.pi / 2:
        raise ValueError("half-power semi-angle must be below pi/2")
    if c >= 1:
        raise ValueError("half-power semi-angle is too small to define an order")
    return -math.log(2.0) / math.log(c)


def normal_from_angles(o: MirrorOrientation) -> np.ndarray:
    """Surface normal of a mirror rotated by roll ``o.roll`` and yaw ``o.yaw``."""
    alpha, beta = o
    ca = math.cos(alpha)
    return np.array([math.sin(beta) * ca, math.cos(beta) * ca, math.sin(alpha)])


def angles_from_normal(n) -> MirrorOrientation:
    """Exact inverse of :func:`normal_from_angles` on the open angle box.

    The normal must face into the room (positive ``y`` component).
    """
    n = np.asarray(n, dtype=float)
    if not n[1] > 0:
        raise DegenerateGeometryError(
            "mirror normal must face into the room (n_y > 0); orientation outside the angle box"
        )
    nz = min(1.0, max(-1.0, float(n[2])))
    return MirrorOrientation(math.asin(nz), math.atan2(float(n[0]), float(n[1])))


def rotation_matrix(o: MirrorOrientation) -> np.ndarray:
    """Local-to-global rotation of a mirror; column 1 is the surface normal."""
    alpha, beta = o
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    yaw = np.array([[cb, sb, 0.0], [-sb, cb, 0.0], [0.0, 0.0, 1.0]])
    roll = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    return yaw @ roll


def mirror_axes(roll, yaw) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Width axis, normal and height axis for arrays of angles (vectorised).

    Equivalent to the columns of :func:`rotation_matrix`.
    """
    roll = np.asarray(roll, dtype=float)
    yaw = np.asarray(yaw, dtype=float)
    ca, sa = np.cos(roll), np.sin(roll)
    cb, sb = np.cos(yaw), np.sin(yaw)
    zero = np.zeros_like(ca)
    width_axis = np.stack([cb, -sb, zero], axis=-1)
    normal = np.stack([sb * ca, cb * ca, sa], axis=-1)
    height_axis = np.stack([-sb * sa, -cb * sa, ca], axis=-1)
    return width_axis, normal, height_axis


def snell_normal(source_pt, mirror_pt, target_pt) -> np.ndarray:
    """Mirror normal that reflects a ray from ``source_pt`` onto ``target_pt``.

    This is the normalised sum of the unit vectors from the mirror point to
    the source and to the target.
    """
    mirror_pt = np.asarray(mirror_pt, dtype=float)
    to_source = unit(np.asarray(source_pt, dtype=float) - mirror_pt)
    to_target = unit(np.asarray(target_pt, dtype=float) - mirror_pt)
    halfway = to_source + to_target
    norm = math.sqrt(float(halfway @ halfway))
    if norm < 1e-12:
        raise DegenerateGeometryError("incident and reflected rays are antiparallel")
    return halfway / norm


def reflect_about_normal(dir_to_receiver, normal) -> np.ndarray:
    """Mirror ``dir_to_receiver`` about ``normal``: ``2 (n.d) n - d``.

    Given the unit direction from a mirror point towards the receiver, the
    result is the unit direction back towards where the light came from.
    """
    d = np.asarray(dir_to_receiver, dtype=float)
    n = np.asarray(normal, dtype=float)
    cos_theta = float(n @ d)
    if cos_theta <= 0:
        raise GeometryError("receiver lies behind the mirror plane")
    return 2.0 * cos_theta * n - d


def mirror_center(array: MirrorArraySpec, i: int, j: int, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Global centre of mirror ``(i, j)`` (1-based row and column).

    ``origin`` is the source centre.
    """
    if not (1 <= i <= array.n_rows and 1 <= j <= array.n_cols):
        raise IndexError(f"mirror ({i}, {j}) outside a {array.n_rows}x{array.n_cols} array")
    x = array.offset_x + array.width / 2 + (j - 1) * array.width
    z = array.offset_z + array.height / 2 + (i - 1) * array.height
    return np.asarray(origin, dtype=float) + np.array([x, -array.offset_y, z])


def mirror_centers(array: MirrorArraySpec, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    """All mirror centres as a ``(rows, cols, 3)`` array, row-major."""
    j = np.arange(array.n_cols)
    i = np.arange(array.n_rows)
    x = array.offset_x + array.width / 2 + j * array.width
    z = array.offset_z + array.height / 2 + i * array.height
    out = np.empty((array.n_rows, array.n_cols, 3))
    out[..., 0] = x[None, :]
    out[..., 1] = -array.offset_y
    out[..., 2] = z[:, None]
    return out + np.asarray(origin, dtype=float)


def pre_reflection_image(element_pt, normal, receiver_pt, source_plane_height: float) -> np.ndarray:
    """Point of the source plane that a receiver sees through a mirror point.

    The direction from the element to the receiver is reflected about the
    normal and the resulting ray is followed to the plane
    ``z = source_plane_height``.
    """
    element_pt = np.asarray(element_pt, dtype=float)
    back = reflect_about_normal(unit(np.asarray(receiver_pt, dtype=float) - element_pt), normal)
    dz = source_plane_height - element_pt[2]
    if abs(back[2]) < 1e-15 or dz * back[2] <= 0:
        raise GeometryError("reflected ray never reaches the source plane")
    image = element_pt + (dz / back[2]) * back
    image[2] = source_plane_height
    return image
