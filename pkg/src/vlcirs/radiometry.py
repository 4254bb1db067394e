"""LoS and mirror-reflected DC channel gains.

Both gains are surface integrals evaluated with the midpoint rule on a
regular grid of square elements (side ``scenario.quadrature.edge``, adjusted
down so that an integer number of elements tiles each surface).

The mirror integrand is zero wherever the pre-reflection image of the
receiver falls outside the source aperture.  That lit region is the central
projection of the source rectangle, from the receiver's mirror image, onto
the mirror plane: a convex quadrilateral a few millimetres across.  Two rules
are available:

``"midpoint"``
    the aperture indicator is sampled at each element midpoint along with the
    rest of the integrand;
``"clipped"`` (default)
    the smooth part of the integrand is sampled at the midpoint and weighted
    by the exact fraction of the element lying inside the lit quadrilateral.

With a 1 cm source the plain rule needs 0.1 mm elements to settle; the
clipped rule is converged at 1 mm.

The gain of a mirror is its irradiance times the receiver prefactor and
concentrator gain.  The irradiance integrand already includes the incidence
cosine at the receiver, so it is not applied again unless
``ReceiverSpec.irs_extra_cosine`` is set (see :class:`ReceiverSpec`).

By default only elements inside (a safety margin around) the lit
quadrilateral are visited; ``prune=False`` walks the full grid and gives the
same sum.
"""

from __future__ import annotations

import math

import numpy as np

from vlcirs.errors import DegenerateGeometryError
from vlcirs.geometry import (
    MirrorOrientation,
    OrientationGrid,
    mirror_axes,
    mirror_centers,
)
from vlcirs.polyclip import box_polygon_overlap
from vlcirs.scenario import ChannelGains, ReceiverSpec, Scenario, UserSpec

__all__ = [
    "channel_gains",
    "concentrator_gain",
    "irs_elements",
    "irs_gain",
    "irs_gains_for_spots",
    "irs_irradiance",
    "irs_mirror_terms",
    "los_gain",
    "orientation_grid_for_spot",
    "spot_normals",
]

_MARGIN = 2
_CHUNK = 400_000


def concentrator_gain(incidence_angle: float, rx: ReceiverSpec) -> float:
    """Optical concentrator gain ``a^2 / sin^2(fov)`` inside the field of view."""
    if incidence_angle <= rx.fov:
        return rx.refractive_index**2 / math.sin(rx.fov) ** 2
    return 0.0


def _concentrator_from_cos(cos_in, rx: ReceiverSpec):
    g = rx.refractive_index**2 / math.sin(rx.fov) ** 2
    # cos is monotone on [0, pi]; the extra slack keeps fov = 90 deg inclusive.
    return np.where(np.asarray(cos_in) >= math.cos(rx.fov) - 1e-15, g, 0.0)


def _midpoints(length: float, edge: float) -> tuple[np.ndarray, float]:
    n = max(1, math.ceil(length / edge - 1e-9))
    step = length / n
    return (np.arange(n) + 0.5) * step - length / 2, step


def _prefactor(sc: Scenario) -> float:
    rx = sc.receiver
    return sc.source.efficiency * rx.responsivity * rx.area * rx.tia_gain


def los_gain(sc: Scenario, user: UserSpec) -> float:
    """Direct-path DC gain from the extended source to ``user``."""
    src = sc.source
    order = src.lambertian_order
    xs, dx = _midpoints(src.width, sc.quadrature.edge)
    ys, dy = _midpoints(src.length, sc.quadrature.edge)
    p = sc.user_point(user)
    d = np.empty((xs.size, ys.size, 3))
    d[..., 0] = p[0] - (sc.origin[0] + xs[:, None])
    d[..., 1] = p[1] - (sc.origin[1] + ys[None, :])
    d[..., 2] = p[2] - sc.origin[2]
    dist2 = np.einsum("...k,...k->...", d, d)
    if np.any(dist2 <= 0):
        raise DegenerateGeometryError(f"{user.role} coincides with a point of the source")
    dist = np.sqrt(dist2)
    cos_ir = d[..., 2] / dist
    cos_in = -(d @ np.asarray(sc.receiver.normal)) / dist
    g = _concentrator_from_cos(cos_in, sc.receiver)
    lit = (cos_ir > 0) & (cos_in > 0)
    f = np.where(lit, np.abs(cos_ir) ** order * cos_in * g / dist2, 0.0)
    return _prefactor(sc) * (order + 1) / (2 * math.pi) * float(np.sum(f)) * dx * dy


def spot_normals(sc: Scenario, q) -> np.ndarray:
    """Snell normals aiming every mirror centre's reflection of the source at ``q``.

    ``q`` is a ``(x, y, depth)`` spot in room coordinates.  Returns a
    ``(rows, cols, 3)`` array.
    """
    target = sc.point(*q)
    centers = mirror_centers(sc.array, sc.origin)
    to_src = sc.origin - centers
    to_tgt = target - centers
    n_src = np.linalg.norm(to_src, axis=-1, keepdims=True)
    n_tgt = np.linalg.norm(to_tgt, axis=-1, keepdims=True)
    if np.any(n_src < 1e-15) or np.any(n_tgt < 1e-15):
        raise DegenerateGeometryError("spot or source coincides with a mirror centre")
    halfway = to_src / n_src + to_tgt / n_tgt
    norm = np.linalg.norm(halfway, axis=-1, keepdims=True)
    if np.any(norm < 1e-12):
        raise DegenerateGeometryError("incident and reflected rays are antiparallel")
    return halfway / norm


def orientation_grid_for_spot(sc: Scenario, q) -> OrientationGrid:
    """Mirror angles that focus every mirror on the reflected spot ``q``."""
    n = spot_normals(sc, q)
    if np.any(n[..., 1] <= 0):
        raise DegenerateGeometryError("spot requires a mirror to face into the wall")
    roll = np.arcsin(np.clip(n[..., 2], -1.0, 1.0))
    yaw = np.arctan2(n[..., 0], n[..., 1])
    return OrientationGrid(roll, yaw)


def _lit_quads(sc, centers, u, n, v, p):
    """Lit quadrilateral of each mirror in its (width, height) coordinates.

    Returns ``(quads, ok, seen)``: ``(m, 4, 2)`` vertices in loop order, a
    mask of mirrors for which the projection is well defined (user in front
    of the mirror, whole source in front of the mirror plane), and the mask
    of mirrors that can reflect any light to the user (user and part of the
    source in front).
    """
    src = sc.source
    ox, oy, oz = sc.origin
    # loop order around the source rectangle
    corners = np.array(
        [[ox + sx * src.width / 2, oy + sy * src.length / 2, oz] for sx, sy in ((-1, -1), (-1, 1), (1, 1), (1, -1))]
    )
    height_above = np.einsum("mk,mk->m", p - centers, n)
    front = height_above > 0
    mirrored = p - 2.0 * height_above[:, None] * n
    d = corners[None, :, :] - mirrored[:, None, :]
    den = np.einsum("mck,mk->mc", d, n)
    # den > height_above  <=>  the corner lies in front of the mirror plane
    in_front = den > height_above[:, None]
    ok = front & np.all(in_front, axis=1)
    seen = front & np.any(in_front, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = height_above[:, None] / den
    hit = mirrored[:, None, :] + s[..., None] * d - centers[:, None, :]
    quads = np.stack([np.einsum("mck,mk->mc", hit, u), np.einsum("mck,mk->mc", hit, v)], axis=-1)
    return quads, ok, seen


def _element_ranges(sc, quads, ok, seen, nx, nz, stepx, stepz, prune):
    """Inclusive element index ranges per mirror, as four int arrays."""
    m = quads.shape[0]
    w, h = sc.array.width, sc.array.height
    k0x = np.zeros(m, dtype=np.int64)
    k1x = np.full(m, nx - 1, dtype=np.int64)
    k0z = np.zeros(m, dtype=np.int64)
    k1z = np.full(m, nz - 1, dtype=np.int64)
    if prune:
        a = quads[..., 0]
        b = quads[..., 1]
        with np.errstate(invalid="ignore"):
            lo_x = np.floor((a.min(axis=1) + w / 2) / stepx - 0.5) - _MARGIN
            hi_x = np.ceil((a.max(axis=1) + w / 2) / stepx - 0.5) + _MARGIN
            lo_z = np.floor((b.min(axis=1) + h / 2) / stepz - 0.5) - _MARGIN
            hi_z = np.ceil((b.max(axis=1) + h / 2) / stepz - 0.5) + _MARGIN
        k0x = np.where(ok, np.clip(np.where(ok, lo_x, 0), 0, nx), k0x).astype(np.int64)
        k1x = np.where(ok, np.clip(np.where(ok, hi_x, 0), -1, nx - 1), k1x).astype(np.int64)
        k0z = np.where(ok, np.clip(np.where(ok, lo_z, 0), 0, nz), k0z).astype(np.int64)
        k1z = np.where(ok, np.clip(np.where(ok, hi_z, 0), -1, nz - 1), k1z).astype(np.int64)
    k1x = np.where(seen, k1x, -1)
    return k0x, k1x, k0z, k1z


def _groups(counts, limit):
    """Consecutive index slices whose counts sum to at most ``limit`` (or one item)."""
    start, acc = 0, 0
    for k, c in enumerate(counts.tolist()):
        if acc and acc + c > limit:
            yield slice(start, k)
            start, acc = k, 0
        acc += c
    yield slice(start, len(counts))


def _irradiance_batch(sc: Scenario, centers, roll, yaw, p, prune=True, details=False):
    """Irradiance of each mirror at point ``p`` (global frame).

    ``centers`` is ``(m, 3)``; ``roll``/``yaw`` are ``(m,)``; ``p`` is one
    point or one point per mirror.  Returns the
    ``(m,)`` irradiances, plus per-element arrays when ``details`` is set.
    """
    m = centers.shape[0]
    p = np.broadcast_to(np.asarray(p, dtype=float), (m, 3))
    w, h = sc.array.width, sc.array.height
    edge = sc.quadrature.edge
    nx = max(1, math.ceil(w / edge - 1e-9))
    nz = max(1, math.ceil(h / edge - 1e-9))
    stepx, stepz = w / nx, h / nz
    u, n, v = mirror_axes(roll, yaw)
    quads, ok, seen = _lit_quads(sc, centers, u, n, v, p)

    k0x, k1x, k0z, k1z = _element_ranges(sc, quads, ok, seen, nx, nz, stepx, stepz, prune)
    cx = np.maximum(k1x - k0x + 1, 0)
    cz = np.maximum(k1z - k0z + 1, 0)
    counts = cx * cz
    total = int(counts.sum())
    if total == 0:
        zeros = np.zeros(m)
        return (zeros, None) if details else zeros
    if total > _CHUNK and not details and m > 1:
        # bound memory: mirrors are independent, so split them into groups
        out = np.empty(m)
        for sel in _groups(counts, _CHUNK):
            out[sel] = _irradiance_batch(sc, centers[sel], roll[sel], yaw[sel], p[sel], prune)
        return out

    owner = np.repeat(np.arange(m), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    local = np.arange(total) - np.repeat(starts, counts)
    per_row = np.repeat(cz, counts)
    kx = np.repeat(k0x, counts) + local // per_row
    kz = np.repeat(k0z, counts) + local % per_row
    a = (kx + 0.5) * stepx - w / 2
    b = (kz + 0.5) * stepz - h / 2
    r = centers[owner] + a[:, None] * u[owner] + b[:, None] * v[owner]
    ne = n[owner]

    d = p[owner] - r
    dist2 = np.einsum("ek,ek->e", d, d)
    dist = np.sqrt(dist2)
    ez = d[:, 2]
    nd = np.einsum("ek,ek->e", d, ne)
    back = 2.0 * (nd / dist)[:, None] * ne - d / dist[:, None]
    src = sc.source
    ox, oy, oz = sc.origin
    drop = oz - r[:, 2]
    valid = (ez > 0) & (nd > 0) & (drop * back[:, 2] > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(valid, drop / back[:, 2], 0.0)
    image = r + t[:, None] * back
    inside = (np.abs(image[:, 0] - ox) <= src.width / 2) & (np.abs(image[:, 1] - oy) <= src.length / 2)
    if sc.quadrature.rule == "clipped":
        coverage = np.where(inside, 1.0, 0.0)
        exact = ok[owner]
        if np.any(exact):
            sel = np.flatnonzero(exact)
            area = box_polygon_overlap(
                quads[owner[sel]],
                a[sel] - stepx / 2,
                a[sel] + stepx / 2,
                b[sel] - stepz / 2,
                b[sel] + stepz / 2,
            )
            coverage[sel] = area / (stepx * stepz)
    else:
        coverage = np.where(inside, 1.0, 0.0)
    lit = valid & (coverage > 0)
    cos_src = np.where(valid, -np.sign(t) * back[:, 2], 0.0)
    order = src.lambertian_order
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(lit, coverage * cos_src**order * ez * nd / (dist2 * dist2), 0.0)

    scale = (order + 1) * sc.array.reflectivity / (2 * math.pi) * stepx * stepz
    irradiance = scale * np.bincount(owner, weights=f, minlength=m)
    if details:
        return irradiance, {
            "mirror": owner,
            "points": r,
            "images": image,
            "lit": lit,
            "coverage": coverage,
            "weights": scale * f,
        }
    return irradiance


def _as_global_user(sc: Scenario, user) -> np.ndarray:
    if isinstance(user, UserSpec):
        return sc.user_point(user)
    return np.asarray(user, dtype=float)


def irs_irradiance(sc: Scenario, i: int, j: int, o: MirrorOrientation, user, prune: bool = True) -> float:
    """Irradiance at ``user`` reflected by mirror ``(i, j)`` (1-based) at orientation ``o``.

    ``user`` is a :class:`UserSpec` or a global-frame point.
    """
    a = sc.array
    if not (1 <= i <= a.n_rows and 1 <= j <= a.n_cols):
        raise IndexError(f"mirror ({i}, {j}) outside a {a.n_rows}x{a.n_cols} array")
    center = mirror_centers(a, sc.origin)[i - 1, j - 1][None, :]
    e = _irradiance_batch(sc, center, np.array([o.roll]), np.array([o.yaw]), _as_global_user(sc, user), prune)
    return float(e[0])


def irs_elements(sc: Scenario, i: int, j: int, o: MirrorOrientation, user, prune: bool = False) -> dict:
    """Per-element quadrature data for one mirror (for inspection and tests)."""
    center = mirror_centers(sc.array, sc.origin)[i - 1, j - 1][None, :]
    _, info = _irradiance_batch(
        sc, center, np.array([o.roll]), np.array([o.yaw]), _as_global_user(sc, user), prune, details=True
    )
    return info


def _receiver_terms(sc: Scenario, centers, roll, yaw, p, prune=True) -> np.ndarray:
    """Per-mirror gain terms for receiver point(s) ``p``."""
    e = _irradiance_batch(sc, centers, roll, yaw, p, prune)
    to_mirror = centers - p
    cos_rx = (to_mirror @ np.asarray(sc.receiver.normal)) / np.linalg.norm(to_mirror, axis=1)
    g = _concentrator_from_cos(cos_rx, sc.receiver)
    if sc.receiver.irs_extra_cosine:
        return _prefactor(sc) * e * g * np.where(cos_rx > 0, cos_rx, 0.0)
    return _prefactor(sc) * e * np.where(cos_rx > 0, g, 0.0)


def irs_mirror_terms(sc: Scenario, grid: OrientationGrid, user, prune: bool = True) -> np.ndarray:
    """Per-mirror contributions to the IRS gain, shape ``(rows, cols)``."""
    grid.check_matches(sc.array)
    p = _as_global_user(sc, user)
    centers = mirror_centers(sc.array, sc.origin).reshape(-1, 3)
    terms = _receiver_terms(sc, centers, grid.roll.ravel(), grid.yaw.ravel(), p, prune)
    return terms.reshape(grid.shape)


def irs_gains_for_spots(sc: Scenario, spots, users) -> np.ndarray:
    """IRS gains of several users for several reflected spots at once.

    ``spots`` is ``(s, 3)`` in room coordinates and ``users`` a sequence of
    :class:`UserSpec` or global points.  Returns an ``(s, len(users))``
    array, with NaN rows for spots no valid orientation can produce.  Each
    entry equals ``irs_gain(sc, orientation_grid_for_spot(sc, q), user)``.
    """
    spots = np.atleast_2d(np.asarray(spots, dtype=float))
    pts = np.array([_as_global_user(sc, u) for u in users], dtype=float).reshape(-1, 3)
    s, k = spots.shape[0], pts.shape[0]
    centers = mirror_centers(sc.array, sc.origin).reshape(-1, 3)
    m = centers.shape[0]
    targets = sc.origin + spots + np.array([0.0, -sc.array.offset_y, 0.0])
    to_src = (sc.origin - centers)[None, :, :]
    to_tgt = targets[:, None, :] - centers[None, :, :]
    n_src = np.linalg.norm(to_src, axis=-1, keepdims=True)
    n_tgt = np.linalg.norm(to_tgt, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        halfway = to_src / n_src + to_tgt / n_tgt
        norm = np.linalg.norm(halfway, axis=-1, keepdims=True)
        normal = halfway / norm
    bad = (n_tgt[..., 0] < 1e-15) | (norm[..., 0] < 1e-12) | ~(normal[..., 1] > 0)
    good = ~np.any(bad, axis=1)
    out = np.full((s, k), np.nan)
    idx = np.flatnonzero(good)
    if idx.size == 0:
        return out
    normal = normal[idx]
    roll = np.arcsin(np.clip(normal[..., 2], -1.0, 1.0))
    yaw = np.arctan2(normal[..., 0], normal[..., 1])
    g = idx.size
    # layout: spot-major, then user, then mirror
    roll_b = np.repeat(roll[:, None, :], k, axis=1).reshape(-1)
    yaw_b = np.repeat(yaw[:, None, :], k, axis=1).reshape(-1)
    centers_b = np.tile(centers, (g * k, 1))
    p_b = np.repeat(np.tile(pts, (g, 1)), m, axis=0)
    terms = _receiver_terms(sc, centers_b, roll_b, yaw_b, p_b).reshape(g, k, m)
    for a, row in enumerate(idx):
        for b in range(k):
            out[row, b] = math.fsum(terms[a, b])
    return out


def irs_gain(sc: Scenario, grid: OrientationGrid, user, prune: bool = True) -> float:
    """Mirror-array DC gain at ``user`` for the given orientations."""
    return math.fsum(irs_mirror_terms(sc, grid, user, prune).ravel())


def channel_gains(sc: Scenario, grid: OrientationGrid | None, user: UserSpec) -> ChannelGains:
    """LoS and IRS gains for ``user``; ``grid=None`` means no mirror array."""
    los = los_gain(sc, user)
    irs = 0.0 if grid is None else irs_gain(sc, grid, user)
    return ChannelGains(los, irs)
