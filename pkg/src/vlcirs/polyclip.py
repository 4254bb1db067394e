"""Vectorised overlap area of axis-aligned boxes with convex polygons.

Used to integrate the source-aperture indicator exactly over each mirror
quadrature element.  The lit region of a mirror is the central projection of
the (rectangular) source onto the mirror plane, i.e. a convex quadrilateral.
"""

from __future__ import annotations

import numpy as np

__all__ = ["box_polygon_overlap", "polygon_area", "polygon_signed_area"]


def polygon_area(poly: np.ndarray, count: np.ndarray) -> np.ndarray:
    """Unsigned shoelace area of padded polygons ``(e, k, 2)`` with ``count`` vertices."""
    e, k, _ = poly.shape
    if k == 0:
        return np.zeros(e)
    idx = np.arange(k)
    safe = np.maximum(count, 1)
    nxt = (idx[None, :] + 1) % safe[:, None]
    q = np.take_along_axis(poly, np.repeat(nxt[..., None], 2, axis=-1), axis=1)
    cross = poly[..., 0] * q[..., 1] - q[..., 0] * poly[..., 1]
    cross = np.where(idx[None, :] < count[:, None], cross, 0.0)
    return np.where(count >= 3, 0.5 * np.abs(cross.sum(axis=1)), 0.0)


def _clip(poly, count, axis, bound, keep_below):
    """Sutherland-Hodgman step against ``x[axis] <= bound`` (or ``>=``)."""
    e, k, _ = poly.shape
    idx = np.arange(k)
    safe = np.maximum(count, 1)
    nxt_idx = (idx[None, :] + 1) % safe[:, None]
    nxt = np.take_along_axis(poly, np.repeat(nxt_idx[..., None], 2, axis=-1), axis=1)
    sign = 1.0 if keep_below else -1.0
    dc = sign * (poly[..., axis] - bound[:, None])
    dn = sign * (nxt[..., axis] - bound[:, None])
    cin = dc <= 0
    nin = dn <= 0
    live = idx[None, :] < count[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(cin != nin, dc / (dc - dn), 0.0)
    cross = poly + t[..., None] * (nxt - poly)
    # snap the clipped coordinate to the bound exactly
    cross[..., axis] = np.where(cin != nin, bound[:, None], cross[..., axis])

    first = np.where((cin & nin)[..., None], nxt, cross)
    first_ok = live & (cin | nin)
    second_ok = live & ~cin & nin

    out = np.empty((e, 2 * k, 2))
    out[:, 0::2] = first
    out[:, 1::2] = nxt
    ok = np.empty((e, 2 * k), dtype=bool)
    ok[:, 0::2] = first_ok
    ok[:, 1::2] = second_ok
    order = np.argsort(~ok, axis=1, kind="stable")
    new_count = ok.sum(axis=1)
    width = int(new_count.max()) if e else 0
    order = order[:, :width]
    return np.take_along_axis(out, np.repeat(order[..., None], 2, axis=-1), axis=1), new_count


def _clip_all(poly, x0, x1, y0, y1):
    count = np.full(poly.shape[0], poly.shape[1])
    for axis, bound, below in ((0, x1, True), (0, x0, False), (1, y1, True), (1, y0, False)):
        poly, count = _clip(poly, count, axis, bound, below)
    return polygon_area(poly, count)


def box_polygon_overlap(poly: np.ndarray, x0, x1, y0, y1) -> np.ndarray:
    """Area of ``[x0, x1] x [y0, y1]`` intersected with convex ``poly``.

    ``poly`` is ``(e, k, 2)`` (every row a closed convex polygon with ``k``
    vertices, either winding); the bounds are ``(e,)`` arrays.  Boxes that
    lie wholly inside or wholly outside one polygon edge are settled without
    clipping.
    """
    poly = np.asarray(poly, dtype=float)
    x0, x1, y0, y1 = (np.asarray(b, dtype=float) for b in (x0, x1, y0, y1))
    edge = np.roll(poly, -1, axis=1) - poly
    box = np.stack(
        [np.stack([x0, y0], -1), np.stack([x1, y0], -1), np.stack([x1, y1], -1), np.stack([x0, y1], -1)], axis=1
    )
    # winding sign so that "inside" means a non-negative cross product
    wind = np.sign(polygon_signed_area(poly))[:, None, None]
    rel = box[:, None, :, :] - poly[:, :, None, :]
    cross = wind * (edge[:, :, None, 0] * rel[..., 1] - edge[:, :, None, 1] * rel[..., 0])
    outside = np.any(np.all(cross < 0, axis=2), axis=1)
    inside = np.all(cross >= 0, axis=(1, 2))
    area = np.where(inside, (x1 - x0) * (y1 - y0), 0.0)
    todo = np.flatnonzero(~outside & ~inside)
    if todo.size:
        area[todo] = _clip_all(poly[todo], x0[todo], x1[todo], y0[todo], y1[todo])
    return area


def polygon_signed_area(poly: np.ndarray) -> np.ndarray:
    """Signed shoelace area of ``(e, k, 2)`` polygons (positive when counter-clockwise)."""
    q = np.roll(poly, -1, axis=1)
    return 0.5 * np.sum(poly[..., 0] * q[..., 1] - q[..., 0] * poly[..., 1], axis=1)
