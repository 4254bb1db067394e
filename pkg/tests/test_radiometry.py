import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlcirs import default_scenario
from vlcirs.geometry import (
    MirrorOrientation,
    OrientationGrid,
    mirror_axes,
    mirror_center,
    mirror_centers,
    pre_reflection_image,
)
from vlcirs.radiometry import (
    channel_gains,
    concentrator_gain,
    irs_elements,
    irs_gain,
    irs_gains_for_spots,
    irs_irradiance,
    irs_mirror_terms,
    los_gain,
    orientation_grid_for_spot,
    spot_normals,
)
from vlcirs.scenario import ReceiverSpec, UserSpec

SC = default_scenario()
FOB = orientation_grid_for_spot(SC, (0.2, 2.0, 3.0))


def image_source_irradiance(sc, i, j, o, p, n_src=200):
    """Independent oracle: integrate over the source through the receiver's mirror image.

    A source point contributes when the straight line to the mirrored
    receiver crosses the mirror plane inside the mirror rectangle.
    """
    u, n, v = (np.asarray(a) for a in mirror_axes(o.roll, o.yaw))
    c = mirror_center(sc.array, i, j, sc.origin)
    p = np.asarray(p, dtype=float)
    mirrored = p - 2 * ((p - c) @ n) * n
    src = sc.source
    hx = src.width / n_src
    hy = src.length / n_src
    xs = sc.origin[0] - src.width / 2 + hx * (np.arange(n_src) + 0.5)
    ys = sc.origin[1] - src.length / 2 + hy * (np.arange(n_src) + 0.5)
    s = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
    s = np.column_stack([s, np.full(len(s), sc.origin[2])])
    d = mirrored - s
    length = np.linalg.norm(d, axis=1)
    t = ((c - s) @ n) / (d @ n)
    m = s + t[:, None] * d
    a = (m - c) @ u
    b = (m - c) @ v
    on_mirror = (np.abs(a) <= sc.array.width / 2) & (np.abs(b) <= sc.array.height / 2) & (t > 0) & (t < 1)
    cos_src = d[:, 2] / length
    to_p = p - m
    cos_in = to_p[:, 2] / np.linalg.norm(to_p, axis=1)
    order = src.lambertian_order
    f = np.where(on_mirror & (cos_src > 0) & (cos_in > 0), cos_src ** (order + 1) * cos_in / length**2, 0.0)
    return (order + 1) * sc.array.reflectivity / (2 * math.pi) * f.sum() * hx * hy


def test_concentrator_gain_inside_and_outside_fov():
    rx = ReceiverSpec(fov=math.radians(60))
    g = 1.5**2 / math.sin(math.radians(60)) ** 2
    assert concentrator_gain(0.0, rx) == pytest.approx(g)
    assert concentrator_gain(math.radians(60), rx) == pytest.approx(g)
    assert concentrator_gain(math.radians(61), rx) == 0.0
    assert concentrator_gain(0.3, ReceiverSpec()) == pytest.approx(2.25)


def test_los_gain_matches_point_source_formula():
    order = SC.source.lambertian_order
    d = np.array([0.2, -0.5, 3.0])
    r = np.linalg.norm(d)
    cos = 3.0 / r
    pref = 0.44 * 0.54 * 1e-4 * 1.0
    point = pref * (order + 1) / (2 * math.pi * r**2) * cos**order * cos * 2.25 * 1e-4
    assert los_gain(SC, SC.bob) == pytest.approx(point, rel=1e-5)


@given(st.floats(0.0, 2.4))
def test_los_gain_is_symmetric_about_source_axis(x):
    a = los_gain(SC, UserSpec("Eve", x, 2.0, 3.0))
    b = los_gain(SC, UserSpec("Eve", -x, 2.0, 3.0))
    assert a == pytest.approx(b, rel=1e-12)


def test_los_gain_decreases_away_from_source():
    vals = [los_gain(SC, UserSpec("Eve", x, 2.5, 3.0)) for x in (0.0, 0.5, 1.0, 2.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("ij", [(3, 3), (1, 1), (5, 2)])
def test_irs_irradiance_matches_image_source_oracle(ij):
    o = FOB[ij[0] - 1, ij[1] - 1]
    p = SC.user_point(SC.bob)
    ours = irs_irradiance(SC, *ij, o, p)
    oracle = image_source_irradiance(SC, *ij, o, p)
    assert ours > 0
    assert ours == pytest.approx(oracle, rel=1e-5)


def test_irs_irradiance_oracle_when_lit_patch_straddles_mirror_edge():
    # a 4 mm mirror is smaller than the lit patch, so the aperture cuts it
    sc = replace(SC, array=replace(SC.array, n_rows=1, n_cols=1, width=0.004, height=0.004))
    o = orientation_grid_for_spot(sc, (0.2, 2.0, 3.0))[0, 0]
    p = sc.user_point(sc.bob)
    ours = irs_irradiance(sc, 1, 1, o, p)
    oracle = image_source_irradiance(sc, 1, 1, o, p, n_src=800)
    assert ours == pytest.approx(oracle, rel=2e-3)


def test_clipped_and_plain_midpoint_agree_at_fine_edge():
    p = SC.user_point(SC.bob)
    o = FOB[2, 2]
    clipped = irs_irradiance(SC, 3, 3, o, p)
    plain = irs_irradiance(SC.with_quadrature(1e-4, "midpoint"), 3, 3, o, p)
    assert plain == pytest.approx(clipped, rel=5e-3)


def test_clipped_rule_converges_between_coarse_edges():
    a = irs_gain(SC.with_quadrature(2e-3), FOB, SC.bob)
    b = irs_gain(SC, FOB, SC.bob)
    assert abs(a - b) / b < 1e-5


angles = st.floats(-1.2, 1.2)


@settings(max_examples=40, deadline=None)
@given(angles, angles, st.sampled_from([1e-3, 2.5e-3]), st.sampled_from(["clipped", "midpoint"]))
def test_pruning_is_exact_and_values_non_negative(a, b, edge, rule):
    sc = SC.with_quadrature(edge, rule)
    o = MirrorOrientation(a, b)
    p = sc.user_point(sc.bob)
    pruned = irs_irradiance(sc, 2, 4, o, p, prune=True)
    full = irs_irradiance(sc, 2, 4, o, p, prune=False)
    assert pruned >= 0
    assert pruned == pytest.approx(full, rel=1e-12, abs=1e-300)


def test_midpoint_rule_lit_elements_image_inside_source():
    sc = SC.with_quadrature(1e-3, "midpoint")
    o = FOB[2, 2]
    p = sc.user_point(sc.bob)
    info = irs_elements(sc, 3, 3, o, p)
    lit = np.flatnonzero(info["weights"] > 0)
    assert lit.size > 0
    u, n, v = mirror_axes(o.roll, o.yaw)
    for k in lit:
        img = pre_reflection_image(info["points"][k], n, p, sc.origin[2])
        assert abs(img[0] - sc.origin[0]) <= sc.source.width / 2
        assert abs(img[1] - sc.origin[1]) <= sc.source.length / 2


def test_irs_gain_is_additive_over_mirrors():
    terms = irs_mirror_terms(SC, FOB, SC.bob)
    assert irs_gain(SC, FOB, SC.bob) == math.fsum(terms.ravel())
    a = SC.array
    total = 0.0
    for i in range(a.n_rows):
        for j in range(a.n_cols):
            one = replace(
                SC, array=replace(a, n_rows=1, n_cols=1, offset_x=a.offset_x + j * a.width,
                                  offset_z=a.offset_z + i * a.height)
            )
            total += irs_gain(one, OrientationGrid([[FOB.roll[i, j]]], [[FOB.yaw[i, j]]]), one.bob)
    assert total == pytest.approx(irs_gain(SC, FOB, SC.bob), rel=1e-12)


def test_irs_gain_shape_mismatch():
    from vlcirs.errors import ValidationError

    with pytest.raises(ValidationError):
        irs_gain(SC, OrientationGrid.uniform(2, 2, MirrorOrientation(0, 0)), SC.bob)


def test_batched_spot_gains_are_bit_identical():
    rng = np.random.default_rng(3)
    spots = np.column_stack([rng.uniform(-2.5, 2.5, 6), rng.uniform(0, 5, 6), np.full(6, 3.0)])
    spots[0] = (0.2, 2.0, 3.0)
    batch = irs_gains_for_spots(SC, spots, [SC.bob, SC.eve])
    for q, row in zip(spots, batch):
        grid = orientation_grid_for_spot(SC, q)
        assert row[0] == irs_gain(SC, grid, SC.bob)
        assert row[1] == irs_gain(SC, grid, SC.eve)


def test_spot_reflecting_source_straight_back_needs_no_rotation():
    # one mirror centred below the source axis at depth 1.5 reflects onto (0, 2.5, 3)
    sc = replace(SC, array=replace(SC.array, n_rows=1, n_cols=1, offset_x=-0.05, offset_z=1.45))
    grid = orientation_grid_for_spot(sc, (0.0, 2.5, 3.0))
    assert grid.roll[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert grid.yaw[0, 0] == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(0.0, 5.0))
def test_spot_normals_round_trip_every_mirror(x, y):
    from vlcirs.optimizer import implied_spot

    grid = orientation_grid_for_spot(SC, (x, y, 3.0))
    np.testing.assert_allclose(grid.normals(), spot_normals(SC, (x, y, 3.0)), atol=1e-12)
    for i in range(1, 6):
        for j in range(1, 6):
            q = implied_spot(SC, grid, i, j)
            assert q.x == pytest.approx(x, abs=1e-9)
            assert q.y == pytest.approx(y, abs=1e-9)


def test_channel_gains_without_array():
    g = channel_gains(SC, None, SC.bob)
    assert g.irs == 0.0 and g.total == g.los > 0
    g = channel_gains(SC, FOB, SC.bob)
    assert g.total == g.los + g.irs and g.irs > 0


def test_reference_gain_values():
    # regression guard for the default scenario at the default 1 mm edge
    assert los_gain(SC, SC.bob) == pytest.approx(1.4687290158815832e-10, rel=1e-12)
    assert irs_gain(SC, FOB, SC.bob) == pytest.approx(8.451774661300723e-11, rel=1e-12)


def test_extra_receiver_cosine_scales_each_mirror_by_its_centre_cosine():
    double = replace(SC, receiver=replace(SC.receiver, irs_extra_cosine=True))
    single = irs_mirror_terms(SC, FOB, SC.bob)
    both = irs_mirror_terms(double, FOB, SC.bob)
    p = SC.user_point(SC.bob)
    centers = mirror_centers(SC.array, SC.origin)
    to_mirror = centers - p
    cos_rx = (to_mirror @ np.asarray(SC.receiver.normal)) / np.linalg.norm(to_mirror, axis=-1)
    assert np.all((cos_rx > 0) & (cos_rx < 1))
    np.testing.assert_allclose(both, single * cos_rx, rtol=1e-13)
