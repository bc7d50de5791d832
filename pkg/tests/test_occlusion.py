import math

import numpy as np
import pytest

from occpf.errors import GeometryError, StateError
from occpf.model import VehicleBody, corners
from occpf.occlusion import (OCCLUDED, VISIBLE, LabelTracker, TrackLabel, VisibilityLabel,
                             classify_visibility, occlusion_flag, shadow_wedge, update_labels)
from occpf.sim import run_simulation

from oracles import (brute_force_silhouette, near_wedge_boundary, random_configurations,
                     ray_cast_hidden)

BODY = VehicleBody(4.8, 1.8)


def _quad(x, y, yaw=0.0):
    return corners(x, y, yaw, BODY)


def test_silhouette_example():
    occ = _quad(80.0, 6.0)
    w = shadow_wedge((0.0, 10.0), occ)
    assert w.lower == pytest.approx((77.6, 5.1))
    assert w.upper == pytest.approx((82.4, 6.9))
    (a0, a1), (b0, b1) = w.boundary_lines
    assert (a1[1] - a0[1]) / (a1[0] - a0[0]) == pytest.approx(-4.9 / 77.6)
    assert (b1[1] - b0[1]) / (b1[0] - b0[0]) == pytest.approx(-3.1 / 82.4)
    i, j = brute_force_silhouette(np.array([0.0, 10.0]), np.array(occ))
    assert occ[i] == pytest.approx(w.lower)
    assert occ[j] == pytest.approx(w.upper)


def test_silhouette_rotated_occluder_matches_brute_force():
    ego = (0.0, 10.0)
    for yaw in (math.pi / 2, 0.3, -1.1, 2.9):
        occ = _quad(60.0, 4.0, yaw)
        w = shadow_wedge(ego, occ)
        i, j = brute_force_silhouette(np.array(ego), np.array(occ))
        assert w.lower == pytest.approx(occ[i])
        assert w.upper == pytest.approx(occ[j])
    assert shadow_wedge(ego, _quad(60.0, 4.0, math.pi / 2)).lower != shadow_wedge(ego, _quad(60.0, 4.0)).lower


def test_wedge_symmetric_on_axis():
    w = shadow_wedge((0.0, 6.0), _quad(30.0, 6.0))
    assert w.lower[1] - 6.0 == pytest.approx(-(w.upper[1] - 6.0))
    assert w.lower[0] == w.upper[0]


def test_viewpoint_inside_occluder_rejected():
    with pytest.raises(GeometryError):
        shadow_wedge((80.0, 6.0), _quad(80.0, 6.0))


def test_classify_examples():
    assert classify_visibility((0.0, 10.0), {}, _quad(75.0, 2.0)).value == VISIBLE
    lab = classify_visibility((0.0, 10.0), {"o": _quad(40.0, 6.0)}, _quad(75.0, 2.0))
    assert lab == VisibilityLabel(OCCLUDED, "o")
    assert classify_visibility((0.0, 10.0), {"o": _quad(80.0, 6.0)}, _quad(115.0, 2.0)).value == VISIBLE
    for ego, occ, tgt, expect in (((0, 10), (40, 6), (75, 2), True), ((0, 10), (80, 6), (115, 2), False)):
        hidden = ray_cast_hidden(np.array([ego], float), np.array([_quad(*occ)]), np.array([_quad(*tgt)]))
        assert bool(hidden[0]) is expect


def test_partial_visibility_counts_as_visible():
    # target straddles the upper silhouette ray
    lab = classify_visibility((0.0, 10.0), {"o": _quad(40.0, 6.0)}, _quad(75.0, 3.5))
    assert lab.value == VISIBLE


def test_union_of_two_occluders_is_visible():
    # each occluder hides only half of the target
    occl = {"a": _quad(40.0, 5.0), "b": _quad(40.0, 7.0)}
    assert classify_visibility((0.0, 6.0), occl, _quad(90.0, 6.0)).value == VISIBLE


def test_matches_ray_casting_on_random_configurations():
    ego, occ, tgt = random_configurations(2000, seed=11)
    expect = ray_cast_hidden(ego, occ, tgt)
    skip = near_wedge_boundary(ego, occ, tgt, 1e-6)
    got = np.array([classify_visibility(tuple(e), {"o": [tuple(c) for c in o]},
                                        [tuple(c) for c in t]).value == OCCLUDED
                    for e, o, t in zip(ego, occ, tgt)])
    assert expect[~skip].sum() > 200  # both classes represented
    assert (got[~skip] == expect[~skip]).all()


def test_shadow_grows_down_range():
    ego = (0.0, 10.0)
    occ = {"o": _quad(40.0, 6.0)}
    # move along the ray through the occluder center
    seen_occluded = False
    for s in np.linspace(1.5, 6.0, 40):
        x, y = ego[0] + s * 40.0, ego[1] + s * (6.0 - 10.0)
        occluded = classify_visibility(ego, occ, _quad(x, y, math.atan2(-4.0, 40.0))).value == OCCLUDED
        assert not (seen_occluded and not occluded)
        seen_occluded |= occluded
    assert seen_occluded


def _vis(v):
    return {"b": VisibilityLabel(v, "o" if v == OCCLUDED else None)}


def test_reveal_sets_occluded_origin():
    labels = {"b": TrackLabel()}
    labels = update_labels(labels, _vis(OCCLUDED), 13.95, {})
    assert labels["b"].visibility == OCCLUDED and not labels["b"].occluded_origin
    labels = update_labels(labels, _vis(VISIBLE), 13.96, {"b": (False, False)}, last_t=13.95)
    assert labels["b"].occluded_origin
    assert labels["b"].first_reveal_time == 13.96


def test_always_visible_never_tagged():
    labels = {"b": TrackLabel()}
    for k in range(100):
        labels = update_labels(labels, _vis(VISIBLE), k * 0.01, {"b": (False, False)})
    assert not labels["b"].occluded_origin


def test_release_after_hold_and_when_behind():
    tr = LabelTracker(["b"], release_hold=1.0)
    tr.update(_vis(OCCLUDED), 0.0, {})
    tr.update(_vis(VISIBLE), 0.1, {"b": (False, False)})
    # safety counted from the first step after the reveal (t=0.11)
    for k in range(11, 111):
        tr.update(_vis(VISIBLE), k / 100, {"b": (True, False)})
    assert tr.labels["b"].occluded_origin  # 0.99 s of safety
    tr.update(_vis(VISIBLE), 1.11, {"b": (True, False)})
    assert not tr.labels["b"].occluded_origin

    tr = LabelTracker(["b"])
    tr.update(_vis(OCCLUDED), 0.0, {})
    tr.update(_vis(VISIBLE), 0.1, {"b": (False, False)})
    tr.update(_vis(VISIBLE), 0.2, {"b": (False, True)})
    assert not tr.labels["b"].occluded_origin


def test_unsafe_step_resets_hold():
    tr = LabelTracker(["b"], release_hold=0.5)
    tr.update(_vis(OCCLUDED), 0.0, {})
    tr.update(_vis(VISIBLE), 0.1, {"b": (True, False)})
    tr.update(_vis(VISIBLE), 0.4, {"b": (True, False)})
    tr.update(_vis(VISIBLE), 0.5, {"b": (False, False)})
    tr.update(_vis(VISIBLE), 0.8, {"b": (True, False)})
    assert tr.labels["b"].occluded_origin


def test_decreasing_time_rejected():
    tr = LabelTracker(["b"])
    tr.update(_vis(VISIBLE), 1.0, {})
    with pytest.raises(StateError):
        tr.update(_vis(VISIBLE), 0.5, {})


def test_flag():
    vis = TrackLabel()
    occ = TrackLabel(visibility=OCCLUDED, occluded_by="x")
    assert occlusion_flag({"a": vis, "b": vis}) == 0
    assert occlusion_flag({"a": vis, "b": occ, "c": vis}) == 1


def test_bundled_run_flag_pattern_and_per_step_cross_check(bundled_scenario):
    trace = run_simulation(bundled_scenario, "pf-oapp")
    flag = trace.column("occl_flag")
    changes = [flag[i] for i in range(len(flag)) if i == 0 or flag[i] != flag[i - 1]]
    assert changes == [0, 1, 0]

    xs, ys = trace.column("x"), trace.column("y")
    brown = next(o for o in bundled_scenario.obstacles if o.id == "brown")
    orange = next(o for o in bundled_scenario.obstacles if o.id == "orange")
    ego, occ, tgt = [], [], []
    for k in range(0, len(trace), 5):
        p = trace.obstacle_poses[k]
        ego.append((xs[k], ys[k]))
        ox, oy, ov, ol = p["orange"]
        bx, by, bv, bl = p["brown"]
        occ.append(corners(ox, oy, math.atan2(ol, ov), orange.body))
        tgt.append(corners(bx, by, math.atan2(bl, bv), brown.body))
    ego, occ, tgt = np.array(ego), np.array(occ), np.array(tgt)
    expect = ray_cast_hidden(ego, occ, tgt)
    skip = near_wedge_boundary(ego, occ, tgt, 1e-6)
    got = np.array([trace.labels[k]["brown"].visibility == OCCLUDED for k in range(0, len(trace), 5)])
    assert (got[~skip] == expect[~skip]).all()
