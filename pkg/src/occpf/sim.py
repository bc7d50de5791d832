"""Fixed-step simulation loop and trace metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .dynamics import speed_controller, step_dynamics, steering_controller
from .errors import NumericalError
from .model import corners, obstacle_pose_at
from .occlusion import OCCLUDED, LabelTracker, classify_visibility
from .planner import (STATUS_STALLED, PerceivedObstacle, Planner, PlannerOutput,
                      nearest_lane_center, parse_mode)
from .rss import relative_distance, rss_lateral_distance, rss_longitudinal_distance
from .scenario import Scenario

COLUMNS = ("t", "x", "y", "v", "v_star", "beta_deg", "psi_deg", "delta_deg",
           "fx", "fy", "alpha1", "alpha2", "occl_flag", "status")

SIGN_DEADBAND_DEG = 0.05


@dataclass
class EgoTrace:
    mode: str
    dt: float
    rows: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    obstacle_poses: list = field(default_factory=list)
    valid: bool = True
    error: Optional[str] = None

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = COLUMNS.index(name)
        return [r[i] for r in self.rows]

    def occluded_intervals(self, track_id: str) -> list[tuple[float, float]]:
        """Maximal ``[start, end)`` intervals during which ``track_id`` was Occluded."""
        out = []
        start = None
        times = self.column("t")
        for t, labs in zip(times, self.labels):
            occ = labs[track_id].visibility == OCCLUDED
            if occ and start is None:
                start = t
            elif not occ and start is not None:
                out.append((start, t))
                start = None
        if start is not None:
            out.append((start, math.inf))
        return out


def _row(t, s, out: PlannerOutput):
    return (t, s.x, s.y, s.v, out.v_star, math.degrees(s.sideslip), math.degrees(s.yaw),
            math.degrees(s.steer), out.fx, out.fy, out.alpha1, out.alpha2,
            out.occlusion_flag, out.status)


def run_simulation(scenario: Scenario, mode: str, force_unit_alpha: bool = False) -> EgoTrace:
    """Simulate one planner on one scenario.

    Per step: place scripted obstacles, classify visibility from the ego
    center, update labels, plan, run the controllers, integrate. The run
    ends after ``duration`` or once the ego passes ``goal_x``. A
    :class:`NumericalError` ends the run early with ``trace.valid = False``.
    """
    mode = parse_mode(mode)
    sc = scenario.calibrated()
    dyn = sc.dynamics
    planner = Planner(mode, sc.road, sc.ego_body, sc.goal_x, sc.pf, sc.rss, sc.dt,
                      sc.ego.v, sc.planner, force_unit_alpha)
    tracker = LabelTracker([o.id for o in sc.obstacles], sc.planner.release_hold)
    trace = EgoTrace(mode, sc.dt)
    state = sc.ego
    n_steps = int(round(sc.duration / sc.dt))

    for k in range(n_steps):
        t = k * sc.dt
        poses = {}
        for o in sc.obstacles:
            x, y, v, v_lat = obstacle_pose_at(o, t, sc.road)
            poses[o.id] = (x, y, v, v_lat, corners(x, y, math.atan2(v_lat, v) if v > 0 else 0.0, o.body))

        ego_pt = (state.x, state.y)
        visibility = {}
        for o in sc.obstacles:
            occluders = {oid: p[4] for oid, p in poses.items() if oid != o.id}
            visibility[o.id] = classify_visibility(ego_pt, occluders, poses[o.id][4])

        safety = {}
        for o in sc.obstacles:
            x, y, v, v_lat, _ = poses[o.id]
            sx = rss_longitudinal_distance(state.v, v, sc.rss)
            sy = rss_lateral_distance(state.v_lat if y >= state.y else -state.v_lat,
                                      v_lat if state.y >= y else -v_lat, sc.rss)
            d = relative_distance(x - state.x, y - state.y, sc.ego_body, o.body)
            safety[o.id] = (d.d_x >= sx and d.d_y >= sy, x - state.x < 0.0)
        labels = tracker.update(visibility, t, safety)

        perceived = [
            PerceivedObstacle(o.id, poses[o.id][0], poses[o.id][1], poses[o.id][2], poses[o.id][3],
                              o.body, labels[o.id].occluded_origin)
            for o in sc.obstacles if labels[o.id].visibility != OCCLUDED
        ]
        out = planner.plan_step(t, state, perceived, tracker.flag)
        steer = steering_controller(out.theta_des, state, dyn, sc.dt)
        accel = speed_controller(out.v_star, state, dyn, sc.dt)

        trace.rows.append(_row(t, state, out))
        trace.labels.append(labels)
        trace.obstacle_poses.append({oid: p[:4] for oid, p in poses.items()})

        if state.x >= sc.goal_x:
            break
        try:
            state = step_dynamics(state, steer, accel, sc.dt, dyn)
        except NumericalError as exc:
            trace.valid = False
            trace.error = str(exc)
            break
    return trace


@dataclass(frozen=True)
class MetricsReport:
    max_lateral_deviation: float
    min_speed: float
    max_abs_sideslip: float
    max_abs_yaw: float
    max_abs_steer: float
    steer_saturation_steps: int
    steer_sign_changes_post_reveal: int
    stalled: bool
    reveal_time: Optional[float]
    alpha1_at_reveal: Optional[float]
    alpha2_at_reveal: Optional[float]


def count_sign_changes(values: Sequence[float], deadband: float = SIGN_DEADBAND_DEG) -> int:
    """Sign flips of ``values`` ignoring samples with ``|v| <= deadband``."""
    last = 0
    n = 0
    for v in values:
        if abs(v) <= deadband:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            n += 1
        last = s
    return n


def metrics_from_columns(cols: dict, lane_center: Optional[float] = None,
                         steer_limit_deg: float = 10.0) -> MetricsReport:
    """Metrics from the trace column contract alone.

    ``lane_center`` defaults to the first ``y`` sample (the ego starts on
    its lane center in every bundled scenario).
    """
    t, y, v = cols["t"], cols["y"], cols["v"]
    delta = cols["delta_deg"]
    flag = cols["occl_flag"]
    ref = y[0] if lane_center is None else lane_center
    reveal_idx = None
    for i in range(1, len(flag)):
        if flag[i - 1] == 1 and flag[i] == 0:
            reveal_idx = i
            break
    reveal = t[reveal_idx] if reveal_idx is not None else None
    post = delta[reveal_idx:] if reveal_idx is not None else []
    return MetricsReport(
        max_lateral_deviation=max(abs(yi - ref) for yi in y),
        min_speed=min(v),
        max_abs_sideslip=max(abs(b) for b in cols["beta_deg"]),
        max_abs_yaw=max(abs(p) for p in cols["psi_deg"]),
        max_abs_steer=max(abs(d) for d in delta),
        steer_saturation_steps=sum(1 for d in delta if abs(d) >= steer_limit_deg - 1e-9),
        steer_sign_changes_post_reveal=count_sign_changes(post),
        stalled=any(s == STATUS_STALLED for s in cols["status"]),
        reveal_time=reveal,
        alpha1_at_reveal=cols["alpha1"][reveal_idx] if reveal_idx is not None else None,
        alpha2_at_reveal=cols["alpha2"][reveal_idx] if reveal_idx is not None else None,
    )


def compute_metrics(trace: EgoTrace, scenario: Scenario) -> MetricsReport:
    cols = {name: trace.column(name) for name in COLUMNS}
    return metrics_from_columns(cols, nearest_lane_center(scenario.road, scenario.ego.y),
                                math.degrees(scenario.dynamics.steer_limit))
