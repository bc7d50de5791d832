"""Turn virtual forces into heading and speed commands for the three planner variants."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

from .errors import DegenerateForce, ValidationError
from .model import RoadModel, VehicleBody, VehicleState
from .potential import SIGMA_MIN, FieldSource, ForceVector, PfParams, net_force
from .rss import (RssParams, alpha_coefficients, relative_distance,
                  rss_lateral_distance, rss_longitudinal_distance)

if TYPE_CHECKING:
    from .scenario import Scenario

PF_CS = "PF-CS"
PF_SP = "PF-SP"
PF_OAPP = "PF-OAPP"
MODES = (PF_CS, PF_SP, PF_OAPP)

STATUS_OK = "Ok"
STATUS_STALLED = "Stalled"


def parse_mode(name: str) -> str:
    """Accept ``pf-oapp``, ``PF-OAPP`` and similar spellings."""
    key = name.strip().upper().replace("_", "-")
    if key not in MODES:
        raise ValueError(f"unknown planner {name!r}; expected one of {', '.join(MODES)}")
    return key


@dataclass(frozen=True)
class PlannerParams:
    force_tolerance: float = 0.01
    stall_window: float = 2.0
    stall_progress: float = 0.1
    a_min_cmd: float = -6.0
    a_max_cmd: float = 2.0
    kappa_floor: float = 1e-6
    kappa_smoothing: int = 5
    release_hold: float = 1.0

    def __post_init__(self):
        if not self.a_min_cmd < 0 < self.a_max_cmd:
            raise ValidationError("planner: need a_min_cmd < 0 < a_max_cmd")
        if not (self.force_tolerance > 0 and self.stall_window > 0 and self.kappa_floor > 0):
            raise ValidationError("planner: tolerances must be positive")
        if self.kappa_smoothing < 1:
            raise ValidationError("planner.kappa_smoothing must be >= 1")
        if self.release_hold < 0:
            raise ValidationError("planner.release_hold must be >= 0")


@dataclass(frozen=True)
class SpeedLimits:
    v_limit: float
    mu: float
    g: float
    kappa: float
    T: float
    kappa_floor: float = 1e-6


@dataclass(frozen=True)
class PlannerOutput:
    theta_des: float
    v_star: float
    a_des: float
    fx: float
    fy: float
    alpha1: float = 1.0
    alpha2: float = 1.0
    occlusion_flag: int = 0
    status: str = STATUS_OK


@dataclass(frozen=True)
class PerceivedObstacle:
    """A visible obstacle handed to the planner this step."""

    id: str
    x: float
    y: float
    v: float
    v_lat: float
    body: VehicleBody
    occluded_origin: bool = False


def desired_heading(f: ForceVector, force_tolerance: float = 0.01) -> float:
    if f.norm < force_tolerance:
        raise DegenerateForce(f"|F| = {f.norm:.3g} below {force_tolerance}")
    return math.atan2(f.fy, f.fx)


def desired_acceleration(fx: float, f_c: float, m_v: float,
                         a_min: float = -6.0, a_max: float = 2.0) -> float:
    if not m_v > 0:
        raise ValueError("m_v must be positive")
    return min(max((fx - f_c) / m_v, a_min), a_max)


def reference_speed(v_cur: float, a_des: float, lim: SpeedLimits) -> float:
    v_des = v_cur + a_des * lim.T
    v_max = lim.v_limit
    if lim.kappa >= lim.kappa_floor:
        v_max = min(lim.v_limit, math.sqrt(lim.mu * lim.g / lim.kappa))
    return max(0.0, min(v_max, v_des))


def detect_stall(f: ForceVector, v: float, window: Sequence[tuple[float, float]],
                 force_tolerance: float = 0.01, span: float = 2.0,
                 min_progress: float = 0.1) -> str:
    """``window`` holds ``(t, x)`` samples, oldest first."""
    if f.norm < force_tolerance:
        return STATUS_STALLED
    if window and window[-1][0] - window[0][0] >= span - 1e-9:
        if window[-1][1] - window[0][1] < min_progress:
            return STATUS_STALLED
    return STATUS_OK


def nearest_lane_center(road: RoadModel, y: float) -> float:
    return min(road.lane_centers, key=lambda c: abs(c - y))


def calibrate_criterion_force(scenario: "Scenario") -> float:
    """Longitudinal force felt at the initial lane center with no obstacles present."""
    ego = scenario.ego
    y0 = nearest_lane_center(scenario.road, ego.y)
    return net_force(ego.x, y0, scenario.goal_x, scenario.road, scenario.ego_body,
                     scenario.pf, ()).fx


def _toward(v_lat: float, own_y: float, other_y: float) -> float:
    return v_lat if other_y >= own_y else -v_lat


class Planner:
    """Per-run planner. Holds the curvature history and the progress window."""

    def __init__(self, mode: str, road: RoadModel, ego_body: VehicleBody, goal_x: float,
                 pf: PfParams, rss: RssParams, dt: float, v_initial: float,
                 params: PlannerParams = PlannerParams(), force_unit_alpha: bool = False):
        self.mode = parse_mode(mode)
        self.road = road
        self.body = ego_body
        self.goal_x = goal_x
        self.pf = pf
        self.rss = rss
        self.dt = dt
        self.v_initial = v_initial
        self.params = params
        self.force_unit_alpha = force_unit_alpha
        if pf.f_c is None:
            raise ValidationError("pf.f_c must be calibrated before planning")
        self._kappas: deque[float] = deque(maxlen=params.kappa_smoothing)
        self._last_theta: Optional[float] = None
        self._last_pos: tuple[float, float] = (0.0, 0.0)
        self._window: deque[tuple[float, float]] = deque()

    def field_sources(self, ego: VehicleState, obstacles: Sequence[PerceivedObstacle]):
        """Field sources for the visible obstacles plus the alphas to report."""
        sources = []
        report = (1.0, 1.0)
        closest = math.inf
        for ob in obstacles:
            sx = rss_longitudinal_distance(ego.v, ob.v, self.rss)
            sy = rss_lateral_distance(_toward(ego.v_lat, ego.y, ob.y),
                                      _toward(ob.v_lat, ob.y, ego.y), self.rss)
            sx = max(sx, SIGMA_MIN)
            sy = max(sy, SIGMA_MIN)
            a1 = a2 = 1.0
            if self.mode == PF_OAPP and ob.occluded_origin and not self.force_unit_alpha:
                d = relative_distance(ob.x - ego.x, ob.y - ego.y, self.body, ob.body)
                a1, a2 = alpha_coefficients(d.d_x, d.d_y, sx, sy, self.rss.alpha_norm)
                if d.d_x < closest:
                    closest = d.d_x
                    report = (a1, a2)
            sources.append(FieldSource(ob.x, ob.y, sx, sy, a1, a2))
        return sources, report

    def _curvature(self, theta: float, x: float, y: float) -> float:
        if self._last_theta is None:
            k = 0.0
        else:
            d_theta = abs(math.remainder(theta - self._last_theta, 2.0 * math.pi))
            ds = math.hypot(x - self._last_pos[0], y - self._last_pos[1])
            k = d_theta / max(ds, 1e-3)
        self._last_theta = theta
        self._last_pos = (x, y)
        self._kappas.append(k)
        return sum(self._kappas) / len(self._kappas)

    def plan_step(self, t: float, ego: VehicleState, obstacles: Sequence[PerceivedObstacle],
                  occlusion_flag: int = 0) -> PlannerOutput:
        p = self.params
        sources, (a1, a2) = self.field_sources(ego, obstacles)
        f = net_force(ego.x, ego.y, self.goal_x, self.road, self.body, self.pf, sources)

        self._window.append((t, ego.x))
        while self._window and t - self._window[0][0] > p.stall_window + 1e-9:
            self._window.popleft()
        status = detect_stall(f, ego.v, self._window, p.force_tolerance,
                              p.stall_window, p.stall_progress)
        try:
            theta = desired_heading(f, p.force_tolerance)
        except DegenerateForce:
            theta = self._last_theta if self._last_theta is not None else ego.yaw
            status = STATUS_STALLED
        kappa = self._curvature(theta, ego.x, ego.y)

        a_des = desired_acceleration(f.fx, self.pf.f_c, self.pf.m_v, p.a_min_cmd, p.a_max_cmd)
        if self.mode == PF_CS:
            v_star = self.v_initial
        else:
            lim = SpeedLimits(self.road.speed_limit, self.road.mu, self.road.g,
                              kappa, self.dt, p.kappa_floor)
            v_star = reference_speed(ego.v, a_des, lim)
        return PlannerOutput(theta, v_star, a_des, f.fx, f.fy, a1, a2, occlusion_flag, status)
