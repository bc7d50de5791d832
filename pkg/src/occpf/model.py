"""Road, vehicle and obstacle data model plus scripted obstacle motion.

Coordinates: ``x`` is longitudinal (increasing in the travel direction),
``y`` is lateral. Lanes are numbered from the lower edge: lane 1 is the
lane whose center has the smallest ``y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import ValidationError

Point = Tuple[float, float]

HOLD_LANE = "HoldLane"
LANE_CHANGE = "LaneChange"


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class RoadModel:
    num_lanes: int
    lane_width: float
    y_lower_edge: float
    y_upper_edge: float
    divider_positions: Tuple[float, ...]
    lane_centers: Tuple[float, ...]
    speed_limit: float
    mu: float
    g: float = 9.81

    def __post_init__(self):
        if self.num_lanes < 1:
            raise ValidationError("road.num_lanes must be >= 1")
        if not self.lane_width > 0:
            raise ValidationError("road.lane_width must be positive")
        span = self.y_upper_edge - self.y_lower_edge
        if not math.isclose(span, self.num_lanes * self.lane_width, rel_tol=1e-9, abs_tol=1e-9):
            raise ValidationError("road edges: y_upper_edge - y_lower_edge != num_lanes * lane_width")
        divs = tuple(float(d) for d in self.divider_positions)
        object.__setattr__(self, "divider_positions", divs)
        object.__setattr__(self, "lane_centers", tuple(float(c) for c in self.lane_centers))
        if len(divs) != self.num_lanes - 1:
            raise ValidationError("road.divider_positions: count must be num_lanes - 1")
        if any(b <= a for a, b in zip(divs, divs[1:])):
            raise ValidationError("road.divider_positions must be strictly increasing")
        if any(not (self.y_lower_edge < d < self.y_upper_edge) for d in divs):
            raise ValidationError("road.divider_positions must lie strictly between the edges")
        if len(self.lane_centers) != self.num_lanes:
            raise ValidationError("road.lane_centers: count must be num_lanes")
        for i, c in enumerate(self.lane_centers, start=1):
            expected = self.y_lower_edge + (i - 0.5) * self.lane_width
            if not math.isclose(c, expected, abs_tol=1e-9):
                raise ValidationError(f"road.lane_centers[{i - 1}] must be {expected}")
        if not (0 < self.mu <= 1.5):
            raise ValidationError("road.mu must be in (0, 1.5]")
        if not self.speed_limit > 0:
            raise ValidationError("road.speed_limit must be positive")
        if not self.g > 0:
            raise ValidationError("road.g must be positive")

    @classmethod
    def uniform(cls, num_lanes: int, lane_width: float, y_lower_edge: float = 0.0,
                speed_limit: float = 33.3, mu: float = 0.9, g: float = 9.81) -> "RoadModel":
        """Straight road with ``num_lanes`` equal lanes starting at ``y_lower_edge``."""
        dividers = [y_lower_edge + i * lane_width for i in range(1, num_lanes)]
        centers = [y_lower_edge + (i - 0.5) * lane_width for i in range(1, num_lanes + 1)]
        return cls(num_lanes, lane_width, y_lower_edge, y_lower_edge + num_lanes * lane_width,
                   tuple(dividers), tuple(centers), speed_limit, mu, g)

    def on_road(self, y: float) -> bool:
        return self.y_lower_edge < y < self.y_upper_edge


def lane_center(road: RoadModel, index: int) -> float:
    """Lateral position of the center of lane ``index`` (1-based, from the lower edge)."""
    if not 1 <= index <= road.num_lanes:
        raise IndexError(f"lane {index} outside 1..{road.num_lanes}")
    return road.y_lower_edge + (index - 0.5) * road.lane_width


@dataclass(frozen=True)
class VehicleBody:
    length: float = 4.8
    width: float = 1.8

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise ValidationError("body: length and width must be positive")


@dataclass(frozen=True)
class VehicleState:
    """Ego state. Angles in radians; ``v`` is the longitudinal speed."""

    x: float
    y: float
    v: float
    v_lat: float = 0.0
    yaw: float = 0.0
    sideslip: float = 0.0
    yaw_rate: float = 0.0
    steer: float = 0.0

    def __post_init__(self):
        if not _finite(self.x, self.y, self.v, self.v_lat, self.yaw,
                       self.sideslip, self.yaw_rate, self.steer):
            raise ValidationError("ego state: all fields must be finite")
        if self.v < 0:
            raise ValidationError("ego state: v must be >= 0")


@dataclass(frozen=True)
class ManeuverScript:
    kind: str
    t_start: float
    duration: float
    target_lane: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (HOLD_LANE, LANE_CHANGE):
            raise ValidationError(f"maneuver.kind must be {HOLD_LANE} or {LANE_CHANGE}")
        if not self.duration > 0:
            raise ValidationError("maneuver.duration must be positive")
        if self.kind == LANE_CHANGE and self.target_lane is None:
            raise ValidationError("maneuver.target_lane required for LaneChange")

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration


@dataclass(frozen=True)
class ObstacleTrack:
    """Scripted obstacle. Runtime visibility labels live in :mod:`occpf.occlusion`."""

    id: str
    x: float
    y: float
    v: float
    v_lat: float = 0.0
    body: VehicleBody = field(default_factory=VehicleBody)
    maneuvers: Tuple[ManeuverScript, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "maneuvers",
                           tuple(sorted(self.maneuvers, key=lambda m: m.t_start)))
        if not _finite(self.x, self.y, self.v, self.v_lat):
            raise ValidationError(f"obstacle {self.id}: non-finite kinematics")
        if self.v < 0:
            raise ValidationError(f"obstacle {self.id}: v must be >= 0")
        if self.v_lat != 0.0:
            raise ValidationError(f"obstacle {self.id}: v_lat must be 0, lateral motion is scripted")
        for a, b in zip(self.maneuvers, self.maneuvers[1:]):
            if b.t_start < a.t_end:
                raise ValidationError(f"obstacle {self.id}: maneuvers overlap in time")


def _smoothstep5(tau: float) -> Tuple[float, float]:
    """Quintic profile 10t^3 - 15t^4 + 6t^5 and its derivative."""
    t2 = tau * tau
    s = t2 * tau * (10.0 - 15.0 * tau + 6.0 * t2)
    ds = 30.0 * t2 * (1.0 - 2.0 * tau + t2)
    return s, ds


def obstacle_pose_at(track: ObstacleTrack, t: float, road: RoadModel) -> Tuple[float, float, float, float]:
    """Return ``(x, y, v, v_lat)`` of a scripted obstacle at time ``t``.

    Longitudinal speed is constant. Each LaneChange moves the track from
    wherever the previous scripts left it to the target lane center along
    a quintic smoothstep. Outside lane changes ``v_lat`` is zero.
    """
    t = max(0.0, t)
    x = track.x + track.v * t
    y = track.y
    v_lat = 0.0
    for m in track.maneuvers:
        if m.kind != LANE_CHANGE:
            continue
        if t <= m.t_start:
            break
        y_to = lane_center(road, m.target_lane)
        tau = min(1.0, (t - m.t_start) / m.duration)
        s, ds = _smoothstep5(tau)
        y_from = y
        y = y_from + (y_to - y_from) * s
        v_lat = (y_to - y_from) * ds / m.duration if tau < 1.0 else 0.0
    return x, y, track.v, v_lat


def corners(x: float, y: float, yaw: float, body: VehicleBody) -> Tuple[Point, Point, Point, Point]:
    """Footprint corners, counter-clockwise from rear-right, rotated by ``yaw`` about (x, y)."""
    hl, hw = 0.5 * body.length, 0.5 * body.width
    c, s = math.cos(yaw), math.sin(yaw)
    out = []
    for bx, by in ((-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)):
        out.append((x + c * bx - s * by, y + s * bx + c * by))
    return tuple(out)  # type: ignore[return-value]
