"""Potential functions of the road, the goal and the obstacles, and the net virtual force.

The component functions here are written independently of the fused
kernel behind :func:`net_force`; :func:`finite_difference_force` builds on
them and serves as the gradient oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import kernels
from .errors import ValidationError
from .model import RoadModel, VehicleBody

FORM_NORMALIZED = "normalized"
FORM_PAPER_LITERAL = "paper-literal"

# Field length scales below this are floored (a zero RSS distance would
# otherwise collapse the Gaussian).
SIGMA_MIN = 0.1


@dataclass(frozen=True)
class PfParams:
    lam: float = 0.01
    xi: float = 1.0
    a_ld: float = 1.0
    sigma_lane: float = 0.8
    epsilon: float = 0.05
    m_v: float = 1.0
    f_c: Optional[float] = None
    f_cap: float = 50.0
    exponent_form: str = FORM_NORMALIZED

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValidationError("pf.epsilon must be in (0, 1)")
        if not self.sigma_lane > 0:
            raise ValidationError("pf.sigma_lane must be positive")
        if not self.f_cap > 0:
            raise ValidationError("pf.f_cap must be positive")
        if not self.m_v > 0:
            raise ValidationError("pf.m_v must be positive")
        if self.lam < 0 or self.xi < 0 or self.a_ld < 0:
            raise ValidationError("pf.lambda, pf.xi and pf.a_ld must be non-negative")
        if self.exponent_form not in (FORM_NORMALIZED, FORM_PAPER_LITERAL):
            raise ValidationError("pf.exponent_form must be 'normalized' or 'paper-literal'")


@dataclass(frozen=True)
class ForceVector:
    fx: float
    fy: float

    @property
    def norm(self) -> float:
        return math.hypot(self.fx, self.fy)


@dataclass(frozen=True)
class ObstacleFieldShape:
    sigma_x: float
    sigma_y: float

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValidationError("obstacle field extents must be positive")


@dataclass(frozen=True)
class FieldSource:
    """A perceived obstacle as seen by the field: position, extent, force weights."""

    x: float
    y: float
    sigma_x: float
    sigma_y: float
    alpha1: float = 1.0
    alpha2: float = 1.0

    def as_tuple(self):
        return (self.x, self.y, self.sigma_x, self.sigma_y, self.alpha1, self.alpha2)


def attractive_potential(x: float, goal_x: float, lam: float) -> tuple[float, float]:
    """Quadratic well at the goal. Returns ``(U, dU/dX)``."""
    d = x - goal_x
    return 0.5 * lam * d * d, lam * d


def _edge(d: float, xi: float, f_cap: float) -> tuple[float, float]:
    d_cap = (xi / f_cap) ** (1.0 / 3.0)
    if d > d_cap:
        return 0.5 * xi / d ** 2, -xi / d ** 3
    return 0.5 * xi / d_cap ** 2 + f_cap * (d_cap - d), -f_cap


def edge_potential(clearance: float, xi: float, f_cap: float) -> tuple[float, float]:
    """One road edge as a function of the clearance between vehicle side and edge.

    Returns ``(U, dU/d clearance)``. The inverse-square law is followed until
    its slope reaches ``f_cap``; closer than that the slope stays at ``f_cap``.
    """
    return _edge(clearance, xi, f_cap)


def road_edge_potential(y: float, road: RoadModel, body: VehicleBody,
                        xi: float, f_cap: float) -> tuple[float, float]:
    """Both road edges. Returns ``(U, dU/dY)``."""
    hw = 0.5 * body.width
    u_lo, g_lo = _edge(y - road.y_lower_edge - hw, xi, f_cap)
    u_hi, g_hi = _edge(road.y_upper_edge - y - hw, xi, f_cap)
    return u_lo + u_hi, g_lo - g_hi


def lane_divider_potential(y: float, road: RoadModel, a_ld: float,
                           sigma_lane: float) -> tuple[float, float]:
    """Sum of Gaussian ridges on the lane dividers. Returns ``(U, dU/dY)``."""
    u = g = 0.0
    for yd in road.divider_positions:
        d = y - yd
        e = a_ld * math.exp(-d * d / (2.0 * sigma_lane ** 2))
        u += e
        g -= e * d / sigma_lane ** 2
    return u, g


def obstacle_potential(ego: tuple[float, float], obs: tuple[float, float],
                       shape: ObstacleFieldShape, epsilon: float,
                       exponent_form: str = FORM_NORMALIZED,
                       exterior: str = "clamp") -> tuple[float, float, float]:
    """RSS-shaped obstacle potential. Returns ``(U, dU/dX, dU/dY)``.

    ``exterior="clamp"`` zeroes the field outside the epsilon contour.
    ``exterior="absolute"`` keeps the printed absolute-value form, which
    rises back to ``epsilon / (1 - epsilon)`` far away; diagnostics only.
    """
    dx = ego[0] - obs[0]
    dy = ego[1] - obs[1]
    sx, sy = shape.sigma_x, shape.sigma_y
    if exponent_form == FORM_PAPER_LITERAL:
        q = sy * dx ** 2 + sx * dy ** 2
        dqx, dqy = 2.0 * sy * dx, 2.0 * sx * dy
    else:
        q = dx ** 2 / (2.0 * sx ** 2) + dy ** 2 / (2.0 * sy ** 2)
        dqx, dqy = dx / sx ** 2, dy / sy ** 2
    e = math.exp(-q)
    scale = 1.0 - epsilon
    if e >= epsilon:
        return (e - epsilon) / scale, -e * dqx / scale, -e * dqy / scale
    if exterior == "absolute":
        return (epsilon - e) / scale, e * dqx / scale, e * dqy / scale
    return 0.0, 0.0, 0.0


def field_sources(sources: Sequence[FieldSource]) -> list[tuple]:
    return [s.as_tuple() for s in sources]


def net_force(x: float, y: float, goal_x: float, road: RoadModel, body: VehicleBody,
              pf: PfParams, sources: Sequence[FieldSource] = ()) -> ForceVector:
    """Negative gradient of the composite field with per-obstacle force weights.

    Each source contributes ``-alpha1 * dU/dX`` and ``-alpha2 * dU/dY``; with
    unit weights this is the plain gradient of the summed potentials.
    """
    fx, fy = kernels.net_force(
        x, y, goal_x, pf.lam, road.y_lower_edge, road.y_upper_edge, 0.5 * body.width,
        pf.xi, pf.f_cap, road.divider_positions, pf.a_ld, pf.sigma_lane,
        field_sources(sources), pf.epsilon, pf.exponent_form == FORM_PAPER_LITERAL,
    )
    return ForceVector(fx, fy)


def background_potential(x: float, y: float, goal_x: float, road: RoadModel,
                         body: VehicleBody, pf: PfParams) -> float:
    """Goal, road-edge and lane-divider potentials summed."""
    return (attractive_potential(x, goal_x, pf.lam)[0]
            + road_edge_potential(y, road, body, pf.xi, pf.f_cap)[0]
            + lane_divider_potential(y, road, pf.a_ld, pf.sigma_lane)[0])


def total_potential(x: float, y: float, goal_x: float, road: RoadModel, body: VehicleBody,
                    pf: PfParams, sources: Sequence[FieldSource] = ()) -> float:
    """Unweighted sum of every potential at (x, y)."""
    u = background_potential(x, y, goal_x, road, body, pf)
    for s in sources:
        u += obstacle_potential((x, y), (s.x, s.y), ObstacleFieldShape(s.sigma_x, s.sigma_y),
                                pf.epsilon, pf.exponent_form)[0]
    return u


def finite_difference_force(x: float, y: float, goal_x: float, road: RoadModel,
                            body: VehicleBody, pf: PfParams,
                            sources: Sequence[FieldSource] = (), h: float = 1e-4) -> ForceVector:
    """Central-difference estimate of the weighted net force.

    Built only from potential values, never from analytic gradients.
    Not reliable within ``h`` of the epsilon contour or the edge-cap band.
    """
    if not h > 0:
        raise ValueError("h must be positive")

    def u_bg(px, py):
        return background_potential(px, py, goal_x, road, body, pf)

    fx = -(u_bg(x + h, y) - u_bg(x - h, y)) / (2 * h)
    fy = -(u_bg(x, y + h) - u_bg(x, y - h)) / (2 * h)
    for s in sources:
        shape = ObstacleFieldShape(s.sigma_x, s.sigma_y)

        def u_ob(px, py, s=s, shape=shape):
            return obstacle_potential((px, py), (s.x, s.y), shape, pf.epsilon, pf.exponent_form)[0]

        fx -= s.alpha1 * (u_ob(x + h, y) - u_ob(x - h, y)) / (2 * h)
        fy -= s.alpha2 * (u_ob(x, y + h) - u_ob(x, y - h)) / (2 * h)
    return ForceVector(fx, fy)
