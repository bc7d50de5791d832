"""RSS safe distances, the violation check and the force-adjustment coefficients."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError, ValidationError
from .model import VehicleBody

ALPHA_NORMALIZED = "normalized"
ALPHA_PAPER_LITERAL = "paper-literal"


@dataclass(frozen=True)
class RssParams:
    """Response time, acceleration bounds (m/s^2) and lateral margin ``zeta`` (m)."""

    rho: float = 1.0
    a_accel_max: float = 2.0
    a_brake_min: float = 4.0
    a_brake_max: float = 6.0
    a_accel_lat_max: float = 0.5
    a_brake_lat_min: float = 1.0
    zeta: float = 0.5
    alpha_norm: str = ALPHA_NORMALIZED

    def __post_init__(self):
        for name in ("rho", "a_accel_max", "a_brake_min", "a_brake_max",
                     "a_accel_lat_max", "a_brake_lat_min", "zeta"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"rss.{name} must be strictly positive")
        if self.a_brake_min > self.a_brake_max:
            raise ValidationError("rss.a_brake_min must not exceed rss.a_brake_max")
        if self.alpha_norm not in (ALPHA_NORMALIZED, ALPHA_PAPER_LITERAL):
            raise ValidationError("rss.alpha_norm must be 'normalized' or 'paper-literal'")


@dataclass(frozen=True)
class RelativeDistance:
    """Bumper-to-bumper gaps (m)."""

    d_x: float
    d_y: float


@dataclass(frozen=True)
class ViolationReport:
    sigma_x: float
    sigma_y: float
    d_x: float
    d_y: float
    longitudinal_violated: bool
    lateral_violated: bool
    alpha1: float
    alpha2: float


def rss_longitudinal_distance(v_ego: float, v_obs: float, p: RssParams) -> float:
    """Minimum safe longitudinal gap for an ego following an obstacle."""
    if p.a_brake_min <= 0 or p.a_brake_max <= 0:
        raise ParameterError("braking bounds must be positive")
    rho = p.rho
    v_resp = v_ego + rho * p.a_accel_max
    raw = (v_ego * rho + 0.5 * p.a_accel_max * rho * rho
           + v_resp * v_resp / (2.0 * p.a_brake_min)
           - v_obs * v_obs / (2.0 * p.a_brake_max))
    return max(raw, 0.0)


def _lateral_travel(v_lat: float, p: RssParams) -> float:
    v_resp = v_lat + p.rho * p.a_accel_lat_max
    return 0.5 * (v_lat + v_resp) * p.rho + v_resp * v_resp / (2.0 * p.a_brake_lat_min)


def rss_lateral_distance(vlat_ego: float, vlat_obs: float, p: RssParams) -> float:
    """Minimum safe lateral gap.

    Both lateral speeds are signed positive when moving toward the other
    vehicle. The obstacle's travel term is subtracted as printed in the
    original formulation, so the result never drops below ``zeta``.
    """
    if p.a_brake_lat_min <= 0:
        raise ParameterError("a_brake_lat_min must be positive")
    return p.zeta + max(_lateral_travel(vlat_ego, p) - _lateral_travel(vlat_obs, p), 0.0)


def relative_distance(dx_centers: float, dy_centers: float,
                      ego: VehicleBody, obs: VehicleBody) -> RelativeDistance:
    """Gap between two axis-aligned footprints given their center offsets."""
    return RelativeDistance(
        max(0.0, abs(dx_centers) - 0.5 * (ego.length + obs.length)),
        max(0.0, abs(dy_centers) - 0.5 * (ego.width + obs.width)),
    )


def alpha_coefficients(d_x: float, d_y: float, sx: float, sy: float,
                       norm: str = ALPHA_NORMALIZED) -> tuple[float, float]:
    """Longitudinal and lateral force multipliers for an occluded-origin obstacle.

    ``alpha1 > 1`` when the longitudinal gap is unsafe (brake harder);
    ``alpha2 <= 0.5`` when the lateral gap is unsafe (steer less).
    """
    c = 2.0 / math.pi if norm == ALPHA_NORMALIZED else math.pi / 2.0
    if d_x >= sx:
        a1 = 1.0 - c * math.atan((d_x - sx) / sx)
    else:
        a1 = 1.0 + c * math.atan((sx - d_x) / sx)
    if d_y >= sy:
        a2 = 1.0 - c * math.atan((d_y - sy) / sy)
    else:
        a2 = c * math.atan((sy - d_y) / sy)
    return a1, a2


def violation_check(d: RelativeDistance, sx: float, sy: float,
                    norm: str = ALPHA_NORMALIZED) -> ViolationReport:
    if not (sx > 0 and sy > 0):
        raise ParameterError("safe distances must be positive")
    a1, a2 = alpha_coefficients(d.d_x, d.d_y, sx, sy, norm)
    return ViolationReport(sx, sy, d.d_x, d.d_y, d.d_x < sx, d.d_y < sy, a1, a2)
