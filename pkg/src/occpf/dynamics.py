"""Ego vehicle dynamics and the low-level steering/speed controllers.

Lateral motion: linear-tire two-state bicycle model (sideslip, yaw rate)
with front-wheel steering. Longitudinal motion: point mass driven by the
commanded acceleration. Positions integrate the velocity direction
``yaw + sideslip``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .errors import NumericalError, ValidationError
from .model import VehicleState

V_FLOOR = 1.0  # m/s; lateral dynamics freeze below this speed
STATE_BOUND = 1e7


@dataclass(frozen=True)
class DynamicsParams:
    mass: float = 1500.0
    inertia_z: float = 2500.0
    dist_front: float = 1.2
    dist_rear: float = 1.6
    cornering_front: float = 80000.0
    cornering_rear: float = 80000.0
    steer_limit: float = math.radians(10.0)
    steer_rate_limit: float = math.radians(30.0)
    a_min: float = -6.0
    a_max: float = 2.0
    k_heading: float = 1.0
    k_speed: float = 1.0
    v_floor: float = V_FLOOR

    def __post_init__(self):
        for name in ("mass", "inertia_z", "dist_front", "dist_rear", "cornering_front",
                     "cornering_rear", "steer_limit", "steer_rate_limit", "k_heading",
                     "k_speed", "v_floor"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"dynamics.{name} must be positive")
        if not self.a_min < 0 < self.a_max:
            raise ValidationError("dynamics: need a_min < 0 < a_max")

    @property
    def wheelbase(self) -> float:
        return self.dist_front + self.dist_rear

    @property
    def understeer_gradient(self) -> float:
        """K in rad/(m/s^2): positive for an understeering vehicle."""
        p = self
        return p.mass / p.wheelbase * (p.dist_rear / p.cornering_front - p.dist_front / p.cornering_rear)


def steady_state_yaw_gain(v: float, p: DynamicsParams) -> float:
    """Closed-form steady yaw rate per radian of steer: v / (L + K v^2)."""
    return v / (p.wheelbase + p.understeer_gradient * v * v)


def step_dynamics(state: VehicleState, steer_cmd: float, accel_cmd: float, dt: float,
                  p: DynamicsParams) -> VehicleState:
    """Advance the ego by ``dt`` with the commands held over the step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    accel = min(max(accel_cmd, p.a_min), p.a_max)
    x, y, yaw, beta, r, v = kernels.bicycle_step(
        state.x, state.y, state.yaw, state.sideslip, state.yaw_rate, state.v,
        steer_cmd, accel, dt, p.mass, p.inertia_z, p.dist_front, p.dist_rear,
        p.cornering_front, p.cornering_rear, p.v_floor,
    )
    for val in (x, y, yaw, beta, r, v):
        if not (math.isfinite(val) and abs(val) < STATE_BOUND):
            raise NumericalError(f"state left finite bounds: {(x, y, yaw, beta, r, v)}")
    if abs(beta) > 0.5 * math.pi or abs(r) > 100.0:
        raise NumericalError(f"lateral state diverged: sideslip={beta}, yaw_rate={r}")
    return VehicleState(x=x, y=y, v=v, v_lat=v * math.sin(yaw + beta), yaw=yaw,
                        sideslip=beta, yaw_rate=r, steer=steer_cmd)


def wrap_angle(a: float) -> float:
    """Map to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def steering_controller(theta_des: float, state: VehicleState, p: DynamicsParams, dt: float) -> float:
    """Proportional heading tracking, rate-limited against the last command, then saturated."""
    raw = p.k_heading * wrap_angle(theta_des - state.yaw)
    step = p.steer_rate_limit * dt
    cmd = min(max(raw, state.steer - step), state.steer + step)
    return min(max(cmd, -p.steer_limit), p.steer_limit)


def speed_controller(v_star: float, state: VehicleState, p: DynamicsParams, dt: float) -> float:
    return min(max(p.k_speed * (v_star - state.v), p.a_min), p.a_max)
