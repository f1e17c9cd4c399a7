"""Waypoint-following control laws.

The rudder law inverts the yaw dynamics r' = (k_r/I_R) v^2 u_r around a
first-order heading reference with a yaw-rate limit; the sail law holds the
angle-of-attack magnitude at ``alpha_star`` with lift pulling the hull along
its travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import HALF_PI, ApparentWind, SailboatParams, SailboatState, wrap_angle
from .geometry import WaypointPath


@dataclass(frozen=True)
class ControllerConfig:
    capture_radius: float = 2.0
    k_psi: float = 0.9
    r_max: float = 1.2
    alpha_star: float = 0.18
    v_eps: float = 0.3

    def validate(self) -> None:
        for name in ("capture_radius", "k_psi", "r_max", "alpha_star", "v_eps"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"controller parameter {name} must be > 0")
        if not -HALF_PI < self.alpha_star < HALF_PI:
            raise ValueError("alpha_star must lie in (-pi/2, pi/2)")


@dataclass(frozen=True)
class TrackingState:
    target_index: int = 0
    laps_completed: int = 0


def advance_target(
    state: SailboatState,
    path: WaypointPath,
    ts: TrackingState,
    cfg: ControllerConfig,
) -> TrackingState:
    """Advance the target waypoint on capture; wrapping n -> 0 counts a lap."""
    tx, ty = path.points[ts.target_index]
    dx = tx - state.x
    dy = ty - state.y
    if dx * dx + dy * dy < cfg.capture_radius * cfg.capture_radius:
        if ts.target_index == path.n:
            return TrackingState(0, ts.laps_completed + 1)
        return TrackingState(ts.target_index + 1, ts.laps_completed)
    return ts


def rudder_command(
    state: SailboatState,
    target: tuple[float, float],
    cfg: ControllerConfig,
    p: SailboatParams,
) -> float:
    """Rudder angle for steering toward ``target``, saturated to [-pi/2, pi/2]."""
    psi_d = math.atan2(target[1] - state.y, target[0] - state.x)
    e = wrap_angle(psi_d - state.psi)
    r_ref = cfg.k_psi * e
    if r_ref > cfg.r_max:
        r_ref = cfg.r_max
    elif r_ref < -cfg.r_max:
        r_ref = -cfg.r_max
    rdot_cmd = cfg.k_psi * (r_ref - state.r)
    v_eff = state.v if state.v > cfg.v_eps else cfg.v_eps
    u_r = (p.I_R / p.k_r) * rdot_cmd / (v_eff * v_eff)
    if u_r > HALF_PI:
        u_r = HALF_PI
    elif u_r < -HALF_PI:
        u_r = -HALF_PI
    return u_r


def sail_command(app: ApparentWind, cfg: ControllerConfig) -> float:
    """Sail angle realizing |angle of attack| = alpha_star on the lifting side."""
    if app.psi_app > 0.0:
        return app.psi_app - cfg.alpha_star
    if app.psi_app < 0.0:
        return app.psi_app + cfg.alpha_star
    return -cfg.alpha_star
