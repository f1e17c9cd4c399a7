"""Planar sailboat dynamics: yaw/rudder law, sail aerodynamics, wind window.

The hull velocity is aligned with the heading, so the state is
(x, y, psi, r, v).  Apparent-wind heading ``psi_app`` is the bearing the
apparent wind blows *from*, measured relative to the hull heading and
wrapped to (-pi, pi].  With that convention a beam wind produces thrust
through the lift term and a head-on apparent wind decelerates the hull
through the drag term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.fmod(a, TWO_PI)
    if w > math.pi:
        w -= TWO_PI
    elif w <= -math.pi:
        w += TWO_PI
    return w


@dataclass
class SailboatState:
    """Hull pose and speed. ``v`` is a magnitude, clamped at zero."""

    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0
    r: float = 0.0
    v: float = 0.0
    t: float = 0.0

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.x)
            and math.isfinite(self.y)
            and math.isfinite(self.psi)
            and math.isfinite(self.r)
            and math.isfinite(self.v)
            and math.isfinite(self.t)
        )


@dataclass(frozen=True)
class SailboatParams:
    """Lumped hull/sail coefficients; all strictly positive in valid configs."""

    k_r: float = 2.0
    I_R: float = 1.0
    m: float = 1.0
    k_L: float = 1.2
    k_D0: float = 0.08
    k_D1: float = 0.8

    def validate(self) -> None:
        for name in ("k_r", "I_R", "m", "k_L", "k_D0", "k_D1"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"sailboat parameter {name} must be > 0")


@dataclass(frozen=True)
class WindParams:
    """Cosine wind window of half-width R, blowing along a fixed unit vector."""

    v_max: float = 6.0
    R: float = 20.0
    direction: tuple[float, float] = (0.0, -1.0)

    def validate(self) -> None:
        if self.v_max < 0.0:
            raise ValueError("wind v_max must be >= 0")
        if not self.R > 0.0:
            raise ValueError("wind window half-width R must be > 0")
        norm = math.hypot(self.direction[0], self.direction[1])
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("wind direction must be a unit vector")

    def normalized(self) -> "WindParams":
        norm = math.hypot(self.direction[0], self.direction[1])
        if norm == 0.0:
            raise ValueError("wind direction must be nonzero")
        d = (self.direction[0] / norm, self.direction[1] / norm)
        return replace(self, direction=d)


@dataclass(frozen=True)
class ApparentWind:
    v_app: float
    psi_app: float


@dataclass(frozen=True)
class ControlInput:
    u_r: float = 0.0
    u_s: float = 0.0


def wind_speed(x: float, wind: WindParams) -> float:
    """Wind magnitude at downwind-transverse position x; zero outside the window."""
    if -wind.R <= x <= wind.R:
        return wind.v_max * math.cos(math.pi * x / (2.0 * wind.R))
    return 0.0


def apparent_wind(state: SailboatState, wind: WindParams) -> ApparentWind:
    """Apparent wind felt by the hull: true wind minus hull velocity.

    ``psi_app`` is the hull-relative bearing of the apparent wind *source*;
    zero by convention when the apparent wind vector vanishes.
    """
    w = wind_speed(state.x, wind)
    ax = w * wind.direction[0] - state.v * math.cos(state.psi)
    ay = w * wind.direction[1] - state.v * math.sin(state.psi)
    v_app = math.sqrt(ax * ax + ay * ay)
    if v_app == 0.0:
        return ApparentWind(0.0, 0.0)
    psi_app = wrap_angle(math.atan2(-ay, -ax) - state.psi)
    return ApparentWind(v_app, psi_app)


def aero_forces(alpha: float, v_app: float, p: SailboatParams) -> tuple[float, float]:
    """Lift and drag magnitudes at angle of attack ``alpha``."""
    v_app_sq = v_app * v_app
    f_l = p.k_L * alpha * v_app_sq
    f_d = (p.k_D0 + p.k_D1 * alpha * alpha) * v_app_sq
    return f_l, f_d


def derivatives(
    state: SailboatState,
    u: ControlInput,
    p: SailboatParams,
    wind: WindParams,
) -> tuple[float, float, float, float, float]:
    """Time derivative (dx, dy, dpsi, dr, dv) of the hull state.

    Pure function: identical inputs give bit-identical outputs.  The caller
    is responsible for clamping ``u.u_r`` to [-pi/2, pi/2].
    """
    app = apparent_wind(state, wind)
    alpha = app.psi_app - u.u_s
    f_l, f_d = aero_forces(alpha, app.v_app, p)
    dx = state.v * math.cos(state.psi)
    dy = state.v * math.sin(state.psi)
    dpsi = state.r
    dr = (p.k_r / p.I_R) * state.v * state.v * u.u_r
    dv = (f_l * math.sin(app.psi_app) - f_d * math.cos(app.psi_app)) / p.m
    return (dx, dy, dpsi, dr, dv)


def step(
    state: SailboatState,
    u: ControlInput,
    p: SailboatParams,
    wind: WindParams,
    dt: float,
) -> SailboatState:
    """One classical RK4 step with controls held constant; v clamped at 0.

    Raises ``SimulationFailure("divergence")`` if the new state is non-finite.
    """
    from .errors import SimulationFailure

    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    x, y, psi, r, v = state.x, state.y, state.psi, state.r, state.v
    hdt = 0.5 * dt

    k1 = derivatives(state, u, p, wind)
    s2 = SailboatState(x + hdt * k1[0], y + hdt * k1[1], psi + hdt * k1[2], r + hdt * k1[3], v + hdt * k1[4])
    k2 = derivatives(s2, u, p, wind)
    s3 = SailboatState(x + hdt * k2[0], y + hdt * k2[1], psi + hdt * k2[2], r + hdt * k2[3], v + hdt * k2[4])
    k3 = derivatives(s3, u, p, wind)
    s4 = SailboatState(x + dt * k3[0], y + dt * k3[1], psi + dt * k3[2], r + dt * k3[3], v + dt * k3[4])
    k4 = derivatives(s4, u, p, wind)

    sixth = dt / 6.0
    nx = x + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    ny = y + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    npsi = psi + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    nr = r + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    nv = v + sixth * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
    if nv < 0.0:
        nv = 0.0

    out = SailboatState(nx, ny, npsi, nr, nv, state.t + dt)
    if not out.is_finite():
        raise SimulationFailure("divergence", "state became non-finite during integration")
    return out
