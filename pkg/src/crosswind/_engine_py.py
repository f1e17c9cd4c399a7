"""Pure-Python closed-loop simulation kernel.

Fallback twin of the compiled kernel in ``_kernel.pyx``.  The two must stay
expression-for-expression identical: every floating-point operation here has
the same operands and associativity as its compiled counterpart, so both
backends produce bit-identical trajectories.  ``tests/test_engine.py`` pins
this loop to the public ``dynamics``/``controller`` operations and to the
compiled kernel.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_LAP_TIMEOUT = 1
STATUS_DIVERGENCE = 2

_PI = math.pi
_TWO_PI = 2.0 * math.pi
_HALF_PI = 0.5 * math.pi


def _wrap(a: float) -> float:
    w = math.fmod(a, _TWO_PI)
    if w > _PI:
        w -= _TWO_PI
    elif w <= -_PI:
        w += _TWO_PI
    return w


def run_closed_loop(
    x: float,
    y: float,
    psi: float,
    r: float,
    v: float,
    t0: float,
    wx,
    wy,
    target0: int,
    laps0: int,
    k_r: float,
    I_R: float,
    m: float,
    k_L: float,
    k_D0: float,
    k_D1: float,
    v_max: float,
    R: float,
    dir_x: float,
    dir_y: float,
    capture_radius: float,
    k_psi: float,
    r_max: float,
    alpha_star: float,
    v_eps: float,
    dt: float,
    laps_needed: int,
    max_lap_steps: int,
):
    """Simulate until ``laps_needed`` laps complete, a lap times out, or the
    state diverges.

    Returns ``(status, samples, lap_bounds, target_index, laps_completed)``
    where ``samples`` has one row per control interval:
    (t, x, y, psi, r, v, v_app, psi_app, u_r, u_s).
    """
    wx = np.asarray(wx, dtype=np.float64).tolist()
    wy = np.asarray(wy, dtype=np.float64).tolist()
    n_last = len(wx) - 1
    cr2 = capture_radius * capture_radius
    kr_over_ir = k_r / I_R
    ir_over_kr = I_R / k_r
    cap = (laps_needed - laps0) * (max_lap_steps + 1) + 1
    out = np.empty((cap, 10), dtype=np.float64)
    lap_bounds: list[int] = []

    sin = math.sin
    cos = math.cos
    atan2 = math.atan2
    sqrt = math.sqrt
    isfinite = math.isfinite

    target = target0
    laps = laps0
    ns = 0
    k = 0
    steps_in_lap = 0
    status = STATUS_OK

    while True:
        # Waypoint capture check at the current position.
        ddx = wx[target] - x
        ddy = wy[target] - y
        if ddx * ddx + ddy * ddy < cr2:
            if target == n_last:
                laps += 1
                lap_bounds.append(ns)
                steps_in_lap = 0
                target = 0
            else:
                target += 1

        # Apparent wind at the current state.
        if -R <= x <= R:
            w = v_max * cos(_PI * x / (2.0 * R))
        else:
            w = 0.0
        cos_psi = cos(psi)
        sin_psi = sin(psi)
        ax = w * dir_x - v * cos_psi
        ay = w * dir_y - v * sin_psi
        v_app = sqrt(ax * ax + ay * ay)
        if v_app == 0.0:
            psi_app = 0.0
        else:
            psi_app = _wrap(atan2(-ay, -ax) - psi)

        # Sail law: hold |angle of attack| at alpha_star.
        if psi_app > 0.0:
            u_s = psi_app - alpha_star
        elif psi_app < 0.0:
            u_s = psi_app + alpha_star
        else:
            u_s = -alpha_star

        # Rudder law: feedback linearization of the yaw dynamics.
        psi_d = atan2(wy[target] - y, wx[target] - x)
        e = _wrap(psi_d - psi)
        r_ref = k_psi * e
        if r_ref > r_max:
            r_ref = r_max
        elif r_ref < -r_max:
            r_ref = -r_max
        rdot_cmd = k_psi * (r_ref - r)
        v_eff = v if v > v_eps else v_eps
        u_r = ir_over_kr * rdot_cmd / (v_eff * v_eff)
        if u_r > _HALF_PI:
            u_r = _HALF_PI
        elif u_r < -_HALF_PI:
            u_r = -_HALF_PI

        out[ns] = (t0 + k * dt, x, y, psi, r, v, v_app, psi_app, u_r, u_s)
        ns += 1

        if laps >= laps_needed:
            status = STATUS_OK
            break
        if steps_in_lap >= max_lap_steps:
            status = STATUS_LAP_TIMEOUT
            break

        # One RK4 step with (u_r, u_s) held constant.
        hdt = 0.5 * dt
        d1x, d1y, d1p, d1r, d1v = _deriv(
            x, y, psi, r, v, u_r, u_s, kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y
        )
        d2x, d2y, d2p, d2r, d2v = _deriv(
            x + hdt * d1x, y + hdt * d1y, psi + hdt * d1p, r + hdt * d1r, v + hdt * d1v,
            u_r, u_s, kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y
        )
        d3x, d3y, d3p, d3r, d3v = _deriv(
            x + hdt * d2x, y + hdt * d2y, psi + hdt * d2p, r + hdt * d2r, v + hdt * d2v,
            u_r, u_s, kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y
        )
        d4x, d4y, d4p, d4r, d4v = _deriv(
            x + dt * d3x, y + dt * d3y, psi + dt * d3p, r + dt * d3r, v + dt * d3v,
            u_r, u_s, kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y
        )
        sixth = dt / 6.0
        x = x + sixth * (d1x + 2.0 * d2x + 2.0 * d3x + d4x)
        y = y + sixth * (d1y + 2.0 * d2y + 2.0 * d3y + d4y)
        psi = psi + sixth * (d1p + 2.0 * d2p + 2.0 * d3p + d4p)
        r = r + sixth * (d1r + 2.0 * d2r + 2.0 * d3r + d4r)
        v = v + sixth * (d1v + 2.0 * d2v + 2.0 * d3v + d4v)
        if v < 0.0:
            v = 0.0
        k += 1
        steps_in_lap += 1

        if not (isfinite(x) and isfinite(y) and isfinite(psi) and isfinite(r) and isfinite(v)):
            status = STATUS_DIVERGENCE
            break

    return status, out[:ns].copy(), np.asarray(lap_bounds, dtype=np.int64), target, laps


def _deriv(
    x: float,
    y: float,
    psi: float,
    r: float,
    v: float,
    u_r: float,
    u_s: float,
    kr_over_ir: float,
    m: float,
    k_L: float,
    k_D0: float,
    k_D1: float,
    v_max: float,
    R: float,
    dir_x: float,
    dir_y: float,
):
    """State derivative; mirrors ``dynamics.derivatives`` bit for bit."""
    if -R <= x <= R:
        w = v_max * math.cos(_PI * x / (2.0 * R))
    else:
        w = 0.0
    cos_psi = math.cos(psi)
    sin_psi = math.sin(psi)
    ax = w * dir_x - v * cos_psi
    ay = w * dir_y - v * sin_psi
    v_app = math.sqrt(ax * ax + ay * ay)
    if v_app == 0.0:
        psi_app = 0.0
    else:
        psi_app = _wrap(math.atan2(-ay, -ax) - psi)
    alpha = psi_app - u_s
    v_app_sq = v_app * v_app
    f_l = k_L * alpha * v_app_sq
    f_d = (k_D0 + k_D1 * alpha * alpha) * v_app_sq
    dx = v * cos_psi
    dy = v * sin_psi
    dr = kr_over_ir * v * v * u_r
    dv = (f_l * math.sin(psi_app) - f_d * math.cos(psi_app)) / m
    return dx, dy, r, dr, dv
