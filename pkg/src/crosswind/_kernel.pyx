# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop simulation kernel.

Twin of ``_engine_py.run_closed_loop``.  Every floating-point expression
mirrors the pure-Python fallback with identical operands and associativity
(and the extension is built with -ffp-contract=off), so both backends
produce bit-identical trajectories.
"""

from libc.math cimport M_PI, atan2, cos, fmod, isfinite, sin, sqrt

import numpy as np

STATUS_OK = 0
STATUS_LAP_TIMEOUT = 1
STATUS_DIVERGENCE = 2

cdef double _TWO_PI = 2.0 * M_PI
cdef double _HALF_PI = 0.5 * M_PI


cdef inline double _wrap(double a) noexcept:
    cdef double w = fmod(a, _TWO_PI)
    if w > M_PI:
        w -= _TWO_PI
    elif w <= -M_PI:
        w += _TWO_PI
    return w


cdef struct Deriv:
    double dx
    double dy
    double dp
    double dr
    double dv


cdef inline Deriv _deriv(
    double x, double y, double psi, double r, double v,
    double u_r, double u_s,
    double kr_over_ir, double m,
    double k_L, double k_D0, double k_D1,
    double v_max, double R, double dir_x, double dir_y,
) noexcept:
    cdef double w, cos_psi, sin_psi, ax, ay, v_app, psi_app, alpha, v_app_sq, f_l, f_d
    cdef Deriv d
    if -R <= x <= R:
        w = v_max * cos(M_PI * x / (2.0 * R))
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
    alpha = psi_app - u_s
    v_app_sq = v_app * v_app
    f_l = k_L * alpha * v_app_sq
    f_d = (k_D0 + k_D1 * alpha * alpha) * v_app_sq
    d.dx = v * cos_psi
    d.dy = v * sin_psi
    d.dp = r
    d.dr = kr_over_ir * v * v * u_r
    d.dv = (f_l * sin(psi_app) - f_d * cos(psi_app)) / m
    return d


def run_closed_loop(
    double x, double y, double psi, double r, double v, double t0,
    double[::1] wx, double[::1] wy,
    int target0, int laps0,
    double k_r, double I_R, double m,
    double k_L, double k_D0, double k_D1,
    double v_max, double R, double dir_x, double dir_y,
    double capture_radius, double k_psi, double r_max,
    double alpha_star, double v_eps,
    double dt, int laps_needed, long max_lap_steps,
):
    """See ``_engine_py.run_closed_loop``; same contract, same arithmetic."""
    cdef int n_last = wx.shape[0] - 1
    cdef double cr2 = capture_radius * capture_radius
    cdef double kr_over_ir = k_r / I_R
    cdef double ir_over_kr = I_R / k_r
    cdef long cap = (laps_needed - laps0) * (max_lap_steps + 1) + 1

    out_arr = np.empty((cap, 10), dtype=np.float64)
    bounds_arr = np.empty(laps_needed - laps0, dtype=np.int64)
    cdef double[:, ::1] out = out_arr
    cdef long[::1] lap_bounds = bounds_arr

    cdef int target = target0
    cdef int laps = laps0
    cdef long ns = 0
    cdef long k = 0
    cdef long steps_in_lap = 0
    cdef long nb = 0
    cdef int status = STATUS_OK

    cdef double ddx, ddy, w, cos_psi, sin_psi, ax, ay, v_app, psi_app
    cdef double u_s, u_r, psi_d, e, r_ref, rdot_cmd, v_eff
    cdef double hdt, sixth
    cdef Deriv d1, d2, d3, d4

    while True:
        ddx = wx[target] - x
        ddy = wy[target] - y
        if ddx * ddx + ddy * ddy < cr2:
            if target == n_last:
                laps += 1
                lap_bounds[nb] = ns
                nb += 1
                steps_in_lap = 0
                target = 0
            else:
                target += 1

        if -R <= x <= R:
            w = v_max * cos(M_PI * x / (2.0 * R))
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

        if psi_app > 0.0:
            u_s = psi_app - alpha_star
        elif psi_app < 0.0:
            u_s = psi_app + alpha_star
        else:
            u_s = -alpha_star

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

        out[ns, 0] = t0 + k * dt
        out[ns, 1] = x
        out[ns, 2] = y
        out[ns, 3] = psi
        out[ns, 4] = r
        out[ns, 5] = v
        out[ns, 6] = v_app
        out[ns, 7] = psi_app
        out[ns, 8] = u_r
        out[ns, 9] = u_s
        ns += 1

        if laps >= laps_needed:
            status = STATUS_OK
            break
        if steps_in_lap >= max_lap_steps:
            status = STATUS_LAP_TIMEOUT
            break

        hdt = 0.5 * dt
        d1 = _deriv(x, y, psi, r, v, u_r, u_s,
                    kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y)
        d2 = _deriv(x + hdt * d1.dx, y + hdt * d1.dy, psi + hdt * d1.dp,
                    r + hdt * d1.dr, v + hdt * d1.dv, u_r, u_s,
                    kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y)
        d3 = _deriv(x + hdt * d2.dx, y + hdt * d2.dy, psi + hdt * d2.dp,
                    r + hdt * d2.dr, v + hdt * d2.dv, u_r, u_s,
                    kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y)
        d4 = _deriv(x + dt * d3.dx, y + dt * d3.dy, psi + dt * d3.dp,
                    r + dt * d3.dr, v + dt * d3.dv, u_r, u_s,
                    kr_over_ir, m, k_L, k_D0, k_D1, v_max, R, dir_x, dir_y)
        sixth = dt / 6.0
        x = x + sixth * (d1.dx + 2.0 * d2.dx + 2.0 * d3.dx + d4.dx)
        y = y + sixth * (d1.dy + 2.0 * d2.dy + 2.0 * d3.dy + d4.dy)
        psi = psi + sixth * (d1.dp + 2.0 * d2.dp + 2.0 * d3.dp + d4.dp)
        r = r + sixth * (d1.dr + 2.0 * d2.dr + 2.0 * d3.dr + d4.dr)
        v = v + sixth * (d1.dv + 2.0 * d2.dv + 2.0 * d3.dv + d4.dv)
        if v < 0.0:
            v = 0.0
        k += 1
        steps_in_lap += 1

        if not (isfinite(x) and isfinite(y) and isfinite(psi) and isfinite(r) and isfinite(v)):
            status = STATUS_DIVERGENCE
            break

    return status, out_arr[:ns].copy(), bounds_arr[:nb].copy(), target, laps
