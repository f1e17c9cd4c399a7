"""Closed-loop simulation runner with compiled / pure-Python kernel selection.

The compiled Cython kernel is used when its extension module imported
successfully and the environment variable ``CROSSWIND_PURE_PYTHON`` is not
set; otherwise the pure-Python twin takes over.  Both produce bit-identical
trajectories.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _engine_py
from .controller import ControllerConfig, TrackingState
from .dynamics import SailboatParams, SailboatState, WindParams
from .geometry import WaypointPath

STATUS_NAMES = {
    _engine_py.STATUS_OK: "ok",
    _engine_py.STATUS_LAP_TIMEOUT: "lap_timeout",
    _engine_py.STATUS_DIVERGENCE: "divergence",
}

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None

_FORCE_PY = os.environ.get("CROSSWIND_PURE_PYTHON", "") not in ("", "0")


def compiled_available() -> bool:
    return _kernel is not None


def default_backend() -> str:
    if _kernel is not None and not _FORCE_PY:
        return "compiled"
    return "python"


def _resolve(backend: str):
    if backend == "auto":
        backend = default_backend()
    if backend == "compiled":
        if _kernel is None:
            raise RuntimeError("compiled kernel is not available; rebuild the extension")
        return _kernel, "compiled"
    if backend == "python":
        return _engine_py, "python"
    raise ValueError(f"unknown backend {backend!r}; expected auto, compiled, or python")


@dataclass(frozen=True)
class SimConfig:
    """Integrator step, initial hull state, and kernel choice."""

    dt: float = 0.01
    initial: SailboatState = field(default_factory=SailboatState)
    backend: str = "auto"

    def validate(self) -> None:
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if not self.initial.is_finite():
            raise ValueError("initial state must be finite")
        if self.backend not in ("auto", "compiled", "python"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class SimResult:
    """Raw closed-loop run: sample matrix plus lap bookkeeping.

    ``samples`` columns: t, x, y, psi, r, v, v_app, psi_app, u_r, u_s.
    """

    status: str
    samples: np.ndarray
    lap_boundaries: np.ndarray
    tracking: TrackingState
    backend: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def final_state(self) -> SailboatState:
        row = self.samples[-1]
        return SailboatState(row[1], row[2], row[3], row[4], row[5], row[0])


def simulate_path(
    initial: SailboatState,
    path: WaypointPath,
    params: SailboatParams,
    wind: WindParams,
    ctrl: ControllerConfig,
    dt: float,
    laps_needed: int,
    lap_timeout: float,
    tracking: TrackingState = TrackingState(),
    backend: str = "auto",
) -> SimResult:
    """Run the waypoint-following loop until ``laps_needed`` laps complete.

    A lap that runs longer than ``lap_timeout`` seconds stops the run with
    status ``lap_timeout``; a non-finite state stops it with ``divergence``.
    """
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    if laps_needed <= tracking.laps_completed:
        raise ValueError("laps_needed must exceed laps already completed")
    if not lap_timeout > 0.0:
        raise ValueError("lap_timeout must be > 0")

    impl, name = _resolve(backend)
    wx, wy = path.xy_lists()
    wx = np.ascontiguousarray(wx, dtype=np.float64)
    wy = np.ascontiguousarray(wy, dtype=np.float64)
    max_lap_steps = int(math.floor(lap_timeout / dt + 1e-9))

    status_code, samples, bounds, target, laps = impl.run_closed_loop(
        initial.x, initial.y, initial.psi, initial.r, initial.v, initial.t,
        wx, wy,
        tracking.target_index, tracking.laps_completed,
        params.k_r, params.I_R, params.m, params.k_L, params.k_D0, params.k_D1,
        wind.v_max, wind.R, wind.direction[0], wind.direction[1],
        ctrl.capture_radius, ctrl.k_psi, ctrl.r_max, ctrl.alpha_star, ctrl.v_eps,
        dt, laps_needed, max_lap_steps,
    )
    return SimResult(
        status=STATUS_NAMES[status_code],
        samples=samples,
        lap_boundaries=bounds,
        tracking=TrackingState(target_index=target, laps_completed=laps),
        backend=name,
    )
