"""Lap-averaged harvested-power index J from a simulated trajectory.

J for one lap is (k_p / T_f) * integral of v_app^3 over the lap, evaluated
with the trapezoidal rule on the integrator grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .engine import SimResult, simulate_path
from .errors import DegenerateLapError, SimulationFailure
from .geometry import BasisParams, waypoints

if TYPE_CHECKING:
    from .config import ExperimentConfig

COLUMNS = ("t", "x", "y", "psi", "r", "v", "v_app", "psi_app", "u_r", "u_s")


@dataclass(frozen=True)
class MetricConfig:
    k_p: float = 1.0
    warmup_laps: int = 1
    measured_laps: int = 1
    lap_timeout: float = 120.0

    def validate(self) -> None:
        if not self.k_p > 0.0:
            raise ValueError("k_p must be > 0")
        if self.warmup_laps < 0:
            raise ValueError("warmup_laps must be >= 0")
        if self.measured_laps < 1:
            raise ValueError("measured_laps must be >= 1")
        if not self.lap_timeout > 0.0:
            raise ValueError("lap_timeout must be > 0")


@dataclass(frozen=True)
class TrajectoryLog:
    """Time-ordered control-interval samples plus lap-completion indices."""

    samples: np.ndarray
    lap_boundaries: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, COLUMNS.index(name)]

    @property
    def n_laps(self) -> int:
        return len(self.lap_boundaries)

    def lap_slice(self, lap: int) -> tuple[int, int]:
        """Inclusive sample-index range [start, end] of a completed lap."""
        if lap < 0 or lap >= len(self.lap_boundaries):
            raise IndexError(f"lap {lap} not in log (laps completed: {len(self.lap_boundaries)})")
        start = 0 if lap == 0 else int(self.lap_boundaries[lap - 1])
        end = int(self.lap_boundaries[lap])
        return start, end

    def write_csv(self, path) -> None:
        from .persist import format_float

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(COLUMNS)
            for row in self.samples:
                writer.writerow([format_float(val) for val in row])

    @classmethod
    def from_result(cls, result: SimResult) -> "TrajectoryLog":
        return cls(samples=result.samples, lap_boundaries=result.lap_boundaries)


def lap_power(log: TrajectoryLog, lap: int, k_p: float) -> float:
    """Average of k_p * v_app^3 over one completed lap."""
    start, end = log.lap_slice(lap)
    if end - start < 1:
        raise DegenerateLapError(f"lap {lap} has fewer than 2 samples")
    t = log.samples[start : end + 1, 0]
    v_app = log.samples[start : end + 1, 6]
    t_f = t[-1] - t[0]
    if not t_f > 0.0:
        raise DegenerateLapError(f"lap {lap} has non-positive duration {t_f!r}")
    integral = float(np.trapezoid(v_app * v_app * v_app, t))
    return k_p * (integral / t_f)


def evaluate_basis(
    beta: BasisParams,
    cfg: "ExperimentConfig",
    return_log: bool = False,
):
    """Objective J(beta): simulate laps on the beta figure-8 and average power.

    Generates the waypoint path, runs the closed loop for warm-up plus
    measured laps from the configured initial state, and returns the mean
    lap J over the measured laps.  Deterministic given (beta, cfg).

    Raises InvalidBasisError for beta outside the search box and
    SimulationFailure (kind ``lap_timeout`` or ``divergence``) when the run
    does not complete.
    """
    path = waypoints(beta, cfg.geometry.n, bounds=cfg.geometry.domain)
    laps_needed = cfg.metric.warmup_laps + cfg.metric.measured_laps
    result = simulate_path(
        cfg.sim.initial,
        path,
        cfg.sailboat,
        cfg.wind,
        cfg.controller,
        cfg.sim.dt,
        laps_needed,
        cfg.metric.lap_timeout,
        backend=cfg.sim.backend,
    )
    if not result.ok:
        raise SimulationFailure(result.status, f"evaluation of beta={beta} failed: {result.status}")
    log = TrajectoryLog.from_result(result)
    values = [
        lap_power(log, lap, cfg.metric.k_p)
        for lap in range(cfg.metric.warmup_laps, laps_needed)
    ]
    j = float(np.mean(values))
    if return_log:
        return j, log
    return j
