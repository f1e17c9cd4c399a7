"""Expected-improvement acquisition and the Bayesian-optimization loop.

Each iteration refits the GP on all successful observations, maximizes
expected improvement over a uniform candidate grid (plus jittered midpoints
of past inputs) with deterministic coordinate refinement, evaluates the
proposal, and appends it to the history.  Failed evaluations are kept out of
the GP dataset; the proposer avoids a small exclusion ball around them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import OptimizationAbort, SimulationFailure
from .geometry import BasisParams, SearchBox
from .gp import Dataset, FittedGp, HyperBounds, Hyperparams, fit_gp, fit_hyperparameters, predict_batch
from .sampling import latin_hypercube

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Fraction of the box diagonal kept clear around failed evaluations.
_EXCLUSION_FRACTION = 0.02


@dataclass(frozen=True)
class BoConfig:
    domain: SearchBox = field(default_factory=SearchBox)
    n_init: int = 5
    n_iter: int = 20
    acq_grid: int = 50
    acq_refine_steps: int = 25
    fit_restarts: int = 10
    rng_seed: int = 1

    def validate(self) -> None:
        self.domain.validate()
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.n_iter < 0:
            raise ValueError("n_iter must be >= 0")
        if self.acq_grid < 2:
            raise ValueError("acq_grid must be >= 2 per axis")
        if self.acq_refine_steps < 0:
            raise ValueError("acq_refine_steps must be >= 0")
        if self.fit_restarts < 1:
            raise ValueError("fit_restarts must be >= 1")


@dataclass(frozen=True)
class BoRecord:
    """One objective evaluation: proposal, outcome, and model snapshot."""

    iteration: int
    phase: str
    beta: BasisParams
    j: float | None
    failure: str
    best_j: float | None
    theta: Hyperparams | None
    ei: float | None
    wall_time: float


@dataclass
class BoHistory:
    records: list[BoRecord] = field(default_factory=list)

    @property
    def best_record(self) -> BoRecord:
        successes = [rec for rec in self.records if rec.j is not None]
        if not successes:
            raise ValueError("history has no successful evaluation")
        return max(successes, key=lambda rec: rec.j)

    @property
    def best_j(self) -> float:
        return self.best_record.j

    @property
    def best_beta(self) -> BasisParams:
        return self.best_record.beta


def expected_improvement(mu, sigma, j_max):
    """Closed-form E[max(0, X - j_max)] for X ~ Normal(mu, sigma^2).

    Zero when sigma is zero; tiny negative floating-point results are
    clamped to zero.  Accepts scalars or arrays.
    """
    mu_arr = np.asarray(mu, dtype=float)
    sigma_arr = np.asarray(sigma, dtype=float)
    safe_sigma = np.where(sigma_arr > 0.0, sigma_arr, 1.0)
    z = (mu_arr - j_max) / safe_sigma
    phi = np.exp(-0.5 * z * z) / _SQRT_2PI
    ei = np.where(sigma_arr > 0.0, (mu_arr - j_max) * ndtr(z) + sigma_arr * phi, 0.0)
    ei = np.maximum(ei, 0.0)
    if np.isscalar(mu) and np.isscalar(sigma):
        return float(ei)
    return ei


def _ei_and_var(gp: FittedGp, points: np.ndarray, j_max: float) -> tuple[np.ndarray, np.ndarray]:
    mu, var = predict_batch(gp, points)
    return expected_improvement(mu, np.sqrt(var), j_max), var


def _excluded(points: np.ndarray, failed: np.ndarray, radius: float) -> np.ndarray:
    if len(failed) == 0:
        return np.zeros(len(points), dtype=bool)
    d2 = ((points[:, None, :] - failed[None, :, :]) ** 2).sum(axis=2)
    return (d2 < radius * radius).any(axis=1)


def _pick_best(points: np.ndarray, ei: np.ndarray, var: np.ndarray) -> int:
    """Highest EI; ties resolved by larger variance, then lexicographic (W, H)."""
    idx = np.flatnonzero(ei == ei.max())
    if len(idx) > 1:
        sub_var = var[idx]
        idx = idx[np.flatnonzero(sub_var == sub_var.max())]
        if len(idx) > 1:
            sub = points[idx]
            order = np.lexsort((sub[:, 1], sub[:, 0]))
            idx = idx[order[:1]]
    return int(idx[0])


def propose_next(
    gp: FittedGp | None,
    cfg: BoConfig,
    j_max: float,
    rng: np.random.Generator,
    failed_points=(),
) -> BasisParams:
    """Maximize expected improvement over the search box.

    Candidates are a uniform acq_grid x acq_grid lattice plus jittered
    midpoints of every pair of past inputs; the best candidate is polished
    by coordinate pattern search with a halving step.  Never returns a point
    outside the (closed) box.  With an empty model the box center is
    returned.
    """
    box = cfg.domain
    if gp is None or gp.size == 0:
        return BasisParams(*box.center)

    w_vals = np.linspace(box.w_min, box.w_max, cfg.acq_grid)
    h_vals = np.linspace(box.h_min, box.h_max, cfg.acq_grid)
    grid = np.column_stack(
        [np.repeat(w_vals, cfg.acq_grid), np.tile(h_vals, cfg.acq_grid)]
    )
    cands = [grid]

    X = gp.dataset.inputs
    if len(X) >= 2:
        pairs = [(0.5 * (X[i] + X[j])) for i in range(len(X)) for j in range(i + 1, len(X))]
        mids = np.asarray(pairs)
        jitter = rng.normal(0.0, 1.0, size=mids.shape) * (0.01 * np.asarray(box.widths))
        mids = mids + jitter
        mids[:, 0] = np.clip(mids[:, 0], box.w_min, box.w_max)
        mids[:, 1] = np.clip(mids[:, 1], box.h_min, box.h_max)
        cands.append(mids)
    points = np.vstack(cands)

    failed = np.atleast_2d(np.asarray(failed_points, dtype=float)) if len(failed_points) else np.empty((0, 2))
    radius = _EXCLUSION_FRACTION * math.hypot(*box.widths)

    ei, var = _ei_and_var(gp, points, j_max)
    drop = _excluded(points, failed, radius)
    if drop.all():
        drop = np.zeros(len(points), dtype=bool)
    ei = np.where(drop, -1.0, ei)

    best = _pick_best(points, ei, var)
    cur = points[best].copy()
    cur_ei = float(ei[best])
    cur_var = float(var[best])

    step_w = (box.w_max - box.w_min) / (cfg.acq_grid - 1)
    step_h = (box.h_max - box.h_min) / (cfg.acq_grid - 1)
    for _ in range(cfg.acq_refine_steps):
        moved = False
        for dw, dh in ((step_w, 0.0), (-step_w, 0.0), (0.0, step_h), (0.0, -step_h)):
            cand = np.array(
                [
                    min(max(cur[0] + dw, box.w_min), box.w_max),
                    min(max(cur[1] + dh, box.h_min), box.h_max),
                ]
            )
            if len(failed) and bool(_excluded(cand[None, :], failed, radius)[0]):
                continue
            cand_ei, cand_var = _ei_and_var(gp, cand[None, :], j_max)
            cand_ei = float(cand_ei[0])
            cand_var = float(cand_var[0])
            if cand_ei > cur_ei or (cand_ei == cur_ei and cand_var > cur_var):
                cur, cur_ei, cur_var = cand, cand_ei, cand_var
                moved = True
        if not moved:
            step_w *= 0.5
            step_h *= 0.5
    return BasisParams(float(cur[0]), float(cur[1]))


def _evaluate(objective, beta: BasisParams) -> tuple[float | None, str, float]:
    start = time.perf_counter()
    try:
        j = float(objective(beta))
        failure = ""
    except SimulationFailure as exc:
        j = None
        failure = exc.kind
    return j, failure, time.perf_counter() - start


def run_bo(objective, cfg: BoConfig) -> BoHistory:
    """Algorithm: evaluate a seeded Latin-hypercube initial design, then loop
    fit-GP / propose / evaluate / append for ``cfg.n_iter`` iterations.

    ``objective`` maps BasisParams to J and may raise SimulationFailure;
    failures are recorded but never become incumbents.  Total evaluations:
    n_init + n_iter.  Deterministic given (objective, cfg).
    """
    cfg.validate()
    box = cfg.domain
    history = BoHistory()
    xs: list[tuple[float, float]] = []
    ys: list[float] = []
    failed: list[tuple[float, float]] = []
    best: float | None = None

    rng_design = np.random.default_rng(np.random.SeedSequence(entropy=cfg.rng_seed, spawn_key=(0,)))
    rng_prop = np.random.default_rng(np.random.SeedSequence(entropy=cfg.rng_seed, spawn_key=(2,)))

    init_points = latin_hypercube(cfg.n_init, (box.w_min, box.h_min), (box.w_max, box.h_max), rng_design)
    for i, (w, h) in enumerate(init_points):
        beta = BasisParams(float(w), float(h))
        j, failure, wall = _evaluate(objective, beta)
        if j is None:
            failed.append(beta.as_tuple())
        else:
            xs.append(beta.as_tuple())
            ys.append(j)
            best = j if best is None else max(best, j)
        history.records.append(
            BoRecord(i, "init", beta, j, failure, best, None, None, wall)
        )
    if not xs:
        raise OptimizationAbort(
            f"all {cfg.n_init} initial evaluations failed "
            f"({', '.join(rec.failure for rec in history.records)})"
        )

    theta: Hyperparams | None = None
    for k in range(cfg.n_iter):
        data = Dataset.from_observations(np.asarray(xs), np.asarray(ys))
        bounds = HyperBounds.from_scales(float(np.std(data.centered)), box.widths)
        theta = fit_hyperparameters(
            data,
            bounds,
            restarts=cfg.fit_restarts,
            seed=np.random.SeedSequence(entropy=cfg.rng_seed, spawn_key=(1, k)),
            initial=theta,
        )
        gp = fit_gp(data, theta)
        j_max = max(ys)
        beta = propose_next(gp, cfg, j_max, rng_prop, failed_points=np.asarray(failed))
        mu, var = predict_batch(gp, np.asarray(beta.as_tuple())[None, :])
        ei = float(expected_improvement(mu, np.sqrt(var), j_max)[0])

        j, failure, wall = _evaluate(objective, beta)
        if j is None:
            failed.append(beta.as_tuple())
        else:
            xs.append(beta.as_tuple())
            ys.append(j)
            best = j if best is None else max(best, j)
        history.records.append(
            BoRecord(cfg.n_init + k, "bo", beta, j, failure, best, theta, ei, wall)
        )
    return history
