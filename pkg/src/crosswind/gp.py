"""Gaussian-process regression over basis parameters.

Squared-exponential kernel with per-axis length scales, marginal-likelihood
hyperparameter fitting in log-space (value and analytic gradient, no explicit
inverses), and predictive mean/variance through a cached Cholesky factor.
Targets are centered by their mean before fitting; the offset is added back
to predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .errors import FactorizationError
from .sampling import latin_hypercube

LOG_2PI = math.log(2.0 * math.pi)

# Diagonal jitter ladder, as multiples of sigma0^2.
_JITTERS = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class Hyperparams:
    """Kernel amplitude, per-axis length scales, and observation noise."""

    sigma0: float
    lambdas: tuple[float, float]
    sigma_eps: float

    def validate(self) -> None:
        if not self.sigma0 > 0.0 or not self.sigma_eps > 0.0 or not all(l > 0.0 for l in self.lambdas):
            raise ValueError("hyperparameters must be strictly positive")

    def to_log_vector(self) -> np.ndarray:
        return np.log([self.sigma0, self.lambdas[0], self.lambdas[1], self.sigma_eps])

    @classmethod
    def from_log_vector(cls, z) -> "Hyperparams":
        s0, l1, l2, se = np.exp(np.asarray(z, dtype=float))
        return cls(sigma0=float(s0), lambdas=(float(l1), float(l2)), sigma_eps=float(se))


@dataclass(frozen=True)
class Dataset:
    """Observed (beta, J) pairs with the mean offset used for centering."""

    inputs: np.ndarray
    targets: np.ndarray
    mean_offset: float

    @classmethod
    def from_observations(cls, inputs, targets) -> "Dataset":
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        targets = np.asarray(targets, dtype=float).ravel()
        if len(inputs) != len(targets):
            raise ValueError("inputs and targets must have the same length")
        if len(targets) < 1:
            raise ValueError("dataset needs at least one observation")
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(targets))):
            raise ValueError("dataset must be finite")
        return cls(inputs=inputs, targets=targets, mean_offset=float(np.mean(targets)))

    @property
    def size(self) -> int:
        return len(self.targets)

    @property
    def centered(self) -> np.ndarray:
        return self.targets - self.mean_offset


@dataclass(frozen=True)
class HyperBounds:
    """Per-hyperparameter box used by the log-space fit."""

    sigma0: tuple[float, float]
    lambdas: tuple[tuple[float, float], tuple[float, float]]
    sigma_eps: tuple[float, float]
    input_widths: tuple[float, float]
    target_scale: float

    @classmethod
    def from_scales(cls, target_scale: float, input_widths) -> "HyperBounds":
        s = max(float(target_scale), 1e-12)
        w1, w2 = (max(float(w), 1e-9) for w in input_widths)
        return cls(
            sigma0=(1e-3 * s, 1e3 * s),
            lambdas=((0.02 * w1, 20.0 * w1), (0.02 * w2, 20.0 * w2)),
            sigma_eps=(1e-6 * s, 10.0 * s),
            input_widths=(w1, w2),
            target_scale=s,
        )

    @classmethod
    def from_data(cls, data: Dataset) -> "HyperBounds":
        spans = np.ptp(data.inputs, axis=0) if data.size > 1 else np.ones(data.inputs.shape[1])
        return cls.from_scales(float(np.std(data.centered)), spans)

    def log_bounds(self) -> list[tuple[float, float]]:
        pairs = [self.sigma0, self.lambdas[0], self.lambdas[1], self.sigma_eps]
        return [(math.log(lo), math.log(hi)) for lo, hi in pairs]

    def clip(self, theta: Hyperparams) -> Hyperparams:
        z = theta.to_log_vector()
        lo, hi = zip(*self.log_bounds())
        return Hyperparams.from_log_vector(np.clip(z, lo, hi))


@dataclass(frozen=True)
class FittedGp:
    """Immutable posterior: dataset, hyperparameters, cached factorization."""

    dataset: Dataset
    theta: Hyperparams
    chol: np.ndarray
    alpha_vec: np.ndarray

    @property
    def size(self) -> int:
        return self.dataset.size


def se_kernel(a, b, theta: Hyperparams) -> float:
    """Squared-exponential covariance between two basis-parameter points."""
    d = (np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) / np.asarray(theta.lambdas)
    return theta.sigma0 ** 2 * math.exp(-0.5 * float(np.dot(d, d)))


def _correlation(A: np.ndarray, B: np.ndarray, theta: Hyperparams) -> np.ndarray:
    lam = np.asarray(theta.lambdas)
    sq = cdist(A / lam, B / lam, "sqeuclidean")
    return np.exp(-0.5 * sq)


def _factorize(K: np.ndarray, sigma0: float) -> np.ndarray:
    """Lower Cholesky of K plus a growing diagonal jitter; raises when hopeless."""
    for jit in _JITTERS:
        try:
            return cholesky(K + (jit * sigma0 ** 2) * np.eye(len(K)), lower=True)
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError("kernel matrix not positive definite after jitter ladder")


def log_marginal_likelihood(data: Dataset, theta: Hyperparams) -> tuple[float, np.ndarray]:
    """Marginal log-likelihood of the centered targets and its gradient.

    The gradient is with respect to (log sigma0, log lambda_1, log lambda_2,
    log sigma_eps).  Uses the Cholesky factorization throughout; never forms
    an explicit determinant.
    """
    theta.validate()
    y = data.centered
    t = data.size
    A = data.inputs
    lam = np.asarray(theta.lambdas)
    E = _correlation(A, A, theta)
    s0sq = theta.sigma0 ** 2
    K = s0sq * E + theta.sigma_eps ** 2 * np.eye(t)
    L = _factorize(K, theta.sigma0)
    alpha = cho_solve((L, True), y)
    value = float(-0.5 * y.dot(alpha) - np.sum(np.log(np.diag(L))) - 0.5 * t * LOG_2PI)

    K_inv = cho_solve((L, True), np.eye(t))
    AA = np.outer(alpha, alpha) - K_inv
    grad = np.empty(4)
    grad[0] = 0.5 * float(np.sum(AA * (2.0 * s0sq * E)))
    for d in range(2):
        diff_sq = (A[:, d, None] - A[None, :, d]) ** 2
        grad[1 + d] = 0.5 * float(np.sum(AA * (s0sq * E * diff_sq / lam[d] ** 2)))
    grad[3] = 0.5 * float(np.trace(AA)) * 2.0 * theta.sigma_eps ** 2
    return value, grad


def default_hyperparams(data: Dataset, bounds: HyperBounds) -> Hyperparams:
    """Cold-start prior: target-std amplitude, quarter-width length scales."""
    sigma0 = max(float(np.std(data.centered)), 1e-3 * bounds.target_scale)
    theta = Hyperparams(
        sigma0=sigma0,
        lambdas=(0.25 * bounds.input_widths[0], 0.25 * bounds.input_widths[1]),
        sigma_eps=1e-3 * sigma0,
    )
    return bounds.clip(theta)


def fit_hyperparameters(
    data: Dataset,
    bounds: HyperBounds,
    restarts: int = 10,
    seed: int | np.random.SeedSequence = 0,
    initial: Hyperparams | None = None,
) -> Hyperparams:
    """Maximize the marginal likelihood by seeded multi-start L-BFGS-B.

    Start points are the previous hyperparameters (or the cold-start prior)
    plus Latin-hypercube seeds in log-space.  Deterministic given the seed;
    the returned likelihood is never below that of any start point.
    """
    if data.size < 2:
        return initial if initial is not None else default_hyperparams(data, bounds)

    log_bounds = bounds.log_bounds()
    lo = np.array([b[0] for b in log_bounds])
    hi = np.array([b[1] for b in log_bounds])

    def neg(z):
        try:
            value, grad = log_marginal_likelihood(data, Hyperparams.from_log_vector(z))
        except FactorizationError:
            return 1e25, np.zeros(4)
        return -value, -grad

    starts = [bounds.clip(initial if initial is not None else default_hyperparams(data, bounds))]
    n_extra = max(restarts - len(starts), 0)
    if n_extra:
        rng = np.random.default_rng(seed)
        for z in latin_hypercube(n_extra, lo, hi, rng):
            starts.append(Hyperparams.from_log_vector(z))

    best_z = None
    best_val = -np.inf
    for theta in starts:
        z0 = np.clip(theta.to_log_vector(), lo, hi)
        v0 = -neg(z0)[0]
        if v0 > best_val:
            best_val, best_z = v0, z0
        res = minimize(neg, z0, jac=True, method="L-BFGS-B", bounds=log_bounds)
        v1 = -res.fun
        if np.isfinite(v1) and v1 > best_val:
            best_val, best_z = v1, res.x
    return Hyperparams.from_log_vector(best_z)


def fit_gp(data: Dataset, theta: Hyperparams) -> FittedGp:
    """Factorize the kernel matrix and cache the weight vector."""
    theta.validate()
    E = _correlation(data.inputs, data.inputs, theta)
    K = theta.sigma0 ** 2 * E + theta.sigma_eps ** 2 * np.eye(data.size)
    L = _factorize(K, theta.sigma0)
    alpha = cho_solve((L, True), data.centered)
    return FittedGp(dataset=data, theta=theta, chol=L, alpha_vec=alpha)


def predict_batch(gp: FittedGp, queries) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at each query row."""
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    k_star = gp.theta.sigma0 ** 2 * _correlation(Q, gp.dataset.inputs, gp.theta)
    mu = k_star @ gp.alpha_vec + gp.dataset.mean_offset
    w = solve_triangular(gp.chol, k_star.T, lower=True)
    var = gp.theta.sigma0 ** 2 - np.sum(w * w, axis=0)
    return mu, np.maximum(var, 0.0)


def predict(gp: FittedGp, q) -> tuple[float, float]:
    """Posterior mean and variance at one basis-parameter point."""
    mu, var = predict_batch(gp, np.asarray(q, dtype=float)[None, :])
    return float(mu[0]), float(var[0])
