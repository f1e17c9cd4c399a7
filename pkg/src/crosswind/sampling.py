"""Seeded Latin-hypercube sampling used by the optimizer and GP restarts."""

from __future__ import annotations

import numpy as np


def latin_hypercube(n: int, lows, highs, rng: np.random.Generator) -> np.ndarray:
    """n stratified points in the box [lows, highs], one per stratum per axis."""
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    if n < 1:
        raise ValueError("n must be >= 1")
    d = len(lows)
    u = rng.random((n, d))
    out = np.empty((n, d))
    for j in range(d):
        perm = rng.permutation(n)
        out[:, j] = lows[j] + (perm + u[:, j]) * ((highs[j] - lows[j]) / n)
    return out
