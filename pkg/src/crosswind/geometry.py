"""Figure-8 waypoint generation from the two basis parameters (W, H).

Waypoints sample the Lemniscate of Gerono
    x_i = W cos(2*pi*i/(n+1)),  y_i = H sin(2*pi*i/(n+1)) cos(2*pi*i/(n+1))
for i = 0..n.  The second half of the index range is built by mirroring the
first half across the x axis, which makes the mirror symmetry of the point
set exact in floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import InvalidBasisError


@dataclass(frozen=True)
class BasisParams:
    """Width and height of the figure-8."""

    W: float
    H: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.W, self.H)


@dataclass(frozen=True)
class SearchBox:
    """Closed box of admissible basis parameters."""

    w_min: float = 5.0
    w_max: float = 30.0
    h_min: float = 4.0
    h_max: float = 24.0

    def validate(self) -> None:
        if not self.w_min < self.w_max:
            raise ValueError("search box requires w_min < w_max")
        if not self.h_min < self.h_max:
            raise ValueError("search box requires h_min < h_max")
        if self.w_min <= 0.0 or self.h_min <= 0.0:
            raise ValueError("search box must be strictly positive")

    @property
    def widths(self) -> tuple[float, float]:
        return (self.w_max - self.w_min, self.h_max - self.h_min)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.w_min + self.w_max), 0.5 * (self.h_min + self.h_max))

    def contains(self, beta: BasisParams) -> bool:
        return self.w_min <= beta.W <= self.w_max and self.h_min <= beta.H <= self.h_max


def validate_basis(beta: BasisParams, bounds: SearchBox) -> str | None:
    """Return None if ``beta`` lies in the closed box, else a violation message."""
    bounds.validate()
    if not (bounds.w_min <= beta.W <= bounds.w_max):
        return f"W={beta.W!r} outside [{bounds.w_min}, {bounds.w_max}]"
    if not (bounds.h_min <= beta.H <= bounds.h_max):
        return f"H={beta.H!r} outside [{bounds.h_min}, {bounds.h_max}]"
    return None


@dataclass(frozen=True)
class WaypointPath:
    """Ordered lap of n+1 planar waypoints; traversal wraps n -> 0."""

    points: tuple[tuple[float, float], ...]
    n: int

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> str:
        return json.dumps([[p[0], p[1]] for p in self.points])

    def xy_lists(self) -> tuple[list[float], list[float]]:
        return [p[0] for p in self.points], [p[1] for p in self.points]


def waypoints(beta: BasisParams, n: int = 39, bounds: SearchBox | None = None) -> WaypointPath:
    """Place n+1 waypoints on the figure-8 defined by ``beta``.

    Raises InvalidBasisError for non-positive W/H, or for ``beta`` outside
    ``bounds`` when a search box is supplied.
    """
    if n < 3:
        raise ValueError("waypoint parameter n must be >= 3")
    if not beta.W > 0.0:
        raise InvalidBasisError(f"W must be > 0, got {beta.W!r}", axis="W")
    if not beta.H > 0.0:
        raise InvalidBasisError(f"H must be > 0, got {beta.H!r}", axis="H")
    if bounds is not None:
        violation = validate_basis(beta, bounds)
        if violation is not None:
            axis = violation.split("=", 1)[0]
            raise InvalidBasisError(f"basis outside search box: {violation}", axis=axis)

    count = n + 1
    pts: list[tuple[float, float]] = [(0.0, 0.0)] * count
    half = count // 2
    for i in range(half + 1):
        theta = 2.0 * math.pi * i / count
        c = math.cos(theta)
        s = math.sin(theta)
        pts[i] = (beta.W * c, beta.H * s * c)
    for i in range(half + 1, count):
        mx, my = pts[count - i]
        pts[i] = (mx, -my)
    return WaypointPath(points=tuple(pts), n=n)
