"""Arithmetic on the circle R/Z (circumference 1).

Points are plain floats in ``[0, 1)``; arcs are positively oriented and closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def wrap(x):
    """Reduce a real (or array of reals) modulo 1 into ``[0, 1)``."""
    if np.ndim(x) == 0:
        r = float(x) - math.floor(x)
        # x slightly below an integer can round up to exactly 1.0
        return 0.0 if r >= 1.0 else r
    x = np.asarray(x, dtype=np.float64)
    r = x - np.floor(x)
    r[r >= 1.0] = 0.0
    return r


def dist(x, y):
    """Normalized circle distance, a value in ``[0, 1/2]``.

    Works elementwise on arrays.
    """
    # |x - y| on reduced inputs is exactly symmetric
    d = np.abs(np.subtract(wrap(x), wrap(y)))
    return np.minimum(d, 1.0 - d) if np.ndim(d) else min(d, 1.0 - d)


def forward_gap(x, y):
    """Length of the positively oriented arc from ``x`` to ``y``."""
    return wrap(np.subtract(y, x))


def precedes(x: float, y: float) -> bool:
    """The strict order ``x < y``: ``d(x, y) < 1/2`` and ``[x, y]`` is positively oriented."""
    g = forward_gap(x, y)
    return 0.0 < g < 0.5


def ordered_chain(points: Sequence[float]) -> bool:
    """True iff ``x_1 < x_2 < ... < x_M`` holds in the circular sense.

    Every consecutive pair must satisfy :func:`precedes`, and the whole chain
    must fit in an arc shorter than one half: ``d(x_1, x_M) < 1/2``.
    """
    pts = [float(p) for p in points]
    if len(pts) < 2:
        raise ValueError("ordered_chain needs at least two points")
    if not all(precedes(a, b) for a, b in zip(pts, pts[1:])):
        return False
    # Consecutive positive gaps whose running total stays below 1/2 keep the
    # chain inside one half-circle, which also gives d(x_1, x_M) < 1/2.
    total = sum(forward_gap(a, b) for a, b in zip(pts, pts[1:]))
    return total < 0.5 and dist(pts[0], pts[-1]) < 0.5


@dataclass(frozen=True)
class Arc:
    """Closed arc ``{start + t mod 1 : 0 <= t <= length}``.

    ``length == 1`` denotes the full circle.
    """

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 <= self.length <= 1.0:
            raise ValueError(f"arc length must lie in [0, 1], got {self.length}")
        object.__setattr__(self, "start", wrap(self.start))

    @property
    def end(self) -> float:
        return wrap(self.start + self.length)

    def contains(self, x, tol: float = 0.0):
        return arc_contains(self, x, tol)

    def is_close(self, other: "Arc", tol: float) -> bool:
        return dist(self.start, other.start) <= tol and abs(self.length - other.length) <= tol


def arc_between(a: float, b: float) -> Arc:
    """The positively oriented arc from ``a`` to ``b`` (any length below 1)."""
    return Arc(wrap(a), forward_gap(a, b))


def arc_contains(arc: Arc, x, tol: float = 0.0):
    """Closed-arc membership; elementwise for arrays of points."""
    g = forward_gap(arc.start, x)
    inside = g <= arc.length + tol
    if tol > 0.0:
        # points just before the start wrap to gaps near 1
        inside = inside | (g >= 1.0 - tol)
    return inside


def arc_inside(inner_start, inner_length, outer: Arc):
    """Whether arcs ``[s, s + L]`` lie inside ``outer``; vectorized over ``s``/``L``."""
    g = forward_gap(outer.start, inner_start)
    return g + np.asarray(inner_length) <= outer.length


def arcs_disjoint(s1, l1, s2, l2) -> bool:
    """Whether two closed arcs (given by start and length) do not meet."""
    g = forward_gap(s1, s2)
    # arc 2 starts after arc 1 ends and ends before arc 1 starts again
    return l1 < g and g + l2 < 1.0
