"""Orientation-preserving circle homeomorphisms given by degree-one lifts.

Four concrete families are supported:

``Rotation(angle)``
    ``F(t) = t + angle``.
``SinePerturbed(a, b)``
    ``F(t) = t + a + b / (2 pi) * sin(2 pi t)`` with ``|b| < 1``.
``PiecewiseLinear(knots)``
    linear interpolation of knots ``(t_j, F(t_j))`` with ``t_0 = 0``,
    ``t_last = 1`` and ``F(1) = F(0) + 1``.
``SineInverse(a, b)``
    the functional inverse of ``SinePerturbed(a, b)``, evaluated by bisection.

Every family is encoded for the kernels as an integer ``kind`` and a float
parameter row (see :mod:`circleifs._kernels_numpy`).

Words are sequences of 1-based generator indices. ``forward`` order applies
the first letter first; ``backward`` applies the last letter first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._accel import kernels
from .circle_geom import Arc, wrap

ROTATION, SINE, PL, SINE_INVERSE = 0, 1, 2, 3
DEFAULT_INVERSE_TOL = 1e-12


class Order(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class Homeo:
    """Base class; subclasses provide ``kind``, ``row()`` and ``inverse()``."""

    kind: int

    def row(self) -> np.ndarray:
        raise NotImplementedError

    def lift(self, t):
        """Evaluate the lift at real ``t`` (scalar or array)."""
        arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = kernels.lift(self.kind, self.row(), arr)
        return float(out[0]) if np.ndim(t) == 0 else out

    def lift_inverse(self, y, tol: float = DEFAULT_INVERSE_TOL):
        arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
        out = kernels.lift_inverse(self.kind, self.row(), arr, tol)
        return float(out[0]) if np.ndim(y) == 0 else out

    def __call__(self, x):
        return apply(self, x)

    def inverse(self) -> "Homeo":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Rotation(Homeo):
    angle: float
    kind = ROTATION

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap(self.angle))

    def row(self):
        return np.array([self.angle])

    def inverse(self):
        return Rotation(wrap(-self.angle))

    def to_dict(self):
        return {"type": "rotation", "angle": self.angle}


@dataclass(frozen=True)
class SinePerturbed(Homeo):
    a: float
    b: float
    kind = SINE

    def __post_init__(self):
        if not abs(self.b) < 1.0:
            raise ValueError(f"SinePerturbed needs |b| < 1 to be a homeomorphism, got b={self.b}")

    def row(self):
        return np.array([self.a, self.b])

    def inverse(self):
        return SineInverse(self.a, self.b)

    def to_dict(self):
        return {"type": "sine", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class SineInverse(Homeo):
    a: float
    b: float
    kind = SINE_INVERSE

    def __post_init__(self):
        if not abs(self.b) < 1.0:
            raise ValueError(f"|b| < 1 required, got b={self.b}")

    def row(self):
        return np.array([self.a, self.b])

    def inverse(self):
        return SinePerturbed(self.a, self.b)

    def to_dict(self):
        return {"type": "sine_inverse", "a": self.a, "b": self.b}


class PiecewiseLinear(Homeo):
    kind = PL

    def __init__(self, knots: Sequence[Sequence[float]]):
        k = np.asarray(knots, dtype=np.float64)
        if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
            raise ValueError("knots must be a list of at least two (t, F(t)) pairs")
        t, f = k[:, 0].copy(), k[:, 1].copy()
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError("knot abscissae must start at 0 and end at 1")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if np.any(np.diff(f) <= 0):
            raise ValueError("knot ordinates must be strictly increasing")
        if abs(f[-1] - f[0] - 1.0) > 1e-12:
            raise ValueError("degree one requires F(1) = F(0) + 1")
        f[-1] = f[0] + 1.0
        t.flags.writeable = False
        f.flags.writeable = False
        self.knots_t = t
        self.knots_f = f
        self._row = np.concatenate([[len(t)], t, f])

    @classmethod
    def identity(cls) -> "PiecewiseLinear":
        return cls([(0.0, 0.0), (1.0, 1.0)])

    def row(self):
        return self._row

    def __eq__(self, other):
        return (
            isinstance(other, PiecewiseLinear)
            and np.array_equal(self.knots_t, other.knots_t)
            and np.array_equal(self.knots_f, other.knots_f)
        )

    def __hash__(self):
        return hash((self.knots_t.tobytes(), self.knots_f.tobytes()))

    def __repr__(self):
        return f"PiecewiseLinear({len(self.knots_t)} knots)"

    def inverse(self):
        # G = F^{-1} is piecewise linear with breakpoints at F(t_j) mod 1
        y = wrap(self.knots_f[:-1])
        y = np.unique(np.concatenate([[0.0], y[y > 0.0]]))
        g = self.lift_inverse(y)
        knots = [(float(a), float(b)) for a, b in zip(y, g)] + [(1.0, float(g[0]) + 1.0)]
        return PiecewiseLinear(knots)

    def to_dict(self):
        return {"type": "pl", "knots": [[float(a), float(b)] for a, b in zip(self.knots_t, self.knots_f)]}


def from_dict(d: dict) -> Homeo:
    """Build a homeomorphism from its tagged record."""
    kind = d.get("type")
    if kind == "rotation":
        return Rotation(float(d["angle"]))
    if kind == "sine":
        return SinePerturbed(float(d.get("a", 0.0)), float(d["b"]))
    if kind == "sine_inverse":
        return SineInverse(float(d.get("a", 0.0)), float(d["b"]))
    if kind == "pl":
        return PiecewiseLinear(d["knots"])
    raise ValueError(f"unknown homeomorphism type {kind!r}")


def pack(maps: Sequence[Homeo]) -> tuple[np.ndarray, np.ndarray]:
    """Kernel encoding of a generator list: ``(kinds, params)``."""
    rows = [h.row() for h in maps]
    width = max((len(r) for r in rows), default=1)
    params = np.zeros((len(rows), width))
    for i, r in enumerate(rows):
        params[i, : len(r)] = r
    return np.array([h.kind for h in maps], dtype=np.int64), params


def apply(h: Homeo, x):
    """``F(x) mod 1``; vectorized over arrays."""
    return wrap(h.lift(x))


def apply_inverse(h: Homeo, y, tol: float = DEFAULT_INVERSE_TOL):
    """Preimage of ``y``: closed form for rotations and piecewise-linear maps,
    bisection on the lift for the sine family."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return wrap(h.lift_inverse(y, tol))


def image_arc(h: Homeo, arc: Arc) -> Arc:
    """Image of a closed arc; endpoints go to endpoints since ``h`` preserves orientation."""
    if arc.length >= 1.0:
        raise ValueError("image of the full circle is the full circle; special-case it")
    fs = h.lift(arc.start)
    fe = h.lift(arc.start + arc.length)
    return Arc(wrap(fs), min(max(fe - fs, 0.0), 1.0))


def _check_word(word, k):
    w = np.asarray(word, dtype=np.int64)
    if w.ndim != 1:
        raise ValueError("word must be one-dimensional")
    if w.size and (w.min() < 1 or w.max() > k):
        raise ValueError(f"word letters must lie in [1, {k}]")
    return w - 1


def compose_apply(maps: Sequence[Homeo], word, x, order: Order | str = Order.FORWARD):
    """Evaluate a word of maps at ``x`` (scalar or array).

    ``forward`` gives ``g_{i_n} o ... o g_{i_1}(x)``; ``backward`` gives
    ``g_{i_1} o ... o g_{i_n}(x)``.
    """
    order = Order(order)
    w0 = _check_word(word, len(maps))
    if w0.size == 0:
        raise ValueError("word must be nonempty")
    kinds, params = pack(maps)
    # the kernel applies the last letter first
    if order is Order.FORWARD:
        w0 = w0[::-1]
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = kernels.backward(kinds, params, np.ascontiguousarray(w0), xs)
    return float(out[0]) if np.ndim(x) == 0 else out


def word_image_arc(maps: Sequence[Homeo], word, arc: Arc) -> Arc:
    """Image of ``arc`` under the forward composition, one :func:`image_arc` at a time."""
    w0 = _check_word(word, len(maps))
    for g in w0:
        arc = image_arc(maps[g], arc)
    return arc


def rotation_number(h: Homeo, n_iter: int, x0: float = 0.0) -> float:
    """``(F^n(x0) - x0) / n``; within ``1/n`` of the true rotation number."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    winding, frac = kernels.iterate_lift(h.kind, h.row(), float(wrap(x0)), int(n_iter))
    return (winding + (frac - wrap(x0))) / n_iter


def _kronecker_probes(n: int) -> tuple[np.ndarray, np.ndarray]:
    # additive recurrence with the plastic-number constants: low discrepancy in 2-D
    g = 1.32471795724474602596
    i = np.arange(1, n + 1)
    starts = wrap(i / g)
    lengths = wrap(0.5 + i / (g * g))
    lengths = np.clip(lengths, 1e-3, 1.0 - 1e-3)
    return starts, lengths


def is_isometry(h: Homeo, n_probes: int = 100, tol: float = 1e-9) -> bool:
    """Whether ``h`` preserves the length of every probed arc to within ``tol``."""
    if n_probes < 2:
        raise ValueError("n_probes must be >= 2")
    starts, lengths = _kronecker_probes(n_probes)
    fs = h.lift(starts)
    fe = h.lift(starts + lengths)
    return bool(np.all(np.abs((fe - fs) - lengths) <= tol))


def lift_is_valid(h: Homeo, n: int = 1000) -> bool:
    """Sampled check of strict monotonicity and degree one."""
    t = np.linspace(0.0, 1.0, n + 1)
    f = h.lift(t)
    return bool(np.all(np.diff(f) > 0) and np.all(np.abs(h.lift(t + 1.0) - f - 1.0) <= 1e-12))


def half_periodic_pl(knots_half: Sequence[Sequence[float]]) -> PiecewiseLinear:
    """Piecewise-linear lift with ``F(t + 1/2) = F(t) + 1/2`` built from knots on ``[0, 1/2]``.

    Such a map commutes with the rotation by one half.
    """
    k = np.asarray(knots_half, dtype=np.float64)
    if k[0, 0] != 0.0 or k[-1, 0] != 0.5 or abs(k[-1, 1] - k[0, 1] - 0.5) > 1e-15:
        raise ValueError("half-period knots must span [0, 1/2] with F(1/2) = F(0) + 1/2")
    second = k[1:] + 0.5
    return PiecewiseLinear(np.vstack([k, second]))


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
