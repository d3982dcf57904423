"""Statistical experiments: Birkhoff averages and the e-property modulus."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._accel import kernels
from .homeo import _kronecker_probes
from .ifs_core import IFSystem, RandomWordStream, forward_orbit, sample_word
from .transfer_ops import DEFAULT_GRID, GridDualOperator, GridFunction

TWO_PI = 2.0 * math.pi
N_BATCHES = 32

TEST_FUNCTIONS: dict[str, Callable] = {
    "one": lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
    "cos": lambda x: np.cos(TWO_PI * np.asarray(x)),
    "sin": lambda x: np.sin(TWO_PI * np.asarray(x)),
    "cos2": lambda x: np.cos(2 * TWO_PI * np.asarray(x)),
    "tent": lambda x: 1.0 - 2.0 * np.abs(np.asarray(x) - 0.5),
}


def test_function(name: str) -> Callable:
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; known: {sorted(TEST_FUNCTIONS)}") from None


@dataclass(frozen=True)
class BirkhoffResult:
    average: float
    batch_means_sigma: float
    n: int


def birkhoff_average(sys: IFSystem, x: float, phi, n: int, stream: RandomWordStream) -> BirkhoffResult:
    """``(1/n) sum_{m=1..n} phi(x_m)`` along one random forward trajectory from ``x``.

    ``batch_means_sigma`` is the standard error from 32 equal batches.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    word = sample_word(sys, stream, n)
    vals = np.asarray(phi(forward_orbit(sys, x, word)[1:]), dtype=np.float64)
    # centring on the first value makes constant phi exact
    c = vals[0]
    dev = vals - c
    avg = float(c + dev.mean())
    nb = min(N_BATCHES, n)
    if nb < 2:
        return BirkhoffResult(avg, 0.0, n)
    m = n // nb
    means = dev[: m * nb].reshape(nb, m).mean(axis=1)
    return BirkhoffResult(avg, float(means.std(ddof=1) / math.sqrt(nb)), n)


def modulus_of_continuity(f: Callable, delta: float, n: int = 1 << 16) -> float:
    """``sup_{|x - y| <= delta} |f(x) - f(y)|`` estimated on a fine grid (shifts up to ``delta``)."""
    x = np.arange(n) / n
    fx = f(x)
    shifts = np.linspace(0.0, delta, 65)[1:]
    return float(max(np.max(np.abs(f(x + s) - fx)) for s in shifts))


@dataclass
class EPropertyTable:
    deltas: list[float]
    moduli: list[float]
    f_spec: str
    N_horizon: int
    stderr: list[float]
    method: str
    base_points: int
    notes: str = "sup over n truncated at N_horizon; max over sampled base points"
    argmax_n: list[int] = field(default_factory=list)

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly decreasing")
        if any(m < 0 for m in self.moduli):
            raise ValueError("moduli must be nonnegative")

    def to_dict(self):
        return {
            "deltas": self.deltas,
            "moduli": self.moduli,
            "stderr": self.stderr,
            "f_spec": self.f_spec,
            "N_horizon": self.N_horizon,
            "method": self.method,
            "base_points": self.base_points,
            "notes": self.notes,
        }

    def monotone_within(self, k: float = 2.0) -> bool:
        """``E`` nonincreasing as ``delta`` decreases, up to ``k`` standard errors."""
        return all(
            b <= a + k * (sa + sb)
            for a, b, sa, sb in zip(self.moduli, self.moduli[1:], self.stderr, self.stderr[1:])
        )


def _eval_points(base: np.ndarray, deltas: Sequence[float]) -> np.ndarray:
    # column 0: base points; then +delta and -delta for each delta
    cols = [base]
    for d in deltas:
        cols.append(base + d)
        cols.append(base - d)
    return np.mod(np.stack(cols, axis=1), 1.0)


def _moduli_from_values(vals: np.ndarray, nd: int):
    # vals: (horizon + 1, base, 1 + 2 nd) -> per-delta max over n, base, sign
    diffs = np.abs(vals[:, :, 1:] - vals[:, :, :1]).reshape(vals.shape[0], vals.shape[1], nd, 2)
    per_n = diffs.max(axis=(1, 3))
    return per_n.max(axis=0), per_n.argmax(axis=0)


def eproperty_modulus(sys: IFSystem, f: GridFunction, deltas: Sequence[float], N_horizon: int,
                      base_points: int = 16, method: str = "grid", samples: int = 1000,
                      stream: RandomWordStream | None = None, f_spec: str = "") -> EPropertyTable:
    """``E(delta) = max_{x, y = x +- delta} max_{n <= N_horizon} |P*^n f(y) - P*^n f(x)|``.

    ``method="grid"`` iterates the grid dual operator; ``method="mc"`` uses
    Monte Carlo with the same random words for ``x`` and ``y``.
    """
    deltas = [float(d) for d in deltas]
    if any(not 0.0 < d < 0.5 for d in deltas):
        raise ValueError("deltas must lie in (0, 1/2)")
    if N_horizon < 1:
        raise ValueError("N_horizon must be >= 1")
    base, _ = _kronecker_probes(base_points)
    pts = _eval_points(base, deltas)
    nd = len(deltas)

    if method == "grid":
        op = GridDualOperator(sys, f.n)
        vals = np.empty((N_horizon + 1,) + pts.shape)
        g = f
        for n in range(N_horizon + 1):
            vals[n] = g(pts)
            if n < N_horizon:
                g = op.apply(g)
        moduli, arg = _moduli_from_values(vals, nd)
        stderr = np.zeros(nd)
    elif method == "mc":
        if stream is None:
            raise ValueError("method 'mc' needs a stream")
        mdiff, sdiff = coupled_dual_mc(sys, f, pts, N_horizon, samples, stream)
        d = np.abs(mdiff[:, :, 1:]).reshape(N_horizon + 1, base_points, nd, 2)
        se = sdiff[:, :, 1:].reshape(N_horizon + 1, base_points, nd, 2)
        flat = d.transpose(2, 0, 1, 3).reshape(nd, -1)
        idx = flat.argmax(axis=1)
        moduli = flat[np.arange(nd), idx]
        stderr = se.transpose(2, 0, 1, 3).reshape(nd, -1)[np.arange(nd), idx]
        arg = idx // (base_points * 2)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EPropertyTable(deltas, [float(m) for m in moduli], f_spec, int(N_horizon),
                          [float(s) for s in stderr], method, base_points, argmax_n=[int(a) for a in arg])


def coupled_dual_mc(sys: IFSystem, f, points: np.ndarray, n: int, samples: int, stream: RandomWordStream):
    """Paired Monte Carlo differences ``P*^m f(p_bc) - P*^m f(p_b0)`` for ``m = 0..n``.

    ``points`` has shape ``(B, C)``; every point is driven by the same random
    word in each sample (common random numbers), so differences have small
    variance. Returns ``(mean, stderr)`` arrays of shape ``(n + 1, B, C)``.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must have shape (B, C)")
    B, C = pts.shape
    pos = np.tile(pts.ravel(), samples)
    means = np.empty((n + 1, B, C))
    ses = np.empty((n + 1, B, C))

    def record(m):
        v = np.asarray(f(pos), dtype=np.float64).reshape(samples, B, C)
        d = v - v[:, :, :1]
        means[m] = d.mean(axis=0)
        ses[m] = d.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else 0.0

    record(0)
    for m in range(1, n + 1):
        letters = sample_word(sys, stream, samples) - 1
        pos = kernels.apply_indexed(sys.kinds, sys.params, np.repeat(letters, B * C), pos)
        record(m)
    return means, ses
