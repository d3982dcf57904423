"""Markov operator on particle measures, its dual on grid functions, and W1.

``P mu = sum_i p_i mu o g_i^{-1}`` acts on atomic measures; ``P* f(x) =
sum_i p_i f(g_i(x))`` acts on functions sampled on a uniform circular grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from ._accel import kernels
from .circle_geom import wrap
from .homeo import Homeo, Order, _check_word
from .ifs_core import IFSystem, RandomWordStream, sample_word

MAX_EXACT_ATOMS = 10_000_000
DEFAULT_GRID = 4096
MASS_TOL = 1e-9


class CapacityError(RuntimeError):
    """An exact computation would exceed the atom budget."""


class ParticleMeasure:
    """Weighted atoms on the circle, stored sorted by position.

    Weights are positive and sum to one within ``1e-9``.
    """

    __slots__ = ("positions", "weights")

    def __init__(self, positions, weights=None, *, presorted: bool = False):
        pos = wrap(np.atleast_1d(np.asarray(positions, dtype=np.float64)))
        if weights is None:
            w = np.full(pos.shape, 1.0 / pos.size)
        else:
            w = np.atleast_1d(np.asarray(weights, dtype=np.float64))
        if pos.ndim != 1 or pos.shape != w.shape or pos.size == 0:
            raise ValueError("positions and weights must be matching nonempty 1-D arrays")
        if not presorted:
            order = np.argsort(pos, kind="stable")
            pos, w = pos[order], w[order]
            if np.any(w <= 0):
                raise ValueError("atom weights must be positive")
            if abs(w.sum() - 1.0) > MASS_TOL:
                raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        self.positions = pos
        self.weights = w

    @classmethod
    def dirac(cls, x: float) -> "ParticleMeasure":
        return cls([x], [1.0])

    @classmethod
    def uniform(cls, n: int) -> "ParticleMeasure":
        """``n`` equal atoms at the cell midpoints ``(j + 1/2) / n``; within ``1/(4n)`` of Lebesgue in W1."""
        return cls((np.arange(n) + 0.5) / n, presorted=True)

    def __len__(self):
        return self.positions.size

    def __repr__(self):
        return f"ParticleMeasure({len(self)} atoms)"

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def integrate(self, f) -> float:
        """``int f dmu`` for a vectorized callable or :class:`GridFunction`."""
        return float(np.dot(self.weights, f(self.positions)))

    def pushforward(self, h: Homeo) -> "ParticleMeasure":
        return ParticleMeasure(h(self.positions), self.weights)

    def rotate(self, r: float) -> "ParticleMeasure":
        return ParticleMeasure(self.positions + r, self.weights)

    def merged(self, tol: float = 0.0) -> "ParticleMeasure":
        """Combine atoms closer than ``tol`` (consecutive in sorted order)."""
        pos, w = self.positions, self.weights
        gaps = np.diff(pos)
        starts = np.concatenate([[0], np.flatnonzero(gaps > tol) + 1])
        return ParticleMeasure(pos[starts], np.add.reduceat(w, starts), presorted=True)


class GridFunction:
    """A continuous function sampled at ``j / N`` with circular linear interpolation."""

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a grid function needs at least two samples")
        self.values = v

    @classmethod
    def from_callable(cls, f: Callable, n: int = DEFAULT_GRID) -> "GridFunction":
        return cls(f(np.arange(n) / n))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __call__(self, x):
        return _interp_circular(self.values, x)


def _interp_circular(values: np.ndarray, x):
    n = values.size
    s = wrap(x) * n
    i = np.floor(s).astype(np.int64)
    t = s - i
    i %= n
    v0 = values[i]
    # v0 + t * (v1 - v0) reproduces constants exactly
    return v0 + t * (values[(i + 1) % n] - v0)


def interpolation_bound(f2_max: float, n: int) -> float:
    """Linear-interpolation error bound ``h^2 / 8 * max|f''|`` for grid spacing ``h = 1/n``."""
    return f2_max / (8.0 * n * n)


FunctionLike = Union[Callable, GridFunction]


# --------------------------------------------------------------------------
# Markov operator


@dataclass(frozen=True)
class Resample:
    """Resampling policy: after branching, keep ``n`` equal atoms drawn systematically."""

    n: int
    stream: RandomWordStream


EXACT = "exact"


def _branch(mu: ParticleMeasure, sys: IFSystem):
    return kernels.branch_sorted(sys.kinds, sys.params, sys.probs, mu.positions, mu.weights)


def systematic_resample(positions: np.ndarray, weights: np.ndarray, n: int, stream: RandomWordStream) -> ParticleMeasure:
    """Low-variance resampling of position-sorted atoms; one uniform draw per call.

    The comb ``(u + j) / n`` runs through the cumulative weights, so the
    result's distribution function stays within ``1/n`` of the input's.
    """
    cumw = np.cumsum(weights)
    idx = kernels.systematic_indices(cumw, float(stream.uniform()), int(n))
    return ParticleMeasure(positions[idx], np.full(n, 1.0 / n), presorted=True)


def markov_step(mu: ParticleMeasure, sys: IFSystem, policy: Union[str, Resample] = EXACT) -> ParticleMeasure:
    """One application of ``P``.

    ``"exact"``: every atom ``(x, w)`` becomes ``k`` atoms ``(g_i(x), p_i w)``.
    :class:`Resample`: the exact step followed by systematic resampling.
    """
    if policy == EXACT:
        if len(mu) * sys.k > MAX_EXACT_ATOMS:
            raise CapacityError(
                f"exact step would create {len(mu) * sys.k} atoms (> {MAX_EXACT_ATOMS}); use a Resample policy"
            )
        pos, w = _branch(mu, sys)
        # coincident images (e.g. commuting rotations) become one atom
        return ParticleMeasure(pos, w, presorted=True).merged(0.0)
    if isinstance(policy, Resample):
        pos, w = _branch(mu, sys)
        return systematic_resample(pos, w, policy.n, policy.stream)
    raise ValueError(f"unknown policy {policy!r}")


def iterate_markov(mu: ParticleMeasure, sys: IFSystem, n: int, n_particles: int, stream: RandomWordStream,
                   checkpoints: Sequence[int] = (), callback=None) -> ParticleMeasure:
    """``n`` resampled Markov steps; ``callback(step, measure)`` fires at each checkpoint."""
    policy = Resample(n_particles, stream)
    marks = set(int(c) for c in checkpoints)
    if callback is not None and 0 in marks:
        callback(0, mu)
    for step in range(1, n + 1):
        mu = markov_step(mu, sys, policy)
        if callback is not None and step in marks:
            callback(step, mu)
    return mu


# --------------------------------------------------------------------------
# Dual operator


class GridDualOperator:
    """``P*`` restricted to a grid of size ``n``, with the interpolation stencils precomputed."""

    def __init__(self, sys: IFSystem, n: int = DEFAULT_GRID):
        self.sys = sys
        self.n = n
        nodes = np.arange(n) / n
        idx, frac = [], []
        for g in sys.generators:
            s = g(nodes) * n
            i = np.floor(s).astype(np.int64)
            frac.append(s - i)
            idx.append(i % n)
        self.idx = np.array(idx)
        self.frac = np.array(frac)

    def _images(self, v: np.ndarray) -> np.ndarray:
        v0 = v[self.idx]
        return v0 + self.frac * (v[(self.idx + 1) % self.n] - v0)

    def apply(self, f: GridFunction) -> GridFunction:
        if f.n != self.n:
            raise ValueError(f"grid size {f.n} does not match operator size {self.n}")
        vals = self._images(f.values)
        p = self.sys.probs
        # last generator as reference: constants map to themselves exactly
        out = vals[-1] + np.tensordot(p[:-1], vals[:-1] - vals[-1], axes=1) if len(p) > 1 else vals[0].copy()
        return GridFunction(out)

    def power(self, f: GridFunction, n: int) -> GridFunction:
        for _ in range(n):
            f = self.apply(f)
        return f


def dual_step_grid(f: GridFunction, sys: IFSystem) -> GridFunction:
    """``P* f`` evaluated at the grid nodes."""
    return GridDualOperator(sys, f.n).apply(f)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float


def dual_mc(sys: IFSystem, f: FunctionLike, x: float, n: int, samples: int, stream: RandomWordStream) -> MCEstimate:
    """Monte Carlo ``P*^n f(x) = E f(g_{i_n} o ... o g_{i_1}(x))`` over ``samples`` random words."""
    if n < 0 or samples < 1:
        raise ValueError("n must be >= 0 and samples >= 1")
    pos = np.full(samples, wrap(float(x)))
    for _ in range(n):
        idx = sample_word(sys, stream, samples) - 1
        pos = kernels.apply_indexed(sys.kinds, sys.params, idx, pos)
    vals = np.asarray(f(pos), dtype=np.float64)
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MCEstimate(float(vals.mean()), stderr)


# --------------------------------------------------------------------------
# Wasserstein distance


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(weights[order])
    k = int(np.searchsorted(cw, 0.5 * cw[-1]))
    return float(values[order][min(k, len(cw) - 1)])


def _cdf_at(mu: ParticleMeasure, x: np.ndarray) -> np.ndarray:
    cw = np.concatenate([[0.0], np.cumsum(mu.weights)])
    return cw[np.searchsorted(mu.positions, x, side="right")]


def wasserstein_circle(mu: ParticleMeasure, nu: ParticleMeasure) -> float:
    """Exact W1 on the circle between two atomic measures.

    Uses ``W1 = min_t int_0^1 |F_mu - F_nu - t| dx``; the minimizing ``t`` is a
    median of ``F_mu - F_nu`` under Lebesgue measure.
    """
    pts = np.unique(np.concatenate([mu.positions, nu.positions]))
    # each distribution function is accumulated separately, so equal measures give D == 0 exactly
    d = _cdf_at(mu, pts) - _cdf_at(nu, pts)
    lengths = np.diff(np.append(pts, 1.0))
    # the interval [0, first atom) carries D = 0
    d = np.append(d, 0.0)
    lengths = np.append(lengths, pts[0])
    t = _weighted_median(d, lengths)
    return float(np.dot(lengths, np.abs(d - t)))


def wasserstein_to_lebesgue(mu: ParticleMeasure) -> float:
    """Exact W1 between an atomic measure and Lebesgue measure on the circle.

    ``D(x) = F_mu(x) - x`` is linear with slope -1 between atoms; the optimal
    shift is the median of ``D(X)`` for uniform ``X``, found by bisection on
    the piecewise-linear distribution function of ``D(X)``.
    """
    pts = mu.positions
    c = np.concatenate([[0.0], np.cumsum(mu.weights)])
    a = np.concatenate([[0.0], pts])
    b = np.concatenate([pts, [1.0]])
    # on [a_i, b_i): D = c_i - x takes values in (c_i - b_i, c_i - a_i]
    lo, hi = c - b, c - a
    seg = b - a

    def cdf(t):
        return float(np.sum(np.clip(t - lo, 0.0, seg)))

    tl, th = float(lo.min()), float(hi.max())
    for _ in range(200):
        tm = 0.5 * (tl + th)
        if tm in (tl, th):
            break
        if cdf(tm) < 0.5:
            tl = tm
        else:
            th = tm
    t = 0.5 * (tl + th)
    # int over a segment of |u - t| du for u uniform on [lo, hi], times its length
    u1 = lo - t
    u2 = hi - t
    integral = 0.5 * (np.sign(u2) * u2**2 - np.sign(u1) * u1**2)
    return float(np.sum(integral))


# --------------------------------------------------------------------------
# Invariant measure, stability, omega-limits


@dataclass
class InvariantEstimate:
    measure: ParticleMeasure
    convergence_w1: float
    n_steps: int
    n_particles: int


def invariant_measure_estimate(sys: IFSystem, n_steps: int, n_particles: int, stream: RandomWordStream) -> InvariantEstimate:
    """Push the uniform ``n_particles`` measure through ``n_steps`` resampled steps.

    ``convergence_w1`` is W1 between the measures after ``n_steps // 2`` and
    ``n_steps`` steps.
    """
    if n_steps < 1 or n_particles < 1:
        raise ValueError("n_steps and n_particles must be >= 1")
    half = {}

    def keep(step, m):
        half["mu"] = m

    mu = iterate_markov(ParticleMeasure.uniform(n_particles), sys, n_steps, n_particles, stream,
                        checkpoints=[n_steps // 2], callback=keep)
    return InvariantEstimate(mu, wasserstein_circle(mu, half["mu"]), n_steps, n_particles)


def checkpoint_steps(n: int) -> list[int]:
    """Powers of two up to ``n``, plus ``n`` itself."""
    out = [0]
    p = 1
    while p <= n:
        out.append(p)
        p *= 2
    if out[-1] != n:
        out.append(n)
    return out


@dataclass
class StabilityReport:
    checkpoints: list[int]
    rows: list[tuple[int, int, int, float]] = field(default_factory=list)
    final_measures: list[ParticleMeasure] = field(default_factory=list, repr=False)

    @property
    def final_max_w1(self) -> float:
        last = self.checkpoints[-1]
        vals = [w for step, _, _, w in self.rows if step == last]
        return max(vals) if vals else 0.0

    def trajectory(self, i: int, j: int) -> list[tuple[int, float]]:
        return [(s, w) for s, a, b, w in self.rows if (a, b) == (i, j)]


def stability_test(sys: IFSystem, inits: Sequence[ParticleMeasure], n: int, n_particles: int,
                   stream: RandomWordStream, threads: int = 1) -> StabilityReport:
    """Iterate every initial measure and record pairwise W1 at the checkpoints.

    All initial measures share the resampling randomness (common random
    numbers): each run gets a fresh copy of ``stream``. Identical initial
    measures therefore stay identical.
    """
    if len(inits) < 2:
        raise ValueError("stability_test needs at least two initial measures")
    marks = checkpoint_steps(n)

    def run(mu0):
        snaps = {}
        local = RandomWordStream(stream.seed, stream.stream_id)
        iterate_markov(mu0, sys, n, n_particles, local, checkpoints=marks,
                       callback=lambda s, m: snaps.__setitem__(s, m))
        return snaps

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            snaps = list(pool.map(run, inits))
    else:
        snaps = [run(m) for m in inits]

    report = StabilityReport(marks)
    for step in marks:
        for i in range(len(inits)):
            for j in range(i + 1, len(inits)):
                report.rows.append((step, i, j, wasserstein_circle(snaps[i][step], snaps[j][step])))
    report.final_measures = [s[marks[-1]] for s in snaps]
    return report


def omega_measure(sys: IFSystem, word, mu0: ParticleMeasure) -> ParticleMeasure:
    """Pushforward of ``mu0`` by the backward composition ``g_{w1} o ... o g_{wn}``."""
    w0 = _check_word(word, sys.k)
    if w0.size == 0:
        raise ValueError("word must be nonempty")
    pos = kernels.backward(sys.kinds, sys.params, np.ascontiguousarray(w0), mu0.positions)
    return ParticleMeasure(pos, mu0.weights)


__all__ = [
    "CapacityError",
    "EXACT",
    "GridDualOperator",
    "GridFunction",
    "InvariantEstimate",
    "MCEstimate",
    "Order",
    "ParticleMeasure",
    "Resample",
    "StabilityReport",
    "checkpoint_steps",
    "dual_mc",
    "dual_step_grid",
    "interpolation_bound",
    "invariant_measure_estimate",
    "iterate_markov",
    "markov_step",
    "omega_measure",
    "stability_test",
    "systematic_resample",
    "wasserstein_circle",
    "wasserstein_to_lebesgue",
]
