"""Constructive structure of a system: dichotomy, contractible radius, symmetry, omega-limits.

All negative outcomes mean "not found within budget"; nothing here certifies
the absence of contraction.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .circle_geom import Arc, dist, forward_gap, ordered_chain, wrap
from .homeo import _kronecker_probes, is_isometry, word_image_arc
from .ifs_core import IFSystem, RandomWordStream, designated_rotation, sample_word
from .transfer_ops import ParticleMeasure, omega_measure

PROBE_LENGTHS = (0.4, 0.3, 0.2, 0.15, 0.1, 0.05, 0.02, 0.01)
PROBE_SUBARCS = 16
ROUND_CAP = 10_000
POWER_CAP = 64
PLACEMENTS = 8
RADIUS_TARGET = 1e-2


class Kind(enum.Enum):
    EQUICONTINUOUS = "equicontinuous"
    CONTRACTIVE = "contractive"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ContractionWitness:
    J: Arc
    word: np.ndarray
    final_length: float
    alpha: float
    round_ratios: list[float]
    reached: bool

    @property
    def ratio(self) -> float:
        return self.final_length / self.J.length

    def to_dict(self):
        return {
            "J": {"start": self.J.start, "length": self.J.length},
            "word": [int(c) for c in self.word],
            "final_length": self.final_length,
            "alpha": self.alpha,
            "round_ratios": self.round_ratios,
            "reached": self.reached,
        }


@dataclass
class Classification:
    kind: Kind
    isometry: list[bool]
    witness: ContractionWitness | None = None
    message: str = ""

    def __post_init__(self):
        if self.kind is Kind.CONTRACTIVE:
            assert self.witness is not None and self.witness.final_length < self.witness.J.length

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "isometry": self.isometry,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "message": self.message,
        }


@dataclass(frozen=True)
class Probe:
    generator: int
    I: Arc
    alpha: float


def _subarc_ratio(h, arc: Arc, m: int = PROBE_SUBARCS) -> float:
    edges = arc.start + arc.length * np.arange(m + 1) / m
    f = h.lift(edges)
    return float(np.max(np.diff(f) / np.diff(edges)))


def probe_contraction(sys: IFSystem, probe_arcs: int = 64, skip=()) -> Probe | None:
    """Find a generator ``g`` and arc ``I`` on which every probed subarc shrinks by ``alpha < 1``.

    Scores candidates by ``|I| * (1 - alpha)`` so that the arc is both large
    enough to host placements and strongly contracted.
    """
    best, best_score = None, 0.0
    starts = np.arange(probe_arcs) / probe_arcs
    for gi, h in enumerate(sys.generators):
        if gi in skip or is_isometry(h, 100, 1e-12):
            continue
        for ell in PROBE_LENGTHS:
            for s in starts:
                arc = Arc(float(s), ell)
                a = _subarc_ratio(h, arc)
                score = ell * (1.0 - a)
                if a < 1.0 and score > best_score:
                    best, best_score = Probe(gi, arc, a), score
    return best


def _push(kind, row, s, e, j):
    # apply a lift j times to arcs (s, e) with a common integer shift
    for _ in range(j):
        fs = kernels.lift(kind, row, s)
        fe = kernels.lift(kind, row, e)
        k = np.floor(fs)
        s, e = fs - k, fe - k
    return s, e


def contraction_word_search(sys: IFSystem, J: Arc, target_ratio: float, budget: int, *,
                            g1: int | None = None, probe: Probe | None = None,
                            round_cap: int = ROUND_CAP, power_cap: int = POWER_CAP) -> ContractionWitness:
    """Build a word ``w`` with ``|w(J)| <= target_ratio * |J|``, or the best found within ``budget`` letters.

    Each round moves the current arc by a power of the rotation-like
    generator ``g1`` and then applies the contracting generator ``g``. A round
    first tries placements inside the probe arc ``I`` (choosing the best of
    the first few), then falls back to ``g1^n g^j`` with ``j > 1`` for arcs too
    long to fit. Every accepted round shrinks the arc by at most ``alpha``.
    """
    if not 0.0 < target_ratio < 1.0:
        raise ValueError("target_ratio must lie in (0, 1)")
    if J.length >= 1.0:
        raise ValueError("J must be a proper arc")
    if g1 is None:
        g1 = designated_rotation(sys)
    if probe is None:
        probe = probe_contraction(sys, skip=() if g1 is None else (g1,))
    if g1 is None or probe is None:
        return ContractionWitness(J, np.zeros(0, dtype=np.int64), J.length, 1.0, [], False)

    r1 = sys.generators[g1]
    g = sys.generators[probe.generator]
    k1, row1, kg, rowg = r1.kind, r1.row(), g.kind, g.row()
    I, alpha = probe.I, probe.alpha

    s, e = J.start, J.start + J.length
    target = target_ratio * J.length
    word: list[int] = []
    ratios: list[float] = []
    while e - s > target:
        room = budget - len(word)
        ncap = min(round_cap, room - 1)
        if ncap < 0:
            break
        L = e - s
        ps, pe = kernels.arc_power_orbit(k1, row1, s, e, ncap)
        choice = None

        fits = np.flatnonzero((forward_gap(I.start, ps) + (pe - ps) <= I.length) & (forward_gap(I.start, ps) < I.length))
        if fits.size:
            cand = fits[:PLACEMENTS]
            gs, ge = _push(kg, rowg, ps[cand], pe[cand], 1)
            r = (ge - gs) / L
            b = int(np.argmin(r))
            if r[b] <= alpha:
                choice = (int(cand[b]), 1, float(gs[b]), float(ge[b]), float(r[b]))

        if choice is None:
            cs, ce = ps, pe
            for j in range(1, min(power_cap, room) + 1):
                cs, ce = _push(kg, rowg, cs, ce, 1)
                r = (ce - cs) / L
                ok = np.flatnonzero((r <= alpha) & (np.arange(r.size) + j <= room))
                if ok.size:
                    n = int(ok[0])
                    choice = (n, j, float(cs[n]), float(ce[n]), float(r[n]))
                    break
        if choice is None:
            break
        n, j, s, e, r = choice
        word.extend([g1 + 1] * n + [probe.generator + 1] * j)
        ratios.append(r)
    return ContractionWitness(J, np.asarray(word, dtype=np.int64), float(e - s), alpha, ratios, e - s <= target)


def classify(sys: IFSystem, probe_arcs: int = 64, shrink_budget: int = 10_000, tol: float = 1e-3,
             J: Arc = Arc(0.3, 0.1)) -> Classification:
    """Equicontinuous if every generator is an isometry; otherwise search for a witness word shrinking ``J`` below ``tol * |J|``."""
    iso = [is_isometry(g, 100, 1e-12) for g in sys.generators]
    if all(iso):
        return Classification(Kind.EQUICONTINUOUS, iso)
    g1 = designated_rotation(sys)
    if g1 is None:
        return Classification(Kind.INCONCLUSIVE, iso, message="no generator with a dense-orbit proxy")
    probe = probe_contraction(sys, probe_arcs, skip=(g1,))
    if probe is None:
        return Classification(Kind.INCONCLUSIVE, iso, message="no arc shrunk by a single generator")
    w = contraction_word_search(sys, J, tol, shrink_budget, g1=g1, probe=probe)
    if w.reached:
        return Classification(Kind.CONTRACTIVE, iso, w)
    return Classification(Kind.INCONCLUSIVE, iso, w, f"best ratio {w.ratio:.3g} above {tol:g} within budget")


def witness_length(sys: IFSystem, witness: ContractionWitness) -> float:
    """Re-evaluate a witness with :func:`image_arc` one letter at a time."""
    return word_image_arc(sys.generators, witness.word, witness.J).length


def contractible_radius(sys: IFSystem, x: float, resolution: float = 0.01, budget: int = 10_000,
                        *, g1: int | None = None, probe: Probe | None = None) -> float:
    """Largest ``beta`` (to ``resolution``) with ``[x, x + beta]`` shrinkable to 1% within ``budget``.

    Returns 1.0 when arcs of length ``1 - resolution`` are contractible.
    """
    if g1 is None:
        g1 = designated_rotation(sys)
    if probe is None:
        probe = probe_contraction(sys, skip=() if g1 is None else (g1,))

    def ok(beta):
        return contraction_word_search(sys, Arc(x, beta), RADIUS_TARGET, budget, g1=g1, probe=probe).reached

    if ok(1.0 - resolution):
        return 1.0
    lo, hi = 0.0, 1.0 - resolution
    while hi - lo > resolution / 2:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class SymmetryReport:
    M: int
    r: Fraction
    commutation_residual: float
    radius_samples: list[tuple[float, float]]
    success: bool
    confident: bool = True

    def __post_init__(self):
        assert self.M >= 1
        assert self.M == 1 or self.r.denominator == self.M

    def to_dict(self):
        return {
            "M": self.M,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "commutation_residual": self.commutation_residual,
            "radius_samples": [list(p) for p in self.radius_samples],
            "success": self.success,
            "confident": self.confident,
        }


def snap_rational(value: float, cap: int, tol: float) -> Fraction | None:
    """Smallest-denominator ``p/q`` (``q <= cap``) within ``tol`` of ``value``."""
    for q in range(1, cap + 1):
        p = round(value * q)
        if abs(value - p / q) <= tol:
            return Fraction(p, q)
    return None


def commutation_residual(sys: IFSystem, r: float, grid: int = 1024) -> float:
    """``max_{g, x} dist(g(x + r), g(x) + r)`` over a uniform grid."""
    x = np.arange(grid) / grid
    return float(max(np.max(dist(g(x + r), wrap(g(x) + r))) for g in sys.generators))


def detect_symmetry(sys: IFSystem, denominator_cap: int = 64, tol: float = 1e-9, samples: int = 16,
                    resolution: float = 0.01, budget: int = 10_000, grid: int = 1024) -> SymmetryReport:
    """Estimate ``r`` from the contractible radius, snap to ``p/q`` and check commutation with ``T_r``."""
    g1 = designated_rotation(sys)
    probe = probe_contraction(sys, skip=() if g1 is None else (g1,))
    xs, _ = _kronecker_probes(samples)
    radii = [(float(x), contractible_radius(sys, float(x), resolution, budget, g1=g1, probe=probe)) for x in xs]
    r_hat = float(np.median([r for _, r in radii]))
    if r_hat >= 1.0 - resolution:
        return SymmetryReport(1, Fraction(1), 0.0, radii, True)
    snapped = snap_rational(r_hat, denominator_cap, 2 * resolution)
    if snapped is None or snapped.denominator == 1:
        return SymmetryReport(1, Fraction(1), 0.0, radii, True, confident=False)
    res = commutation_residual(sys, float(snapped), grid)
    return SymmetryReport(snapped.denominator, snapped, res, radii, res <= tol)


@dataclass
class Cluster:
    center: float
    mass: float
    diameter: float


@dataclass
class OmegaAtoms:
    clusters: list[Cluster]
    M_hat: int
    gap_threshold: float
    converged: bool
    word: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "clusters": [[c.center, c.mass, c.diameter] for c in self.clusters],
            "M_hat": self.M_hat,
            "gap_threshold": self.gap_threshold,
            "converged": self.converged,
        }


MIN_GAP_THRESHOLD = 4e-3


def cluster_atoms(mu: ParticleMeasure, gap_threshold: float | None = None) -> tuple[list[Cluster], float]:
    """Single-linkage clusters on the circle: split wherever consecutive atoms are more than ``gap_threshold`` apart.

    The default threshold is ten times the median nearest-neighbour spacing,
    floored at ``4e-3`` (so a converged cluster has diameter at most ``1e-3``) so that fully collapsed clusters are not shattered.
    """
    pos, w = mu.positions, mu.weights
    gaps = np.diff(np.append(pos, pos[0] + 1.0))
    if gap_threshold is None:
        gap_threshold = max(10.0 * float(np.median(gaps)), MIN_GAP_THRESHOLD)
    cut = np.flatnonzero(gaps > gap_threshold)
    if cut.size == 0:
        # one cluster covering everything; report it anchored at the first atom
        rel = forward_gap(pos[0], pos)
        return [Cluster(float(wrap(pos[0] + np.dot(w, rel))), float(w.sum()), float(rel.max()))], gap_threshold
    # rotate so the array starts just after a cut
    start = (cut[-1] + 1) % pos.size
    order = np.roll(np.arange(pos.size), -start)
    p, ww, gg = pos[order], w[order], gaps[order]
    bounds = np.unique(np.append(np.flatnonzero(gg > gap_threshold), pos.size - 1))
    clusters, lo = [], 0
    for hi in bounds:
        seg_p, seg_w = p[lo:hi + 1], ww[lo:hi + 1]
        rel = forward_gap(seg_p[0], seg_p)
        m = float(seg_w.sum())
        clusters.append(Cluster(float(wrap(seg_p[0] + np.dot(seg_w, rel) / m)), m, float(rel.max())))
        lo = hi + 1
    return clusters, gap_threshold


def omega_atoms(sys: IFSystem, stream: RandomWordStream, n_backward: int = 300, mu0: ParticleMeasure | None = None,
                gap_threshold: float | None = None, m_cap: int = 8) -> OmegaAtoms:
    """Cluster the backward pushforward of ``mu0`` along a random word of length ``n_backward``.

    ``M_hat`` counts clusters holding at least ``1 / (2 m_cap)`` of the mass.
    """
    if mu0 is None:
        mu0 = ParticleMeasure.uniform(1000)
    word = sample_word(sys, stream, n_backward)
    clusters, thr = cluster_atoms(omega_measure(sys, word, mu0), gap_threshold)
    clusters.sort(key=lambda c: -c.mass)
    big = [c for c in clusters if c.mass >= 1.0 / (2 * m_cap)]
    converged = all(c.diameter <= thr / 4 for c in big)
    if not converged:
        warnings.warn("omega clusters not well separated; increase n_backward", RuntimeWarning, stacklevel=2)
    return OmegaAtoms(clusters, len(big), thr, converged, word)


class InterleaveError(ValueError):
    """The image points do not form an alternating ordered chain."""


@dataclass
class InterleaveResult:
    words_i: list[np.ndarray]
    words_j: list[np.ndarray]
    points: list[float]
    separation: float
    complete: bool

    def __post_init__(self):
        lengths = {len(w) for w in self.words_i + self.words_j}
        if len(lengths) > 1:
            raise InterleaveError("words must share one length")
        if len(self.points) >= 2 and not ordered_chain(self.points):
            raise InterleaveError("image points violate the alternating order")
        if self.complete and not self.separation > 0:
            raise InterleaveError("separation must be positive")

    @property
    def N(self) -> int:
        return len(self.words_i[0]) if self.words_i else 0

    def to_dict(self):
        return {
            "words_i": [[int(c) for c in w] for w in self.words_i],
            "words_j": [[int(c) for c in w] for w in self.words_j],
            "points": self.points,
            "separation": self.separation,
            "complete": self.complete,
        }


def _two_block_words(k: int, N: int):
    # a^m b^(N - m) for every ordered pair of generators; includes the pure powers
    seen = set()
    for a in range(k):
        for b in range(k):
            for m in range(N + 1):
                w = (a,) * m + (b,) * (N - m)
                if w not in seen:
                    seen.add(w)
                    yield np.array(w, dtype=np.int64)


def _chain(pos, lab, n2, tau):
    """Longest alternating chain (labels 0,1,0,...) with gaps >= tau, span < 1/2."""
    c = pos.size
    best: list[int] = []
    for s0 in np.flatnonzero(lab == 0):
        chain = [s0]
        span = 0.0
        i = s0
        need = 1
        for step in range(1, c):
            j = (s0 + step) % c
            gap = forward_gap(pos[i], pos[j])
            if lab[j] != need or gap < tau or gap <= 0.0:
                continue
            if span + gap >= 0.5:
                break
            span += gap
            chain.append(j)
            i, need = j, 1 - need
            if len(chain) == n2:
                return chain
        if len(chain) > len(best):
            best = chain
    return best


def interleave_search(sys: IFSystem, x: float, y: float, n: int, budget: int = 64) -> InterleaveResult:
    """Equal-length words ``i_1..i_n`` and ``j_1..j_n`` with ``i_1(x) < j_1(y) < ... < j_n(y)`` on a half circle.

    Candidate words are two-block words ``a^m b^(N-m)`` (powers of the
    rotation-like generator followed by powers of a contraction, and the
    reverse); ``N`` grows until an alternating chain of length ``2n`` exists.
    Among chains, the one maximizing the minimal gap is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    kinds, params = sys.kinds, sys.params
    best_partial = None
    for N in range(1, budget + 1):
        words = list(_two_block_words(sys.k, N))
        px = np.array([kernels.orbit(kinds, params, w, float(x))[-1] for w in words])
        py = np.array([kernels.orbit(kinds, params, w, float(y))[-1] for w in words])
        pos = np.concatenate([px, py])
        lab = np.concatenate([np.zeros(len(words), dtype=np.int64), np.ones(len(words), dtype=np.int64)])
        order = np.argsort(pos, kind="stable")
        pos, lab = pos[order], lab[order]
        wid = np.concatenate([np.arange(len(words)), np.arange(len(words))])[order]

        chain = _chain(pos, lab, 2 * n, 0.0)
        if len(chain) < 2 * n:
            if best_partial is None or len(chain) > len(best_partial[0]):
                best_partial = (chain, pos, wid, words)
            continue
        lo, hi = 0.0, 0.5 / (2 * n - 1)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if len(_chain(pos, lab, 2 * n, mid)) == 2 * n:
                lo = mid
            else:
                hi = mid
        chain = _chain(pos, lab, 2 * n, lo) if lo > 0 else chain
        return _result(chain, pos, wid, words, True)
    chain, pos, wid, words = best_partial
    return _result(chain, pos, wid, words, False)


def _result(chain, pos, wid, words, complete):
    pts = [float(pos[c]) for c in chain]
    ws = [words[wid[c]] + 1 for c in chain]
    sep = min((forward_gap(a, b) for a, b in zip(pts, pts[1:])), default=0.0)
    return InterleaveResult(ws[0::2], ws[1::2], pts, float(sep), complete)


__all__ = [
    "Classification",
    "Cluster",
    "ContractionWitness",
    "InterleaveError",
    "InterleaveResult",
    "Kind",
    "OmegaAtoms",
    "Probe",
    "SymmetryReport",
    "classify",
    "cluster_atoms",
    "commutation_residual",
    "contractible_radius",
    "contraction_word_search",
    "detect_symmetry",
    "interleave_search",
    "omega_atoms",
    "probe_contraction",
    "snap_rational",
    "witness_length",
]
