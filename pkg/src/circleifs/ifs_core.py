"""Iterated function systems ``(Gamma, p)`` on the circle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._accel import kernels
from .homeo import (
    Homeo,
    Order,
    _check_word,
    compose_apply,
    from_dict,
    is_isometry,
    lift_is_valid,
    pack,
    rotation_number,
)

PROB_TOL = 1e-12


class RandomWordStream:
    """Reproducible random stream addressed by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator; distinct ``stream_id``
    values spawn independent keys from the same 64-bit seed. The stream is
    stateful: successive draws continue where the previous one stopped.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.rng = np.random.Generator(np.random.Philox(ss))

    def substream(self, stream_id: int) -> "RandomWordStream":
        """A fresh stream with the same seed and another id."""
        return RandomWordStream(self.seed, stream_id)

    def uniform(self, size=None):
        return self.rng.random(size)

    def __repr__(self):
        return f"RandomWordStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    errors: list[str]
    isometry: list[bool]
    rotation_numbers: list[float]

    def to_dict(self):
        return {
            "valid": self.valid,
            "errors": self.errors,
            "isometry": self.isometry,
            "rotation_numbers": self.rotation_numbers,
        }


class InvalidSystemError(ValueError):
    """Raised when an :class:`IFSystem` violates its invariants."""

    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.errors))
        self.report = report


class IFSystem:
    """Generators ``g_1..g_k`` chosen i.i.d. with probabilities ``p_1..p_k``.

    Construction validates the probability vector and every lift (pass
    ``check=False`` to skip); :func:`validate_system` reports without raising.
    Treat instances as immutable.
    """

    def __init__(self, generators: Sequence[Homeo], probs: Sequence[float] | None = None, *, check: bool = True):
        gens = tuple(generators)
        if probs is None:
            probs = [1.0 / len(gens)] * len(gens) if gens else []
        p = np.array(probs, dtype=np.float64)
        p.flags.writeable = False
        self.generators = gens
        self.probs = p
        if check:
            report = validate_system(self)
            if not report.valid:
                raise InvalidSystemError(report)
        self._packed = pack(gens)

    def __repr__(self):
        return f"IFSystem({list(self.generators)!r}, probs={self.probs.tolist()!r})"

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def kinds(self) -> np.ndarray:
        return self._packed[0]

    @property
    def params(self) -> np.ndarray:
        return self._packed[1]

    def to_dict(self) -> dict:
        return {"generators": [g.to_dict() for g in self.generators], "probs": [float(p) for p in self.probs]}

    @classmethod
    def from_dict(cls, d: dict) -> "IFSystem":
        return cls([from_dict(g) for g in d["generators"]], d.get("probs"))


def validate_system(sys: IFSystem, n_iter: int = 10_000) -> ValidationReport:
    """Check the system invariants and collect per-generator diagnostics."""
    errors = []
    p = np.asarray(sys.probs, dtype=np.float64)
    gens = sys.generators
    if len(gens) < 1:
        errors.append("at least one generator is required")
    if p.shape != (len(gens),):
        errors.append(f"probs has {p.size} entries for {len(gens)} generators")
    else:
        if np.any(~np.isfinite(p)) or np.any(p <= 0):
            errors.append("all probabilities must be strictly positive")
        if abs(p.sum() - 1.0) > PROB_TOL:
            errors.append(f"probabilities sum to {p.sum()!r}, not 1")
    iso, rho = [], []
    for i, g in enumerate(gens):
        if not isinstance(g, Homeo):
            errors.append(f"generator {i + 1} is not a Homeo")
            iso.append(False)
            rho.append(float("nan"))
            continue
        if not lift_is_valid(g):
            errors.append(f"generator {i + 1} lift is not an increasing degree-one map")
        iso.append(is_isometry(g, 100, 1e-12))
        rho.append(rotation_number(g, n_iter, 0.0))
    return ValidationReport(not errors, errors, iso, rho)


def sample_word(sys: IFSystem, stream: RandomWordStream, n: int) -> np.ndarray:
    """``n`` i.i.d. letters (1-based) drawn with the system's probabilities."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    cum = np.cumsum(sys.probs)
    cum[-1] = np.inf
    idx = np.searchsorted(cum, stream.uniform(n), side="right")
    return (idx + 1).astype(np.int64)


def forward_orbit(sys: IFSystem, x: float, word) -> np.ndarray:
    """``[x, g_{w1}(x), g_{w2}(g_{w1}(x)), ...]``, length ``len(word) + 1``."""
    w0 = _check_word(word, sys.k)
    return kernels.orbit(sys.kinds, sys.params, np.ascontiguousarray(w0), float(x))


def backward_point(sys: IFSystem, word, x):
    """``g_{w1} o g_{w2} o ... o g_{wn}(x)``."""
    return compose_apply(sys.generators, word, x, Order.BACKWARD)


def inverse_system(sys: IFSystem) -> IFSystem:
    """Generators replaced by their inverses, probabilities unchanged."""
    return IFSystem([g.inverse() for g in sys.generators], sys.probs, check=False)


@dataclass(frozen=True)
class DenseOrbitResult:
    net_achieved: bool
    steps_used: int
    eps: float
    budget: int


def dense_orbit_check(h: Homeo, x0: float = 0.0, eps: float = 0.01, budget: int = 100_000) -> DenseOrbitResult:
    """Finite proxy for a dense orbit: does the orbit hit every cell of width ``eps``?

    A negative answer means only "not within ``budget`` steps".
    """
    if eps <= 0 or budget < 1:
        raise ValueError("eps must be positive and budget >= 1")
    ncells = int(math.ceil(1.0 / eps))
    steps = kernels.orbit_net(h.kind, h.row(), float(x0), ncells, int(budget))
    if steps < 0:
        return DenseOrbitResult(False, int(budget), eps, budget)
    return DenseOrbitResult(True, int(steps), eps, budget)


def rational_distance(rho: float, max_denominator: int = 20) -> float:
    """Distance from ``rho`` to the nearest ``p/q`` with ``q <= max_denominator``."""
    return min(abs(rho * q - round(rho * q)) / q for q in range(1, max_denominator + 1))


def designated_rotation(sys: IFSystem, eps: float = 0.01, budget: int = 100_000, n_iter: int = 10_000) -> int | None:
    """0-based index of the generator playing the dense-orbit role, or ``None``.

    Among generators whose orbit forms an ``eps``-net within ``budget`` steps,
    pick the one whose rotation number is farthest from rationals with
    denominator at most 20.
    """
    best, best_score = None, -1.0
    for i, g in enumerate(sys.generators):
        if not dense_orbit_check(g, 0.0, eps, budget).net_achieved:
            continue
        score = rational_distance(rotation_number(g, n_iter, 0.0))
        if score > best_score:
            best, best_score = i, score
    return best
