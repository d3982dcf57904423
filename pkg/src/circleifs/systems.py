"""Named systems used by the tests, the acceptance suite and the demo configs."""

from __future__ import annotations

import math

from .homeo import GOLDEN, Rotation, SinePerturbed, half_periodic_pl
from .ifs_core import IFSystem

# slopes 1.6 / 0.4 / 1.6 on each half: attracting fixed points 1/4, 3/4; repelling 0, 1/2
HALF_KNOTS = [(0.0, 0.0), (0.125, 0.2), (0.375, 0.3), (0.5, 0.5)]


def demo_contractive() -> IFSystem:
    """Golden rotation plus ``t + sin(2 pi t) / (4 pi)``, equal weights."""
    return IFSystem([Rotation(GOLDEN), SinePerturbed(0.0, 0.5)], [0.5, 0.5])


def two_rotations() -> IFSystem:
    """Rotations by ``sqrt 2 - 1`` and ``sqrt 3 - 1``; their difference is irrational."""
    return IFSystem([Rotation(math.sqrt(2) - 1), Rotation(math.sqrt(3) - 1)], [0.5, 0.5])


def single_rotation() -> IFSystem:
    return IFSystem([Rotation(GOLDEN)], [1.0])


def half_symmetric() -> IFSystem:
    """Golden rotation plus a lift with ``F(t + 1/2) = F(t) + 1/2``; both commute with the half turn."""
    return IFSystem([Rotation(GOLDEN), half_periodic_pl(HALF_KNOTS)], [0.5, 0.5])


FLEET = {
    "demo_contractive": demo_contractive,
    "two_rotations": two_rotations,
    "single_rotation": single_rotation,
    "half_symmetric": half_symmetric,
}


def by_name(name: str) -> IFSystem:
    try:
        return FLEET[name]()
    except KeyError:
        raise ValueError(f"unknown system {name!r}; known: {sorted(FLEET)}") from None
