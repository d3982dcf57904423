"""Random dynamics of circle homeomorphisms: operators, stability and structure."""

from ._accel import BACKEND
from .circle_geom import Arc, dist, wrap
from .homeo import (
    GOLDEN,
    PiecewiseLinear,
    Rotation,
    SineInverse,
    SinePerturbed,
    apply,
    apply_inverse,
    compose_apply,
    half_periodic_pl,
    image_arc,
    rotation_number,
)
from .ifs_core import IFSystem, RandomWordStream, validate_system
from .transfer_ops import GridFunction, ParticleMeasure, markov_step, wasserstein_circle

__version__ = "0.1.0"
