import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circleifs.circle_geom import Arc, arc_between, arc_contains, dist, forward_gap, ordered_chain, precedes, wrap

pts = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)
reals = st.floats(-50.0, 50.0, allow_nan=False)


def test_wrap_reduces_into_unit_interval():
    assert wrap(1.25) == 0.25
    assert wrap(-0.25) == 0.75
    assert wrap(1.0) == 0.0
    assert wrap(-1e-20) == 0.0
    np.testing.assert_array_equal(wrap(np.array([2.5, -0.5, 1.0])), [0.5, 0.5, 0.0])


@given(reals)
def test_wrap_range(x):
    assert 0.0 <= wrap(x) < 1.0


@pytest.mark.parametrize("x, y, d", [(0.1, 0.4, 0.3), (0.95, 0.05, 0.1), (0.3, 0.3, 0.0), (0.0, 0.5, 0.5)])
def test_dist_examples(x, y, d):
    assert dist(x, y) == pytest.approx(d, abs=1e-15)


@given(pts, pts, pts)
def test_dist_is_a_metric(x, y, z):
    assert dist(x, y) == dist(y, x)
    assert 0.0 <= dist(x, y) <= 0.5
    assert dist(x, z) <= dist(x, y) + dist(y, z) + 1e-15


def test_ordered_chain_examples():
    assert ordered_chain([0.1, 0.2, 0.3])
    assert ordered_chain([0.9, 0.0, 0.1])
    assert not ordered_chain([0.1, 0.8])
    assert not ordered_chain([0.3, 0.2])
    assert not ordered_chain([0.0, 0.2, 0.4, 0.6])


def test_ordered_chain_needs_two_points():
    with pytest.raises(ValueError):
        ordered_chain([0.1])


@given(st.lists(pts, min_size=2, max_size=8), reals)
def test_ordered_chain_rotation_invariant(points, c):
    shifted = [wrap(p + c) for p in points]
    # only compare away from the strict-inequality boundaries, where rounding can flip a decision
    gaps = [forward_gap(a, b) for a, b in zip(points, points[1:])]
    total = sum(gaps)
    margin = 1e-9
    if any(abs(g) < margin or abs(g - 0.5) < margin or g > 1 - margin for g in gaps) or abs(total - 0.5) < margin:
        return
    if abs(dist(points[0], points[-1]) - 0.5) < margin:
        return
    assert ordered_chain(points) == ordered_chain(shifted)


@pytest.mark.parametrize("a, b, start, length", [(0.2, 0.5, 0.2, 0.3), (0.8, 0.1, 0.8, 0.3), (0.4, 0.4, 0.4, 0.0)])
def test_arc_between_examples(a, b, start, length):
    arc = arc_between(a, b)
    assert arc.start == pytest.approx(start)
    assert arc.length == pytest.approx(length, abs=1e-15)


@given(pts, pts)
def test_arc_between_complementary(a, b):
    if dist(a, b) < 1e-12:
        return
    assert arc_between(a, b).length + arc_between(b, a).length == pytest.approx(1.0, abs=1e-15)


def test_arc_contains_examples():
    assert arc_contains(Arc(0.9, 0.2), 0.05)
    assert not arc_contains(Arc(0.1, 0.2), 0.5)
    assert arc_contains(Arc(0.3, 0.0), 0.3)
    assert arc_contains(Arc(0.1, 0.2), 0.3)
    np.testing.assert_array_equal(arc_contains(Arc(0.9, 0.2), np.array([0.95, 0.5, 0.1])), [True, False, True])


def test_arc_validation_and_full_circle():
    with pytest.raises(ValueError):
        Arc(0.0, 1.5)
    full = Arc(0.3, 1.0)
    assert all(full.contains(x) for x in np.linspace(0, 0.999, 50))
    assert Arc(1.2, 0.1).start == pytest.approx(0.2)


def test_precedes_orientation():
    assert precedes(0.9, 0.1)
    assert not precedes(0.1, 0.9)
    assert not precedes(0.2, 0.2)
    assert math.isclose(forward_gap(0.9, 0.1), 0.2)
