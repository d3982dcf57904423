import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circleifs.circle_geom import Arc, arc_contains, dist, wrap
from circleifs.homeo import (
    GOLDEN,
    Order,
    PiecewiseLinear,
    Rotation,
    SineInverse,
    SinePerturbed,
    apply,
    apply_inverse,
    compose_apply,
    from_dict,
    half_periodic_pl,
    image_arc,
    is_isometry,
    lift_is_valid,
    rotation_number,
    word_image_arc,
)

pts = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)


@st.composite
def homeos(draw):
    kind = draw(st.sampled_from(["rot", "sine", "sine_inv", "pl"]))
    if kind == "rot":
        return Rotation(draw(pts))
    if kind in ("sine", "sine_inv"):
        a = draw(st.floats(-1, 1))
        b = draw(st.floats(-0.95, 0.95))
        return SinePerturbed(a, b) if kind == "sine" else SineInverse(a, b)
    m = draw(st.integers(1, 6))
    ts = sorted(set(draw(st.lists(st.floats(0.01, 0.99), min_size=m, max_size=m))))
    incs = draw(st.lists(st.floats(0.05, 1.0), min_size=len(ts) + 1, max_size=len(ts) + 1))
    f0 = draw(st.floats(-0.5, 0.5))
    cum = np.cumsum(incs) / np.sum(incs)
    t = [0.0] + ts + [1.0]
    f = [f0] + list(f0 + cum[:-1]) + [f0 + 1.0]
    return PiecewiseLinear(list(zip(t, f)))


def test_apply_examples():
    assert apply(Rotation(0.25), 0.9) == pytest.approx(0.15)
    assert apply(SinePerturbed(0, 0.5), 0.0) == 0.0
    assert apply(SinePerturbed(0, 0.5), 0.25) == pytest.approx(0.25 + 0.5 / (2 * math.pi), abs=1e-15)
    assert apply(SinePerturbed(0, 0.5), 0.25) == pytest.approx(0.3295775, abs=1e-7)


def test_apply_inverse_examples():
    assert apply_inverse(Rotation(0.25), 0.15, 1e-12) == pytest.approx(0.9)
    h = SinePerturbed(0, 0.5)
    assert apply_inverse(h, apply(h, 0.25), 1e-9) == pytest.approx(0.25, abs=1e-8)
    # the rounded 7-digit image is within 1e-7 of the true one; the inverse moves it by at most 1e-7 / min F'
    assert apply_inverse(h, 0.3295775, 1e-9) == pytest.approx(0.25, abs=1e-7 / 0.5 + 1e-9)
    with pytest.raises(ValueError):
        apply_inverse(h, 0.3, 0.0)


@settings(max_examples=60, deadline=None)
@given(homeos(), pts)
def test_round_trip(h, x):
    assert dist(apply_inverse(h, apply(h, x), 1e-10), x) <= 1e-9
    assert dist(apply(h, apply_inverse(h, x, 1e-10)), x) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(homeos())
def test_lift_monotone_and_degree_one(h):
    t = np.linspace(0.0, 1.0, 1001)
    f = h.lift(t)
    assert np.all(np.diff(f) > 0)
    assert np.max(np.abs(h.lift(t + 1.0) - f - 1.0)) <= 1e-12
    assert lift_is_valid(h)


@settings(max_examples=40, deadline=None)
@given(homeos(), pts, st.floats(0.0, 0.99), st.floats(0.0, 1.0))
def test_image_arc_contains_images(h, s, length, frac):
    arc = Arc(s, length)
    img = image_arc(h, arc)
    x = wrap(s + frac * length)
    assert arc_contains(img, apply(h, x), 1e-12)


def test_image_arc_examples():
    img = image_arc(Rotation(0.3), Arc(0.8, 0.25))
    assert img.start == pytest.approx(0.1) and img.length == pytest.approx(0.25)
    img = image_arc(SinePerturbed(0, 0.5), Arc(0.4, 0.2))
    expected = 0.2 + 0.5 / (2 * math.pi) * (math.sin(1.2 * math.pi) - math.sin(0.8 * math.pi))
    assert img.length == pytest.approx(expected, abs=1e-15)
    assert img.length == pytest.approx(0.1065, abs=1e-4)
    deg = image_arc(SinePerturbed(0, 0.5), Arc(0.25, 0.0))
    assert deg.length == 0.0 and deg.start == pytest.approx(apply(SinePerturbed(0, 0.5), 0.25))
    with pytest.raises(ValueError):
        image_arc(Rotation(0.1), Arc(0.0, 1.0))


def test_compose_apply_orders():
    maps = [Rotation(0.1), Rotation(0.2)]
    assert compose_apply(maps, (1, 2), 0.0, Order.FORWARD) == pytest.approx(0.3)
    h1, h2 = SinePerturbed(0.1, 0.4), PiecewiseLinear([(0, 0.1), (0.3, 0.2), (1, 1.1)])
    x = 0.37
    assert compose_apply([h1, h2], (1, 2), x, "forward") == apply(h2, apply(h1, x))
    assert compose_apply([h1, h2], (1, 2), x, "backward") == apply(h1, apply(h2, x))
    for i in (1, 2):
        assert compose_apply([h1, h2], (i,), x, "forward") == compose_apply([h1, h2], (i,), x, "backward")
    with pytest.raises(ValueError):
        compose_apply([h1, h2], (1, 3), x)
    with pytest.raises(ValueError):
        compose_apply([h1, h2], (), x)


def test_word_image_arc_matches_pointwise_composition():
    maps = [SinePerturbed(0.0, 0.5), Rotation(GOLDEN)]
    word = [1, 2, 1, 1, 2]
    arc = Arc(0.3, 0.1)
    img = word_image_arc(maps, word, arc)
    assert img.start == pytest.approx(compose_apply(maps, word, 0.3), abs=1e-14)
    end = compose_apply(maps, word, 0.4)
    assert wrap(img.start + img.length) == pytest.approx(end, abs=1e-14)


def test_rotation_number_examples():
    assert rotation_number(Rotation(1 / 3), 10**4, 0.0) == pytest.approx(1 / 3, abs=1e-15)
    assert rotation_number(SinePerturbed(0, 0.5), 10**4, 0.1) == pytest.approx(0.0, abs=1e-4)
    assert rotation_number(Rotation(GOLDEN), 10**4, 0.0) == pytest.approx(0.6180, abs=1e-4)


def test_rotation_number_of_composed_rotations():
    a, b = 0.125, 0.25
    comp = compose_apply([Rotation(a), Rotation(b)], (1, 2), 0.0)
    assert comp == wrap(a + b)
    assert rotation_number(Rotation(comp), 1000, 0.0) == pytest.approx(wrap(a + b), abs=1e-15)


def test_is_isometry_examples():
    assert is_isometry(Rotation(0.37), 100, 1e-12)
    assert not is_isometry(SinePerturbed(0, 0.5), 100, 1e-6)
    assert is_isometry(PiecewiseLinear.identity(), 100, 1e-12)
    with pytest.raises(ValueError):
        is_isometry(Rotation(0.1), 1, 1e-12)


def test_validation_errors():
    with pytest.raises(ValueError):
        SinePerturbed(0, 1.0)
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 0), (0.5, 0.4), (1, 1.2)])
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 0), (0.5, 0.6), (0.4, 0.7), (1, 1)])
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 0), (0.5, 0.5), (0.7, 0.5), (1, 1)])
    with pytest.raises(ValueError):
        from_dict({"type": "mystery"})


def test_pl_inverse_is_closed_form():
    h = PiecewiseLinear([(0, 0.05), (0.25, 0.5), (0.75, 0.7), (1, 1.05)])
    g = h.inverse()
    assert isinstance(g, PiecewiseLinear)
    y = np.linspace(0, 1, 1000, endpoint=False)
    np.testing.assert_allclose(dist(h(g(y)), y), 0.0, atol=1e-14)


def test_serialization_round_trip():
    for h in (Rotation(0.3), SinePerturbed(0.1, -0.4), SineInverse(0.2, 0.3), PiecewiseLinear.identity()):
        assert from_dict(h.to_dict()) == h


def test_half_periodic_commutes_with_half_turn():
    h = half_periodic_pl([(0, 0), (0.125, 0.2), (0.375, 0.3), (0.5, 0.5)])
    x = np.linspace(0, 1, 257, endpoint=False)
    assert np.max(dist(h(x + 0.5), wrap(h(x) + 0.5))) <= 1e-15
    with pytest.raises(ValueError):
        half_periodic_pl([(0, 0), (0.5, 0.6)])
