import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solenoid_kms.circle import (
    Arc,
    CirclePoint,
    DegreeOverflow,
    SimpleFunction,
    TrigPoly,
    baseN_digits,
    circle_distance,
    cover,
    cover_preimage_arcs,
    digits_value,
    dyadic_partition,
    rotate,
    rotate_arc,
    trig_compose_cover,
    trig_compose_rotation,
    trig_conj,
    trig_eval,
    trig_mul,
    wrap,
)

unit = st.floats(0, 1, exclude_max=True, allow_nan=False)
reals = st.floats(-50, 50, allow_nan=False)
GRID = (np.arange(97) + 0.5) / 97


def trig_polys(max_degree=4):
    @st.composite
    def build(draw):
        K = draw(st.integers(0, max_degree))
        re = draw(st.lists(st.floats(-2, 2), min_size=2 * K + 1, max_size=2 * K + 1))
        im = draw(st.lists(st.floats(-2, 2), min_size=2 * K + 1, max_size=2 * K + 1))
        return TrigPoly(np.array(re) + 1j * np.array(im))

    return build()


def test_wrap_edge_cases():
    assert wrap(1.0) == 0.0
    assert wrap(-0.25) == 0.75
    assert wrap(-1e-18) == 0.0
    assert CirclePoint(2.5).value == 0.5


@given(reals)
def test_wrap_range(t):
    v = wrap(t)
    assert 0.0 <= v < 1.0
    assert circle_distance(v, t) < 1e-12


def test_rotate_and_cover():
    assert rotate(0.1, 0.3) == pytest.approx(0.8)
    assert cover(0.7, 3) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        cover(0.1, 1)


def test_arc_fragments_and_membership():
    a = Arc(0.8, 0.4)
    assert a.fragments() == [(0.8, 1.0), (0.0, pytest.approx(0.2))]
    assert a.contains(0.9) and a.contains(0.1) and not a.contains(0.5)
    assert Arc.between(0.25, 0.5).length == 0.25
    with pytest.raises(ValueError):
        Arc(0.0, 0.0)


@given(unit, st.floats(0.01, 1.0), unit, reals)
def test_rotate_arc_is_preimage(start, length, t, gamma):
    # R_gamma(U) = U - gamma, so t lies in it iff t + gamma lies in U
    a = Arc(start, length)
    moved = rotate_arc(a, gamma)
    if min(circle_distance(t + gamma, a.start), circle_distance(t + gamma, a.end)) > 1e-9:
        assert moved.contains(t) == a.contains(t + gamma)


@given(unit, st.floats(0.01, 1.0), unit, st.integers(2, 5))
def test_cover_preimage(start, length, t, N):
    a = Arc(start, length)
    pre = cover_preimage_arcs(a, N)
    assert sum(p.length for p in pre) == pytest.approx(length)
    image = cover(t, N)
    if min(circle_distance(image, a.start), circle_distance(image, a.end)) > 1e-9:
        assert any(p.contains(t) for p in pre) == a.contains(image)


def test_dyadic_partition():
    arcs = dyadic_partition(3)
    assert len(arcs) == 8
    assert arcs[5].start == 5 / 8 and arcs[5].length == 1 / 8


@given(unit, st.integers(2, 7), st.integers(1, 12))
def test_digits_truncate_from_below(t, N, K):
    d = baseN_digits(t, N, K)
    assert all(0 <= x < N for x in d)
    v = digits_value(d, N)
    assert v <= t + 1e-12
    assert t - v < N**-K + 1e-12


def test_digits_exact():
    assert baseN_digits(0.75, 2, 4) == (1, 1, 0, 0)
    assert baseN_digits(2 / 3, 3, 3) == (2, 0, 0)


def test_trigpoly_basics():
    f = TrigPoly.from_dict({-2: 1.0, 1: 2j})
    assert f.degree == 2
    assert f.coefficient(1) == 2j and f.coefficient(5) == 0
    assert f.to_dict() == {-2: 1.0, 1: 2j}
    assert TrigPoly([0, 3, 0]).degree == 0
    assert TrigPoly.zero().is_zero()
    assert f(0.25) == pytest.approx(np.exp(-1j * np.pi) + 2j * np.exp(0.5j * np.pi))


@given(trig_polys(), trig_polys())
def test_mul_is_pointwise(f, g):
    h = trig_mul(f, g)
    assert np.allclose(trig_eval(h, GRID), trig_eval(f, GRID) * trig_eval(g, GRID), atol=1e-9)


@given(trig_polys())
def test_conj_is_pointwise(f):
    assert np.allclose(trig_eval(trig_conj(f), GRID), np.conj(trig_eval(f, GRID)))


@given(trig_polys(), reals)
def test_rotation_composition_is_pointwise(f, gamma):
    g = trig_compose_rotation(f, gamma)
    moved = (GRID - gamma) % 1.0
    assert np.allclose(trig_eval(g, GRID), trig_eval(f, moved), atol=1e-9)


@given(trig_polys(), st.integers(2, 5))
def test_cover_composition_is_pointwise(f, N):
    g = trig_compose_cover(f, N)
    assert g.degree == N * f.degree
    assert np.allclose(trig_eval(g, GRID), trig_eval(f, (N * GRID) % 1.0), atol=1e-9)


def test_degree_cap():
    f = TrigPoly.monomial(40)
    with pytest.raises(DegreeOverflow):
        trig_mul(f, f)
    with pytest.raises(DegreeOverflow):
        trig_compose_cover(f, 2)
    assert trig_mul(f, f, cap=None).degree == 80


def test_simple_function():
    f = SimpleFunction((0.0, 0.5), (1.0, 3.0))
    assert f(0.25) == 1.0 and f(0.75) == 3.0 and f(1.25) == 1.0
    g = SimpleFunction.sample_dyadic(lambda t: t, 2)
    assert g.values == (0.0, 0.25, 0.5, 0.75)
    with pytest.raises(ValueError):
        SimpleFunction((0.1,), (1.0,))


@settings(max_examples=30)
@given(trig_polys(3))
def test_rotation_by_one_is_identity(f):
    assert trig_compose_rotation(f, 1.0).allclose(f, 1e-12)
    assert trig_compose_rotation(trig_compose_rotation(f, 0.3), -0.3).allclose(f, 1e-12)
    assert math.isclose(abs(trig_compose_rotation(f, 0.5).coefficient(1)), abs(f.coefficient(1)))
