from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rigidlab.errors import DegradedPrecision
from rigidlab.orbit import TorusPoint, act, partial_orbit, point_from_element, to_embedding_frame
from rigidlab.slices import SliceQuery, build_context, enumerate_slice


def test_quadratic_act_example(quad):
    y = act(quad, (1,), TorusPoint.exact([Fraction(1, 5), Fraction(2, 5)]))
    assert y.coords == (Fraction(3, 5), Fraction(4, 5))
    zero = TorusPoint.exact([0, 0])
    assert act(quad, (7,), zero) == zero


def test_exact_point_normalisation():
    p = TorusPoint.exact([Fraction(-1, 3), Fraction(5, 2)])
    assert p.q == 6 and p.coords == (Fraction(2, 3), Fraction(1, 2)) and p.order == 6
    assert TorusPoint.exact([Fraction(2, 4), 0]).order == 2


def test_embedding_frame(quad):
    fp = to_embedding_frame(quad, TorusPoint.exact([Fraction(1, 2), 0]))
    assert [float(c) for c in fp.coords] == pytest.approx([0.5, 0.5], abs=1e-30)
    fp0 = to_embedding_frame(quad, TorusPoint.exact([0, 0]))
    assert all(c == 0 for c in fp0.coords)
    fp1 = to_embedding_frame(quad, [Fraction(0), Fraction(1)])
    assert float(fp1.coords[0]) == pytest.approx(2**0.5) and float(fp1.coords[1]) == pytest.approx(-(2**0.5))


def test_real_point_radius_is_honest(cubic):
    rng = np.random.default_rng(3)
    vals = [Fraction(int(rng.integers(1, 2**60)), 2**60) for _ in range(3)]
    lo = TorusPoint.real(vals, precision=128)
    hi = TorusPoint.real(vals, precision=512)
    for n in [(3, -2), (10, 7), (-12, 5)]:
        a, b = act(cubic, n, lo), act(cubic, n, hi)
        with mpmath.workprec(512):
            err = max(min(abs(x - y), 1 - abs(x - y)) for x, y in zip(a.values, b.values))
        assert err <= a.radius
        assert a.radius < 2**-32


def test_degraded_precision(cubic):
    x = TorusPoint.real([Fraction(1, 3), Fraction(1, 7), Fraction(2, 9)], precision=64)
    with pytest.raises(DegradedPrecision) as info:
        act(cubic, (30, 30), x)
    assert info.value.n == (30, 30)


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=2), st.lists(st.integers(-4, 4), min_size=2, max_size=2),
       st.lists(st.fractions(0, 1, max_denominator=50), min_size=3, max_size=3))
@settings(max_examples=50, deadline=None)
def test_exact_group_law(cubic, m, n, coords):
    x = TorusPoint.exact(coords)
    s = tuple(a + b for a, b in zip(m, n))
    assert act(cubic, s, x) == act(cubic, m, act(cubic, n, x))
    assert act(cubic, tuple(-v for v in n), act(cubic, n, x)) == x


def test_partial_orbit_and_csv(cubic):
    ctx = build_context(cubic, set())
    x = TorusPoint.exact([Fraction(1, 3)] * 3)
    one = enumerate_slice(cubic, SliceQuery(ctx, 0.1, 0))
    orbit = partial_orbit(cubic, x, one)
    assert orbit.points == [x] and orbit.metadata["N"] == 0
    orbit = partial_orbit(cubic, x, enumerate_slice(cubic, SliceQuery(ctx, 0.1, 4)))
    assert len(orbit.distinct_points()) <= 27 and orbit.exact
    lines = orbit.to_csv().splitlines()
    assert lines[0] == "n_1,n_2,x_1,x_2,x_3,err_radius,denominator"
    assert len(lines) == len(orbit) + 1
    assert lines[1].endswith(",0,3")
    assert orbit.embedding_array().shape == (len(orbit), 3)


def test_point_from_element(octic):
    u = octic.field.element([Fraction(1, 7)] + [0] * 7)
    p = point_from_element(octic, u)
    assert p.is_exact and p.order == 7
