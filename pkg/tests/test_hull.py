import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multatlas.hull import HullPolygon, contains_origin, convex_hull, signed_distance
from multatlas.verify import brute_hull_vertices

P34 = [(-1, 0), (-1 / 3, 0), (2, 0), (-10 / 183, 49 / 183), (-10 / 183, -49 / 183)]
SQUARE = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])


def verts(h):
    return sorted(map(tuple, h.vertices.tolist()))


def test_examples():
    assert verts(convex_hull([(0, 0), (1, 0), (0, 1), (0.1, 0.1)])) == [(0, 0), (0, 1), (1, 0)]
    assert verts(convex_hull([(0, 0), (1, 1), (2, 2)])) == [(0, 0), (2, 2)]
    h = convex_hull(P34)
    assert verts(h) == sorted([(-1, 0), (-10 / 183, -49 / 183), (2, 0), (-10 / 183, 49 / 183)])
    assert h.area > 0  # counterclockwise


def test_empty_and_degenerate():
    assert convex_hull([]).is_empty
    assert len(convex_hull([(1, 2), (1, 2)])) == 1
    with pytest.raises(ValueError):
        signed_distance(convex_hull([]), (0, 0))
    assert not contains_origin(convex_hull([]))
    with pytest.raises(ValueError):
        convex_hull([(0, float("nan"))])


def test_complex_input_matches_pairs():
    pts = np.array([0.3 + 1j, -2 - 0.5j, 1.5 - 1j, 0.1j])
    assert convex_hull(pts) == convex_hull(np.column_stack([pts.real, pts.imag]))


def test_signed_distance_examples():
    assert signed_distance(SQUARE, (0.5, 0.5)) == pytest.approx(-0.5)
    assert signed_distance(SQUARE, (2, 0.5)) == pytest.approx(1.0)
    assert signed_distance(SQUARE, (1, 0.3)) == 0.0
    assert signed_distance(convex_hull(P34), (0, 0)) < 0


def test_contains_origin_examples():
    assert contains_origin(convex_hull(P34), 0.0)
    assert not contains_origin(convex_hull([(1, 0), (2, 0), (1, 1)]), 0.0)
    # origin 0.01 inside the bottom edge y = -0.01
    tri = convex_hull([(-1, -0.01), (1, -0.01), (0, 1)])
    assert contains_origin(tri, 0.0)
    assert signed_distance(tri, (0, 0)) == pytest.approx(-0.01)
    assert not contains_origin(tri, 0.02)
    with pytest.raises(ValueError):
        contains_origin(tri, -1.0)


def test_segment_hull_never_contains():
    seg = convex_hull([(-1, 0), (0.5, 0)])
    assert signed_distance(seg, (0, 0)) == 0.0
    assert not contains_origin(seg)


coords = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
points = st.lists(st.tuples(coords, coords), min_size=1, max_size=30)
grid_points = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=10)


@settings(max_examples=300, deadline=None)
@given(grid_points)
def test_brute_force_equivalence(pts):
    assert verts(convex_hull(np.array(pts, dtype=float))) == brute_hull_vertices(pts)


@settings(max_examples=200, deadline=None)
@given(points)
def test_idempotent_and_strictly_convex(pts):
    h = convex_hull(pts)
    assert convex_hull(h.vertices) == h
    v = h.vertices
    if len(v) >= 3:
        scale = max(1.0, np.abs(v).max())
        for i in range(len(v)):
            a, b, c = v[i - 1], v[i], v[(i + 1) % len(v)]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            assert cross > 0
            # a vertex lying between its neighbours must be off their line
            t = np.dot(b - a, c - a)
            if 0 < t < np.dot(c - a, c - a):
                assert cross > h.collinearity_tol * scale * np.hypot(*(c - a))


@settings(max_examples=200, deadline=None)
@given(points)
def test_inputs_not_outside(pts):
    h = convex_hull(pts)
    scale = max(1.0, max(max(abs(x), abs(y)) for x, y in pts))
    for p in pts:
        assert signed_distance(h, p) <= 1e-9 * scale


@settings(max_examples=200, deadline=None)
@given(points, points, st.tuples(coords, coords))
def test_superset_monotone(a, b, q):
    small = convex_hull(a)
    big = convex_hull(a + b)
    scale = max(1.0, max(max(abs(x), abs(y)) for x, y in a + b + [q]))
    assert signed_distance(big, q) <= signed_distance(small, q) + 1e-9 * scale


def test_hull_polygon_basics():
    assert HullPolygon(np.zeros((0, 2))) != "x"
    assert math.isclose(SQUARE.area, 1.0)
    assert np.allclose(sorted(SQUARE.as_complex(), key=lambda z: (z.real, z.imag)), [0, 1j, 1, 1 + 1j])
