"""Planar convex hulls with signed distance queries.

Monotone chain on points sorted by (x, y). A middle point whose distance
to the line through its neighbours is at most ``COLLINEARITY_TOL * scale``
counts as collinear and is dropped, so hull vertex lists are strictly convex.
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

COLLINEARITY_TOL = 1e-12


@njit(cache=True)
def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@njit(cache=True)
def _collinear_or_right(ax, ay, bx, by, cx, cy, thr):
    cr = _cross(ax, ay, bx, by, cx, cy)
    if cr <= 0:
        return True
    # near-collinear b is dropped only if it sits between a and c; the test is
    # on distance to the line, not area, so an apex over a short base survives
    dx = cx - ax
    dy = cy - ay
    L2 = dx * dx + dy * dy
    t = (bx - ax) * dx + (by - ay) * dy
    return 0 < t < L2 and cr <= thr * np.sqrt(L2)


@njit(cache=True)
def _monotone_chain(xs, ys, tol):
    m = xs.shape[0]
    out = np.empty((2 * m + 1, 2))
    if m == 0:
        return out[:0]
    o1 = np.argsort(ys, kind="mergesort")
    o2 = np.argsort(xs[o1], kind="mergesort")
    order = o1[o2]
    # drop exact duplicates
    px = np.empty(m)
    py = np.empty(m)
    k = 0
    for i in range(m):
        x = xs[order[i]]
        y = ys[order[i]]
        if k > 0 and px[k - 1] == x and py[k - 1] == y:
            continue
        px[k] = x
        py[k] = y
        k += 1
    if k == 1:
        out[0, 0] = px[0]
        out[0, 1] = py[0]
        return out[:1]
    scale = 1.0
    for i in range(k):
        scale = max(scale, abs(px[i]), abs(py[i]))
    thr = tol * scale
    h = 0
    for i in range(k):  # lower chain
        while h >= 2 and _collinear_or_right(out[h - 2, 0], out[h - 2, 1], out[h - 1, 0], out[h - 1, 1], px[i], py[i], thr):
            h -= 1
        out[h, 0] = px[i]
        out[h, 1] = py[i]
        h += 1
    lower = h + 1
    for i in range(k - 2, -1, -1):  # upper chain
        while h >= lower and _collinear_or_right(out[h - 2, 0], out[h - 2, 1], out[h - 1, 0], out[h - 1, 1], px[i], py[i], thr):
            h -= 1
        out[h, 0] = px[i]
        out[h, 1] = py[i]
        h += 1
    h -= 1  # last point repeats the first
    if h == 2 and out[0, 0] == out[1, 0] and out[0, 1] == out[1, 1]:
        h = 1
    # the chain junctions are never tested against both cyclic neighbours
    changed = h >= 3
    while changed and h >= 3:
        changed = False
        for j in range(h):
            a = (j - 1) % h
            c = (j + 1) % h
            if _collinear_or_right(out[a, 0], out[a, 1], out[j, 0], out[j, 1], out[c, 0], out[c, 1], thr):
                out[j:h - 1] = out[j + 1:h]
                h -= 1
                changed = True
                break
    # restart at the (x, y)-smallest vertex, as the chain itself does
    s = 0
    for j in range(1, h):
        if out[j, 0] < out[s, 0] or (out[j, 0] == out[s, 0] and out[j, 1] < out[s, 1]):
            s = j
    res = np.empty((h, 2))
    for j in range(h):
        res[j] = out[(s + j) % h]
    return res


@njit(cache=True)
def _segment_distance(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    L2 = dx * dx + dy * dy
    t = 0.0
    if L2 > 0:
        t = ((px - ax) * dx + (py - ay) * dy) / L2
        t = min(1.0, max(0.0, t))
    ex = ax + t * dx - px
    ey = ay + t * dy - py
    return np.sqrt(ex * ex + ey * ey)


@njit(cache=True)
def _signed_distance(v, px, py, tol):
    k = v.shape[0]
    if k == 1:
        return np.hypot(px - v[0, 0], py - v[0, 1])
    if k == 2:
        return _segment_distance(px, py, v[0, 0], v[0, 1], v[1, 0], v[1, 1])
    d = np.inf
    inside = True
    scale = max(1.0, abs(px), abs(py))
    for i in range(k):
        ax, ay = v[i, 0], v[i, 1]
        bx, by = v[(i + 1) % k, 0], v[(i + 1) % k, 1]
        d = min(d, _segment_distance(px, py, ax, ay, bx, by))
        scale = max(scale, abs(ax), abs(ay))
        if _cross(ax, ay, bx, by, px, py) < 0:
            inside = False
    if d <= tol * scale:
        return 0.0
    return -d if inside else d


@njit(cache=True)
def hull_origin_distance(xs, ys, tol):
    """Signed distance from 0 to the hull of the points (inf if empty)."""
    v = _monotone_chain(xs, ys, tol)
    if v.shape[0] == 0:
        return np.inf
    return _signed_distance(v, 0.0, 0.0, tol)


def _as_xy(points):
    a = np.asarray(points)
    if a.size == 0:
        return np.empty(0), np.empty(0)
    if np.iscomplexobj(a):
        a = a.ravel()
        return np.ascontiguousarray(a.real, dtype=float), np.ascontiguousarray(a.imag, dtype=float)
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    return np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(a[:, 1])


@dataclass(frozen=True, eq=False)
class HullPolygon:
    """Hull vertices, counterclockwise, as a (k, 2) array.

    k = 0 (empty), 1 (point) or 2 (segment) for degenerate inputs.
    """

    vertices: np.ndarray
    collinearity_tol: float = COLLINEARITY_TOL

    def __len__(self):
        return len(self.vertices)

    @property
    def is_empty(self):
        return len(self.vertices) == 0

    @property
    def area(self):
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def as_complex(self):
        return self.vertices[:, 0] + 1j * self.vertices[:, 1]

    def __eq__(self, other):
        if not isinstance(other, HullPolygon):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)


def convex_hull(points, collinearity_tol=COLLINEARITY_TOL):
    """Convex hull of 2-D points given as complex numbers or (x, y) rows."""
    xs, ys = _as_xy(points)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("hull input must be finite")
    return HullPolygon(_monotone_chain(xs, ys, collinearity_tol), collinearity_tol)


def signed_distance(hull, p):
    """Negative inside, zero on the boundary, positive outside.

    The magnitude is the Euclidean distance to the boundary. Point and
    segment hulls have no interior, so they never give a negative value.
    """
    if hull.is_empty:
        raise ValueError("signed distance to an empty hull is undefined")
    if isinstance(p, complex):
        px, py = p.real, p.imag
    else:
        px, py = (float(t) for t in p)
    return float(_signed_distance(hull.vertices, float(px), float(py), hull.collinearity_tol))


def contains_origin(hull, margin=0.0):
    """True iff the origin lies inside the hull by more than ``margin``."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if hull.is_empty:
        return False
    return signed_distance(hull, (0.0, 0.0)) < -margin
