import math

import numpy as np
import pytest

from multatlas import atlas
from multatlas.atlas import (
    IN_M,
    NOT_DETECTED,
    GridSpec,
    RenderConfig,
    averaging_density_probe,
    build_yc,
    classify_parameter,
    default_threads,
    render_xset,
)
from multatlas.dynamics import mandelbrot_member
from multatlas.hull import contains_origin, convex_hull
from multatlas.orbits import PointSet

CLEFT = -0.75 + 0.05j  # exterior point in the cleft between the cardioid and the period-2 disk


def test_build_yc_c0():
    ds = build_yc(0, 2)
    assert list(ds.nu_points) == [1, 2]
    assert ds.nu_points[1] == [pytest.approx(-1, abs=1e-14)]
    assert ds.nu_points[2] == [pytest.approx(0.5, abs=1e-14)]
    assert len(ds.hull) == 2
    # segment through the origin: no interior, distance is 0 up to rounding
    assert 0 <= ds.origin_signed_distance < 1e-15
    assert not contains_origin(ds.hull)


def test_build_yc_near_tangency_contains_origin():
    ds = build_yc(-0.75 + 0.02j, 3)
    assert ds.origin_signed_distance < 0 and not ds.incomplete_periods


def test_build_yc_minus_two():
    ds = build_yc(-2, 1)
    assert any(abs(v + 1 / 6) < 1e-12 for v in ds.nu_points[1])
    assert len(ds.nu_points[1]) == 2


def test_build_yc_only_repelling_and_hull_consistent():
    ds = build_yc(-0.1 + 0.3j, 5)  # inside M: one attracting fixed point
    for n, vals in ds.nu_points.items():
        reps = [o.nu for o in ds.orbits[n] if o.repelling and o.nu is not None]
        assert vals == reps
    assert len(ds.nu_points[1]) == 1
    assert ds.hull == convex_hull(ds.all_nu())


def test_hull_monotone_in_period():
    prev = math.inf
    for p in range(1, 8):
        d = build_yc(-0.3 + 0.9j, p).origin_signed_distance
        assert d <= prev + 1e-15
        prev = d


def test_build_yc_flags_incomplete_without_raising():
    ds = build_yc(-0.75, 3)
    assert ds.incomplete_periods == [2]


def test_classify_examples():
    assert classify_parameter(0, 8)[0] == IN_M
    assert not mandelbrot_member(CLEFT).in_mandelbrot
    assert classify_parameter(CLEFT, 3)[0] == 3
    assert classify_parameter(CLEFT, 2)[0] == NOT_DETECTED
    assert classify_parameter(3, 8)[0] == NOT_DETECTED


def test_margin_makes_detection_stricter():
    d = build_yc(CLEFT, 3).origin_signed_distance
    assert classify_parameter(CLEFT, 3, margin=-d * 0.5)[0] == 3
    assert classify_parameter(CLEFT, 3, margin=-d * 2)[0] == NOT_DETECTED


def test_grid_spec_validation_and_centers():
    with pytest.raises(ValueError):
        GridSpec(1, 0, 0, 1, 4, 4)
    with pytest.raises(ValueError):
        GridSpec(0, 1, 0, 1, 0, 4)
    g = GridSpec(0, 4, 0, 2, 4, 2)
    assert np.allclose(g.centers(), [[0.5 + 1.5j, 1.5 + 1.5j, 2.5 + 1.5j, 3.5 + 1.5j],
                                      [0.5 + 0.5j, 1.5 + 0.5j, 2.5 + 0.5j, 3.5 + 0.5j]])


@pytest.mark.parametrize("kw", [{"threads": 0}, {"tile_size": 4}, {"margin": -1.0}])
def test_render_config_validation(kw):
    with pytest.raises(ValueError):
        RenderConfig(**kw)


def test_render_rejects_bad_period():
    with pytest.raises(ValueError):
        render_xset(GridSpec(0, 1, 0, 1, 1, 1), 13)


def test_render_examples():
    g = render_xset(GridSpec(-0.1, 0.1, -0.1, 0.1, 1, 1), 8)
    assert g.pixel_class.tolist() == [[IN_M]]
    g = render_xset(GridSpec(2.9, 3.1, -0.1, 0.1, 8, 8), 8)
    assert np.all(g.pixel_class == NOT_DETECTED)


@pytest.fixture(scope="module")
def collar():
    spec = GridSpec(-0.85, -0.65, -0.1, 0.1, 12, 12)
    return spec, render_xset(spec, 5, cfg=RenderConfig(tile_size=8))


def test_in_m_iff_escape_test(collar):
    spec, g = collar
    for (r, q), c in np.ndenumerate(spec.centers()):
        assert (g.pixel_class[r, q] == IN_M) == mandelbrot_member(c, g.escape_budget).in_mandelbrot


def test_smallest_period_minimality(collar):
    spec, g = collar
    detected = list(zip(*np.nonzero(g.pixel_class > 0)))
    assert detected
    for r, q in detected:
        c = spec.centers()[r, q]
        p = int(g.pixel_class[r, q])
        if p > 1:
            assert classify_parameter(c, p - 1)[0] == NOT_DETECTED
        ds = build_yc(c, p)
        assert ds.origin_signed_distance < 0


def test_continuation_and_threads_invariance(collar):
    spec, g = collar
    off = render_xset(spec, 5, cfg=RenderConfig(tile_size=8, continuation=False))
    two = render_xset(spec, 5, cfg=RenderConfig(tile_size=8, threads=2))
    assert np.array_equal(g.pixel_class, off.pixel_class)
    assert np.array_equal(g.pixel_class, two.pixel_class)


def test_supersample_runs():
    g = render_xset(GridSpec(-0.85, -0.65, -0.1, 0.1, 4, 4), 4, cfg=RenderConfig(supersample=True))
    assert g.supersample and g.pixel_class.shape == (4, 4)


def test_incomplete_orbits_downgrade(monkeypatch):
    real = atlas.find_periodic_points

    def broken(c, n, *a, **k):
        ps = real(c, n, *a, **k)
        return PointSet(ps.points[:-1], n, ps.expected, ps.stages) if n == 2 else ps

    monkeypatch.setattr(atlas, "find_periodic_points", broken)
    g = render_xset(GridSpec(2.9, 3.1, -0.1, 0.1, 2, 2), 4)
    assert np.all(g.pixel_class == NOT_DETECTED)
    assert g.incomplete_counts == {2: 4}


def test_default_threads(monkeypatch):
    monkeypatch.setenv("MULTATLAS_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("MULTATLAS_THREADS", "zero")
    with pytest.raises(ValueError):
        default_threads()
    monkeypatch.delenv("MULTATLAS_THREADS")
    assert default_threads() >= 1


def test_probe_examples():
    d = averaging_density_probe(0, 0.5, [2])
    assert d[2] < 1e-14
    d = averaging_density_probe(0, -0.25, range(3, 13))
    assert min(d[n] for n in range(9, 13)) < min(d[n] for n in range(3, 6))
    assert d.incomplete == []


def test_probe_far_outside_trend():
    # midpoint of the period-2 nu and one fixed-point nu at c = 10
    ds = build_yc(10, 2)
    target = (ds.nu_points[1][0] + ds.nu_points[2][0]) / 2
    d = averaging_density_probe(10, target, range(1, 13))
    assert min(d[n] for n in range(9, 13)) < min(d[n] for n in range(1, 5))
