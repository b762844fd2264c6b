import cmath
import math

import numpy as np
import pytest

from multatlas import _kernels
from multatlas.orbits import (
    DEFAULT_CONFIG,
    ComplexParam,
    OrbitFinderConfig,
    Stability,
    expected_orbit_count,
    find_periodic_points,
    group_into_orbits,
    iterate_map,
    orbits_of_period,
    orbits_up_to,
)

W = complex(-0.5, math.sqrt(3) / 2)  # primitive cube root of unity


def as_set(points, tol=1e-12):
    return sorted((round(z.real / tol) * tol, round(z.imag / tol) * tol) for z in points)


def close_sets(a, b, tol=1e-10):
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    for w in b:
        j = min(range(len(a)), key=lambda i: abs(a[i] - w))
        if abs(a[j] - w) > tol:
            return False
        a.pop(j)
    return True


# --- ComplexParam / config ---


def test_complex_param_rejects_non_finite():
    with pytest.raises(ValueError):
        ComplexParam(float("nan"), 0.0)
    with pytest.raises(ValueError):
        ComplexParam.coerce(complex(0, float("inf")))
    assert ComplexParam.coerce(1 - 2j).value == 1 - 2j


@pytest.mark.parametrize("kw", [
    {"newton_tol": 0.0},
    {"dedupe_tol": 1e-14},
    {"start_multiplier": 0.5},
    {"start_radius": 2.0},
])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        OrbitFinderConfig(**kw)


# --- iterate_map ---


def test_iterate_map_examples():
    assert iterate_map(0, 1, 3)[:2] == (1, 8)
    assert iterate_map(-2, 2, 1)[:2] == (2, 4)
    # 0 -> 1 -> 2 -> 5 under f_1; derivative carries the factor 2*0
    v, d, esc = iterate_map(1, 0, 3)
    assert (v, d, esc) == (5, 0, False)


def test_iterate_map_flags_escape():
    _, _, esc = iterate_map(0, 1e10, 10)
    assert esc


# --- find_periodic_points ---


def test_find_points_examples():
    assert close_sets(find_periodic_points(0, 2).points, [0, 1, W, W.conjugate()])
    assert close_sets(find_periodic_points(0, 1).points, [0, 1])
    assert close_sets(find_periodic_points(-2, 1).points, [2, -1])


def test_find_points_rejects_bad_period():
    with pytest.raises(ValueError):
        find_periodic_points(0, 0)
    with pytest.raises(ValueError):
        find_periodic_points(0, DEFAULT_CONFIG.n_max + 1)


@pytest.mark.parametrize("seed", range(5))
def test_generic_root_count_and_backward_error(seed):
    rng = np.random.default_rng(seed)
    c = complex(cmath.rect(2 * math.sqrt(rng.random()), 2 * math.pi * rng.random()))
    for n in range(1, 9):
        ps = find_periodic_points(c, n)
        assert len(ps) == 2**n and not ps.incomplete
        for z in ps.points:
            # the Newton step measures the backward error; see decisions ledger
            step = abs(_kernels.newton_ratio(z, c, n))
            assert step < 10 * DEFAULT_CONFIG.newton_tol * max(1.0, abs(z))


def test_warm_start_equivalence_and_determinism():
    c0, c1 = 0.3 + 0.5j, 0.31 + 0.49j
    cold = find_periodic_points(c1, 7)
    warm = find_periodic_points(c1, 7, seeds=find_periodic_points(c0, 7).points, seed_param=c0)
    assert warm.stages[0] == ("seeds", 128)
    assert close_sets(cold.points, warm.points, tol=DEFAULT_CONFIG.dedupe_tol)
    again = find_periodic_points(c1, 7)
    assert np.array_equal(cold.points, again.points)


def test_parabolic_collision_flagged_incomplete():
    ps = find_periodic_points(0.25, 1)  # double fixed point 1/2
    assert ps.incomplete and ps.shortfall == 2


# --- grouping ---


def test_group_examples():
    orbs = group_into_orbits(0, 2, [0, 1, W, W.conjugate()])
    assert len(orbs) == 1 and orbs[0].period == 2
    assert close_sets(orbs[0].points, [W, W.conjugate()])
    assert len(group_into_orbits(0, 1, [0, 1])) == 2


def test_generic_period_three_has_two_orbits():
    blk = orbits_of_period(0.2 - 0.6j, 3)
    assert blk.cycles.shape == (2, 3) and len(blk.roots) == 8


def test_orbit_invariants():
    c = -0.4 + 0.6j
    cfg = DEFAULT_CONFIG
    table = orbits_up_to(c, 8)
    for o in table.all_orbits():
        z = np.array(o.points)
        n = o.period
        assert np.all(np.abs(z * z + c - np.roll(z, -1)) <= 1e-9 * np.maximum(1, np.abs(z)))
        for m in range(1, n):
            if n % m == 0:
                assert abs(iterate_map(c, z[0], m)[0] - z[0]) > cfg.tol_period
        assert abs(o.multiplier - np.prod(2 * z)) <= 1e-12 * abs(o.multiplier)
        if o.stability is Stability.REPELLING:
            assert abs(o.multiplier) > 1 + cfg.eps_class
        defined = abs(o.multiplier) > cfg.eps_class and abs(o.multiplier - 1) > cfg.eps_parab
        assert (o.nu is not None) == defined
        if o.nu is not None:
            assert o.nu == pytest.approx(o.multiplier_derivative / (n * o.multiplier), rel=1e-14)


# --- orbits_up_to ---


def test_orbits_up_to_examples():
    assert orbits_up_to(0, 2).counts() == {1: 2, 2: 1}
    t = orbits_up_to(10, 3)
    assert t.counts() == {1: 2, 2: 1, 3: 2}
    assert all(o.repelling for o in t.all_orbits())


def test_orbits_at_tangency_parameter():
    # At c = -3/4 the 2-cycle has merged into the fixed point -1/2, so the
    # period-2 set is flagged rather than reported as one orbit.
    t = orbits_up_to(-0.75, 2)
    assert len(t[1]) == 2
    stab = sorted(o.stability.value for o in t[1])
    assert stab == ["indifferent_parabolic_flagged", "repelling"]
    neutral = [o for o in t[1] if not o.repelling][0]
    assert neutral.points[0] == pytest.approx(-0.5, abs=1e-12)
    assert abs(neutral.multiplier) == pytest.approx(1.0, abs=1e-12)
    assert 2 in t.incomplete and t[2] == []


def test_expected_counts():
    assert [expected_orbit_count(n) for n in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]


def test_large_parameter_cantor_case():
    t = orbits_up_to(-1e4, 6)
    assert t.counts() == {n: expected_orbit_count(n) for n in range(1, 7)}
    assert not t.incomplete
