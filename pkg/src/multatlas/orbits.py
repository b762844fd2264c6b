"""Periodic orbits of f_c(z) = z^2 + c.

All roots of f_c^n(z) - z are located without ever forming the degree-2^n
polynomial: f_c^n and its derivative are evaluated by iteration. The search
runs in stages, each only asked for what the previous ones missed:

1. caller-supplied seeds (parameter continuation), Newton-polished;
2. itinerary seeds from backward iteration of the two inverse branches,
   which contract onto repelling orbits;
3. Aberth-Ehrlich iteration with the roots found so far divided out;
4. retries: Newton from a start grid on two circles, then Aberth again from
   a rotated, wider circle.

Roots with (f^n)'(z) = 1 (root collisions at parabolic parameters) are never
accepted, so such parameters come back flagged incomplete.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .multipliers import EPS_CLASS, EPS_PARAB, nu_arrays

N_MAX_DEFAULT = 12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ComplexParam:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"parameter must be finite, got ({self.re}, {self.im})")

    @classmethod
    def coerce(cls, c):
        if isinstance(c, cls):
            return c
        if isinstance(c, (tuple, list)) and len(c) == 2:
            return cls(float(c[0]), float(c[1]))
        c = complex(c)
        return cls(c.real, c.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def value(self):
        return complex(self.re, self.im)


def as_complex(c):
    """Accept ComplexParam, complex, real or (re, im); reject non-finite."""
    return complex(ComplexParam.coerce(c))


class Stability(str, Enum):
    REPELLING = "repelling"
    ATTRACTING = "attracting"
    INDIFFERENT = "indifferent_parabolic_flagged"
    SUPERATTRACTING = "superattracting_flagged"


@dataclass(frozen=True)
class OrbitFinderConfig:
    newton_tol: float = 1e-13
    newton_max_iters: int = 200
    dedupe_tol: float = 1e-8
    start_multiplier: float = 2.0
    start_radius: float = 2.5
    n_max: int = N_MAX_DEFAULT
    tol_period: float = 1e-6
    eps_class: float = EPS_CLASS
    eps_parab: float = EPS_PARAB
    # roots with |(f^n)'(z) - 1| below this sit on a (near) collision and
    # cannot be located beyond ~sqrt(eps); they are rejected and flagged
    eps_collide: float = 1e-6
    max_retries: int = 3
    max_halvings: int = 20
    backward_cycles: int = 4
    aberth_max_iters: int = 500

    def __post_init__(self):
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if not self.dedupe_tol > self.newton_tol:
            raise ValueError("dedupe_tol must exceed newton_tol")
        if not self.start_multiplier >= 1:
            raise ValueError("start_multiplier must be >= 1")
        if not self.start_radius > 2:
            raise ValueError("start_radius must exceed 2")
        if not self.eps_collide >= self.eps_parab:
            raise ValueError("eps_collide must be >= eps_parab")
        if self.newton_max_iters < 1 or self.n_max < 1:
            raise ValueError("iteration and period caps must be positive")


DEFAULT_CONFIG = OrbitFinderConfig()


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple
    period: int
    multiplier: complex
    multiplier_derivative: Optional[complex]
    nu: Optional[complex]
    stability: Stability
    c: complex = 0j

    @property
    def repelling(self):
        return self.stability is Stability.REPELLING


@dataclass
class PointSet:
    """Roots of f_c^n(z) - z found for one n."""

    points: np.ndarray
    n: int
    expected: int
    stages: list = field(default_factory=list)

    @property
    def shortfall(self):
        return max(self.expected - len(self.points), 0)

    @property
    def incomplete(self):
        return len(self.points) != self.expected

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points.tolist())


@dataclass
class OrbitBlock:
    """Exact-period-n orbits as a (k, n) array, plus bookkeeping."""

    c: complex
    n: int
    cycles: np.ndarray
    roots: np.ndarray
    incomplete: bool
    inconsistent: int = 0
    lower: np.ndarray = None


def iterate_map(c, z, n):
    """f_c^n(z) and (f_c^n)'(z) along the forward orbit of z.

    Returns ``(value, z_derivative, escaped)``; ``escaped`` is True when the
    modulus passed 1e150 part way through, in which case value and derivative
    are the last representable iterates.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = as_complex(c)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    w, d, escaped = _kernels.iterate(z, c, int(n))
    return complex(w), complex(d), bool(escaped)


def root_radius(c):
    """Radius beyond which |f_c(z)| > |z|; every periodic point lies inside."""
    return 0.5 + math.sqrt(0.25 + abs(c))


def effective_dedupe_tol(c, n, cfg=DEFAULT_CONFIG):
    """Relative dedupe tolerance for period n at c.

    The configured tolerance is capped by a floor on how close two distinct
    period-n points can be; for large |c| the Julia set is a Cantor set whose
    level-n pieces shrink like (2 sqrt|c|)^-n, so a fixed 1e-8 would merge
    distinct roots.
    """
    floor = 0.01 * (2.0 * (1.0 + math.sqrt(abs(c)))) ** (-(n - 1))
    return max(min(cfg.dedupe_tol, floor), 1e3 * _EPS)


class _Collector:
    def __init__(self, c, n, cfg):
        self.c, self.n, self.cfg = c, n, cfg
        self.expected = 1 << n
        self.tol = effective_dedupe_tol(c, n, cfg)
        self.points = np.empty(0, dtype=complex)
        self.stages = []

    @property
    def missing(self):
        return self.expected - len(self.points)

    def add(self, cands, label):
        cfg = self.cfg
        z, _, ok = _kernels.polish_many(
            np.ascontiguousarray(cands, dtype=complex),
            self.c, self.n, cfg.newton_tol, cfg.newton_max_iters, cfg.max_halvings,
        )
        ok = _kernels.reject_multiple(z, ok, self.c, self.n, cfg.eps_collide)
        allz = np.concatenate([self.points, z])
        allok = np.concatenate([np.ones(len(self.points), dtype=bool), ok])
        keep = _kernels.first_unique(allz, allok, self.tol)
        self.points = allz[keep]
        self.stages.append((label, len(self.points)))


def _circle(count, radius, phase):
    k = np.arange(count)
    return radius * np.exp(1j * (2 * np.pi * (k + 0.5) / count + phase))


def find_periodic_points(c, n, cfg=None, seeds=None, seed_param=None):
    """All roots of f_c^n(z) - z, deduplicated.

    ``seeds`` are tried first. If ``seed_param`` is given they are taken to
    be periodic points at that nearby parameter and are carried over to c
    along their own orbits before polishing.

    Returns a :class:`PointSet`; ``incomplete`` is True when fewer than 2^n
    distinct roots could be certified (root collisions at parabolic
    parameters, or a search failure after all retries).
    """
    cfg = cfg or DEFAULT_CONFIG
    c = as_complex(c)
    n = int(n)
    if not 1 <= n <= cfg.n_max:
        raise ValueError(f"period must be in 1..{cfg.n_max}, got {n}")
    col = _Collector(c, n, cfg)
    R = root_radius(c)

    if seeds is not None and len(seeds):
        seeds = np.ascontiguousarray(seeds, dtype=complex)
        if seed_param is not None:
            seeds = _kernels.continue_seeds(seeds, as_complex(seed_param), c, n, 2)
        col.add(seeds, "seeds")
    if col.missing > 0:
        # one start on each side of the branch cut c + (-inf, 0]
        far = R + abs(c) + 1.0
        for start in (c + 1j * far, c - 1j * far):
            cands = _kernels.itinerary_seeds(c, n, cfg.backward_cycles, start)
            col.add(cands, "itinerary")
            if col.missing <= 0:
                break
    radius = max(cfg.start_radius, 1.1 * R)
    attempt = 0
    while col.missing > 0 and attempt <= cfg.max_retries:
        if attempt > 0:
            count = math.ceil(cfg.start_multiplier * (1 << n)) * (1 << (attempt - 1))
            grid = np.concatenate([
                _circle(count, radius, 0.1 * attempt),
                _circle(count, 1.0, 0.1 * attempt),
            ])
            col.add(grid, f"grid{attempt}")
            if col.missing <= 0:
                break
        k = col.missing
        init = _circle(k, radius * (1.0 + 0.25 * attempt), 0.7 + attempt)
        z, _ = _kernels.deflated_aberth(
            init, col.points.copy(), c, n, cfg.newton_tol, cfg.aberth_max_iters
        )
        col.add(z, f"aberth{attempt}")
        attempt += 1

    pts = col.points
    if len(pts) > col.expected:
        # cannot happen with exact arithmetic; treat as unresolved clustering
        pts = pts[: col.expected]
        col.stages.append(("overfull", len(col.points)))
    return PointSet(pts, n, col.expected, col.stages)


def _trace_cycles(c, n, points, cfg):
    """Follow z -> f_c(z) through the root set.

    Returns (cycles of exact length n, lower-period points, inconsistent
    count). Each cycle is rotated to start at its largest point in
    (real, imag) order; cycles are sorted the same way.
    """
    m = len(points)
    if m == 0:
        return np.empty((0, n), dtype=complex), np.empty(0, dtype=complex), 0
    pts = np.asarray(points, dtype=complex).copy()
    images = pts * pts + c
    idx, d1, d2 = _kernels.nearest_two(pts, images)
    tol = effective_dedupe_tol(c, n, cfg)
    good = (d1 <= tol * np.maximum(1.0, np.abs(images))) | (d1 < 0.1 * d2)
    nxt = np.where(good, idx, -1)

    # re-polish points whose image has no clear partner, then retry once
    bad = np.flatnonzero(~good)
    if len(bad):
        z, _, ok = _kernels.polish_many(
            pts[bad], c, n, cfg.newton_tol * 1e-2, cfg.newton_max_iters, cfg.max_halvings
        )
        pts[bad] = z
        w = z * z + c
        i2, e1, e2 = _kernels.nearest_two(pts, w)
        fixed = (e1 <= tol * np.maximum(1.0, np.abs(w))) | (e1 < 0.1 * e2)
        nxt[bad[fixed]] = i2[fixed]

    cycles, lower, inconsistent = _kernels.trace_cycles(pts, nxt.astype(np.int64), n)
    return cycles, pts[lower], int(inconsistent)


def classify(rho, eps_class=EPS_CLASS):
    a = abs(rho)
    if a > 1 + eps_class:
        return Stability.REPELLING
    if a <= eps_class:
        return Stability.SUPERATTRACTING
    if a < 1 - eps_class:
        return Stability.ATTRACTING
    return Stability.INDIFFERENT


def _make_orbits(c, cycles, cfg):
    if len(cycles) == 0:
        return []
    n = cycles.shape[1]
    rho, rho_prime, nus = nu_arrays(cycles, cfg.eps_parab, cfg.eps_class)
    out = []
    for row, r, rp, nu in zip(cycles, rho, rho_prime, nus):
        r = complex(r)
        rp = None if np.isnan(rp) else complex(rp)
        nu = None if np.isnan(nu) else complex(nu)
        out.append(PeriodicOrbit(
            tuple(complex(z) for z in row), n, r, rp, nu, classify(r, cfg.eps_class), c,
        ))
    return out


def group_into_orbits(c, n, points, cfg=None):
    """Group roots of f_c^n(z) - z into exact-period-n orbits.

    Points of smaller exact period are dropped. Points whose image cannot be
    matched even after re-polishing are skipped; :func:`orbits_of_period`
    reports how many.
    """
    cfg = cfg or DEFAULT_CONFIG
    c = as_complex(c)
    cycles, _, _ = _trace_cycles(c, int(n), np.asarray(list(points), dtype=complex), cfg)
    return _make_orbits(c, cycles, cfg)


def orbits_of_period(c, n, cfg=None, seeds=None, seed_param=None):
    """Find and group exact-period-n orbits at c into an :class:`OrbitBlock`."""
    cfg = cfg or DEFAULT_CONFIG
    c = as_complex(c)
    ps = find_periodic_points(c, n, cfg, seeds, seed_param)
    cycles, lower, bad = _trace_cycles(c, n, ps.points, cfg)
    return OrbitBlock(c, n, cycles, ps.points, ps.incomplete or bad > 0, bad, lower)


class OrbitTable(dict):
    """Mapping period -> list of PeriodicOrbit, with per-period flags.

    ``incomplete`` maps each flagged period to its root shortfall (or the
    count of inconsistent points). ``roots`` keeps every root of f^n - z for
    warm-starting a nearby parameter.
    """

    def __init__(self, c, n_max):
        super().__init__()
        self.c = c
        self.n_max = n_max
        self.incomplete = {}
        self.roots = {}

    def all_orbits(self):
        """Every orbit, any stability (the summation identity uses these)."""
        return [o for n in sorted(self) for o in self[n]]

    def repelling_orbits(self):
        """Only repelling orbits (what Y_c and the X classifier use)."""
        return [o for o in self.all_orbits() if o.repelling]

    def counts(self):
        return {n: len(v) for n, v in sorted(self.items())}


def orbits_up_to(c, n_max, cfg=None, warm_start=None):
    """Exact-period orbits for every period 1..n_max.

    ``warm_start`` is an OrbitTable (or mapping period -> roots) from a
    nearby parameter whose roots seed the search.
    """
    cfg = cfg or DEFAULT_CONFIG
    c = as_complex(c)
    if not 1 <= n_max <= cfg.n_max:
        raise ValueError(f"n_max must be in 1..{cfg.n_max}")
    table = OrbitTable(c, n_max)
    seed_param = getattr(warm_start, "c", None)
    for n in range(1, n_max + 1):
        seeds = _warm_seeds(warm_start, n)
        ps = find_periodic_points(c, n, cfg, seeds, seed_param)
        cycles, _, bad = _trace_cycles(c, n, ps.points, cfg)
        table[n] = _make_orbits(c, cycles, cfg)
        table.roots[n] = ps.points
        if ps.incomplete or bad:
            table.incomplete[n] = ps.shortfall or bad
    return table


def _warm_seeds(warm, n):
    if warm is None:
        return None
    roots = getattr(warm, "roots", warm)
    return roots.get(n) if hasattr(roots, "get") else None


def expected_orbit_count(n):
    """Number of exact-period-n orbits of a generic quadratic polynomial."""
    points = {}
    for k in range(1, n + 1):
        points[k] = 2**k - sum(points[d] for d in range(1, k) if k % d == 0)
    return points[n] // n

