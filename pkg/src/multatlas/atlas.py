"""Y_c datasets and the parameter-plane X renderer.

A parameter c outside the Mandelbrot set belongs to X exactly when 0 lies in
the closed convex hull of the nu values of its repelling orbits. The renderer
approximates this with periods 1..max_period and colours each pixel by the
smallest period at which the hull first swallows the origin.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import _kernels
from .dynamics import ESCAPE_RADIUS, RENDER_BUDGET
from .hull import COLLINEARITY_TOL, HullPolygon, convex_hull, hull_origin_distance, signed_distance
from .multipliers import nu_arrays
from .orbits import (
    DEFAULT_CONFIG,
    ComplexParam,
    OrbitFinderConfig,
    OrbitTable,
    _trace_cycles,
    as_complex,
    find_periodic_points,
    orbits_of_period,
    orbits_up_to,
)

logger = logging.getLogger(__name__)

IN_M = -1
NOT_DETECTED = 0
MAX_RENDER_PERIOD = 12

# period 1 first, period 8 dark red
DEFAULT_PALETTE = (
    "#3b4cc0",
    "#2c8fd6",
    "#1fb5a8",
    "#5cbf3a",
    "#d9c627",
    "#f28e1c",
    "#d9411e",
    "#8b0000",
)


def default_threads():
    env = os.environ.get("MULTATLAS_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"MULTATLAS_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError("MULTATLAS_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------- Y_c ----


@dataclass
class YcDataset:
    """nu values of repelling orbits at one parameter, with their hull.

    ``orbits`` keeps the full orbit table (all stabilities) for the CSV
    export; ``nu_points`` and ``hull`` only see repelling orbits.
    """

    c: ComplexParam
    max_period: int
    nu_points: Dict[int, List[complex]]
    hull: HullPolygon
    origin_signed_distance: float
    incomplete_periods: List[int]
    orbits: Optional[OrbitTable] = field(default=None, repr=False)

    def all_nu(self):
        return np.array([v for n in sorted(self.nu_points) for v in self.nu_points[n]], dtype=complex)


def build_yc(c, max_period, cfg=None):
    """Collect nu over repelling orbits of periods 1..max_period at c.

    Incomplete orbit sets are listed in ``incomplete_periods`` rather than
    raised; whatever was found still enters the hull.
    """
    cfg = cfg or DEFAULT_CONFIG
    param = ComplexParam.coerce(c)
    table = orbits_up_to(param.value, int(max_period), cfg)
    nu_points = {}
    for n in range(1, max_period + 1):
        nu_points[n] = [o.nu for o in table[n] if o.repelling and o.nu is not None]
    pts = [v for n in nu_points for v in nu_points[n]]
    hull = convex_hull(np.array(pts, dtype=complex))
    dist = math.inf if hull.is_empty else signed_distance(hull, (0.0, 0.0))
    return YcDataset(param, int(max_period), nu_points, hull, dist, sorted(table.incomplete), table)


# ------------------------------------------------------------ renderer ----


@dataclass(frozen=True)
class GridSpec:
    """Pixel grid over the rectangle [xmin, xmax] x [ymin, ymax].

    Row 0 is the top edge (largest imaginary part), as in an image.
    """

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    width: int
    height: int

    def __post_init__(self):
        vals = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("bounds must be finite")
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("bounds must be a nonempty rectangle (xmin < xmax, ymin < ymax)")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")

    @property
    def bounds(self):
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def column_centers(self):
        dx = (self.xmax - self.xmin) / self.width
        return self.xmin + (np.arange(self.width) + 0.5) * dx

    def row_centers(self):
        dy = (self.ymax - self.ymin) / self.height
        return self.ymax - (np.arange(self.height) + 0.5) * dy

    def centers(self):
        x = self.column_centers()
        y = self.row_centers()
        return x[None, :] + 1j * y[:, None]


@dataclass(frozen=True)
class RenderConfig:
    threads: int = 1
    tile_size: int = 32
    continuation: bool = True
    margin: float = 0.0
    supersample: bool = False
    finder: OrbitFinderConfig = DEFAULT_CONFIG
    image_path: Optional[str] = None
    manifest_path: Optional[str] = None

    def __post_init__(self):
        if int(self.threads) < 1:
            raise ValueError("threads must be >= 1")
        if int(self.tile_size) < 8:
            raise ValueError("tile_size must be >= 8")
        if not (math.isfinite(self.margin) and self.margin >= 0):
            raise ValueError("margin must be a finite non-negative number")


@dataclass
class XGrid:
    """Classified pixels.

    ``pixel_class`` holds IN_M (-1), NOT_DETECTED (0) or the detecting
    period p >= 1. ``incomplete_counts[p]`` counts pixels downgraded to
    NOT_DETECTED because the period-p orbit set could not be completed.
    """

    spec: GridSpec
    max_period: int
    escape_budget: int
    margin: float
    pixel_class: np.ndarray
    incomplete_counts: Dict[int, int]
    supersample: bool = False

    @property
    def bounds(self):
        return self.spec.bounds

    @property
    def width(self):
        return self.spec.width

    @property
    def height(self):
        return self.spec.height

    def class_counts(self):
        pc = self.pixel_class
        out = {"IN_M": int(np.sum(pc == IN_M)), "NOT_DETECTED": int(np.sum(pc == NOT_DETECTED))}
        for p in range(1, self.max_period + 1):
            out[f"X_WITH_PERIOD_{p}"] = int(np.sum(pc == p))
        return out


def classify_parameter(c, max_period, escape_budget=RENDER_BUDGET, margin=0.0,
                       cfg=None, prev=None):
    """Classify one parameter.

    Parameters
    ----------
    prev : tuple (c_prev, roots) or None
        Periodic points found at a neighbouring parameter, used as seeds.

    Returns
    -------
    cls : int
        IN_M, NOT_DETECTED or the smallest detecting period.
    roots : dict
        period -> roots of f^n - z found here (empty for IN_M).
    incomplete_period : int
        The period whose orbit set was incomplete, or 0.
    """
    cfg = cfg or DEFAULT_CONFIG
    c = complex(c)
    it, _ = _kernels.escape_time(c, int(escape_budget), ESCAPE_RADIUS)
    if it < 0:
        return IN_M, {}, 0
    c_prev, prev_roots = prev if prev is not None else (None, {})
    roots = {}
    xs = np.empty(0)
    ys = np.empty(0)
    thr = 1.0 + cfg.eps_class
    for n in range(1, max_period + 1):
        seeds = prev_roots.get(n)
        ps = find_periodic_points(c, n, cfg, seeds, c_prev if seeds is not None else None)
        roots[n] = ps.points
        if ps.incomplete:
            return NOT_DETECTED, roots, n
        cycles, _, bad = _trace_cycles(c, n, ps.points, cfg)
        if bad:
            return NOT_DETECTED, roots, n
        if len(cycles):
            rho, _, nu = nu_arrays(cycles, cfg.eps_parab, cfg.eps_class)
            keep = (np.abs(rho) > thr) & np.isfinite(nu)
            xs = np.concatenate((xs, nu.real[keep]))
            ys = np.concatenate((ys, nu.imag[keep]))
        if len(xs) and hull_origin_distance(xs, ys, COLLINEARITY_TOL) < -margin:
            return n, roots, 0
    return NOT_DETECTED, roots, 0


def _combine(samples):
    # most frequent class; ties go to IN_M, then smaller periods, then NOT_DETECTED
    vals, counts = np.unique(samples, return_counts=True)
    best = counts.max()
    cands = [int(v) for v, k in zip(vals, counts) if k == best]
    order = lambda v: (0, 0) if v == IN_M else ((2, 0) if v == NOT_DETECTED else (1, v))
    return min(cands, key=order)


def _render_tile(job):
    """Classify one tile in serpentine order. Runs in a worker process."""
    xs, ys, max_period, budget, margin, cfg, continuation, offsets = job
    out = np.zeros((len(ys), len(xs)), dtype=np.int16)
    incomplete = np.zeros(max_period + 1, dtype=np.int64)
    prev = None
    for r, y in enumerate(ys):
        cols = range(len(xs)) if r % 2 == 0 else range(len(xs) - 1, -1, -1)
        for q in cols:
            samples = []
            for ox, oy in offsets:
                c = complex(xs[q] + ox, y + oy)
                cls, roots, bad = classify_parameter(
                    c, max_period, budget, margin, cfg, prev if continuation else None)
                if roots:
                    prev = (c, roots)
                if bad:
                    incomplete[bad] += 1
                samples.append(cls)
            out[r, q] = samples[0] if len(samples) == 1 else _combine(samples)
    return out, incomplete


def render_xset(grid_spec, max_period, escape_budget=RENDER_BUDGET, cfg=None):
    """Classify every pixel of ``grid_spec``.

    Pixels are sampled at their centres (or on a 2x2 sub-grid with
    ``cfg.supersample``). Tiles are independent, so results do not depend on
    the worker count.
    """
    cfg = cfg or RenderConfig()
    if not 1 <= max_period <= MAX_RENDER_PERIOD:
        raise ValueError(f"max_period must be in 1..{MAX_RENDER_PERIOD}")
    if escape_budget < 1:
        raise ValueError("escape_budget must be >= 1")
    xs = grid_spec.column_centers()
    ys = grid_spec.row_centers()
    if cfg.supersample:
        hx = 0.25 * (grid_spec.xmax - grid_spec.xmin) / grid_spec.width
        hy = 0.25 * (grid_spec.ymax - grid_spec.ymin) / grid_spec.height
        offsets = ((-hx, hy), (hx, hy), (hx, -hy), (-hx, -hy))
    else:
        offsets = ((0.0, 0.0),)
    T = int(cfg.tile_size)
    jobs, slots = [], []
    for r0 in range(0, grid_spec.height, T):
        for q0 in range(0, grid_spec.width, T):
            jobs.append((xs[q0:q0 + T], ys[r0:r0 + T], int(max_period), int(escape_budget),
                         float(cfg.margin), cfg.finder, bool(cfg.continuation), offsets))
            slots.append((r0, q0))
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(int(cfg.threads), len(jobs))) as ex:
            results = list(ex.map(_render_tile, jobs))
    else:
        results = [_render_tile(j) for j in jobs]
    pixels = np.empty((grid_spec.height, grid_spec.width), dtype=np.int16)
    incomplete = np.zeros(max_period + 1, dtype=np.int64)
    for (r0, q0), (block, inc) in zip(slots, results):
        pixels[r0:r0 + block.shape[0], q0:q0 + block.shape[1]] = block
        incomplete += inc
    counts = {p: int(incomplete[p]) for p in range(1, max_period + 1) if incomplete[p]}
    if counts:
        logger.warning("pixels downgraded to NOT_DETECTED by incomplete orbit sets: %s", counts)
    return XGrid(grid_spec, int(max_period), int(escape_budget), float(cfg.margin),
                 pixels, counts, bool(cfg.supersample))


# --------------------------------------------------------------- probe ----


class ProbeDistances(dict):
    """period -> min |nu - target|; ``incomplete`` lists flagged periods."""

    def __init__(self, c, target):
        super().__init__()
        self.c = c
        self.target = target
        self.incomplete = []


def averaging_density_probe(c, target, periods, cfg=None):
    """Distance from ``target`` to the nearest repelling-orbit nu of each period.

    Periods with no repelling orbit get ``inf``. Incomplete orbit sets are
    still measured and listed in ``incomplete``.
    """
    cfg = cfg or DEFAULT_CONFIG
    c = as_complex(c)
    target = complex(target)
    out = ProbeDistances(c, target)
    for n in periods:
        block = orbits_of_period(c, int(n), cfg)
        if block.incomplete:
            out.incomplete.append(int(n))
        d = math.inf
        if len(block.cycles):
            rho, _, nu = nu_arrays(block.cycles, cfg.eps_parab, cfg.eps_class)
            keep = (np.abs(rho) > 1.0 + cfg.eps_class) & np.isfinite(nu)
            if keep.any():
                d = float(np.min(np.abs(nu[keep] - target)))
        out[int(n)] = d
    return out
