"""File output: Y_c CSV and SVG figures, X-set PNG images and manifests.

All writers are deterministic: no timestamps, fixed float formatting, and a
fixed SVG id salt, so equal inputs give byte-identical files.
"""
import csv
import json
from pathlib import Path

import numpy as np

from .atlas import DEFAULT_PALETTE, IN_M

CSV_HEADER = ("period", "nu_re", "nu_im", "rho_re", "rho_im", "repelling")


def fmt(x):
    return format(float(x), ".17g")


def _writable(path):
    path = Path(path)
    if path.parent and not path.parent.exists():
        raise OSError(f"directory does not exist: {path.parent}")
    return path


def write_yc_csv(ds, path):
    """One row per orbit with a defined nu, in period order."""
    path = _writable(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for n in range(1, ds.max_period + 1):
            for o in ds.orbits.get(n, []):
                if o.nu is None:
                    continue
                w.writerow([n, fmt(o.nu.real), fmt(o.nu.imag), fmt(o.multiplier.real),
                            fmt(o.multiplier.imag), int(o.repelling)])
    return path


def emit_yc_figure(ds, path):
    """SVG of the nu points (coloured by period), their hull and the origin.

    A CSV companion with the same stem is written next to the figure.
    Returns (svg_path, csv_path).
    """
    import matplotlib
    from matplotlib.figure import Figure

    path = _writable(path)
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(1, 1, 1)
    colors = _palette_rgb(DEFAULT_PALETTE, ds.max_period)
    for n in range(1, ds.max_period + 1):
        pts = np.asarray(ds.nu_points.get(n, []), dtype=complex)
        if len(pts):
            ax.scatter(pts.real, pts.imag, s=10, color=np.array(colors[n - 1]) / 255,
                       label=f"period {n}", zorder=3)
    v = ds.hull.vertices
    if len(v) >= 2:
        loop = np.vstack([v, v[:1]])
        ax.plot(loop[:, 0], loop[:, 1], color="0.3", lw=0.8, zorder=2)
    ax.plot([0], [0], marker="+", color="k", ms=12, mew=1.5, zorder=4)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("Re nu")
    ax.set_ylabel("Im nu")
    c = ds.c.value
    d = ds.origin_signed_distance
    ax.set_title(f"c = {c.real:g}{c.imag:+g}i, periods <= {ds.max_period}, d(0) = {d:.3g}")
    if any(len(p) for p in ds.nu_points.values()):
        ax.legend(fontsize=7, loc="best")
    with matplotlib.rc_context({"svg.hashsalt": "multatlas", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path, write_yc_csv(ds, path.with_suffix(".csv"))


def _hex_to_rgb(h):
    h = h.lstrip("#")
    if len(h) != 6:
        raise ValueError(f"bad colour {h!r}; expected #rrggbb")
    return tuple(int(h[i:i + 2], 16) for i in (0, 2, 4))


def _palette_rgb(palette, max_period):
    cols = [_hex_to_rgb(h) for h in palette]
    if not cols:
        raise ValueError("palette is empty")
    while len(cols) < max_period:
        cols.append(cols[-1])
    return cols


def colorize(grid, palette=DEFAULT_PALETTE):
    """(H, W, 3) uint8 image: IN_M black, NOT_DETECTED white, period p -> palette[p-1]."""
    pc = grid.pixel_class
    img = np.full(pc.shape + (3,), 255, dtype=np.uint8)
    img[pc == IN_M] = 0
    for p, rgb in enumerate(_palette_rgb(palette, grid.max_period), start=1):
        img[pc == p] = rgb
    return img


def xset_manifest(grid, palette=DEFAULT_PALETTE, extra=None):
    m = {
        "bounds": {"xmin": grid.spec.xmin, "xmax": grid.spec.xmax,
                   "ymin": grid.spec.ymin, "ymax": grid.spec.ymax},
        "resolution": {"width": grid.width, "height": grid.height},
        "sample_point": "2x2 supersample" if grid.supersample else "pixel center",
        "max_period": grid.max_period,
        "escape_budget": grid.escape_budget,
        "margin": grid.margin,
        "palette": {"IN_M": "#000000", "NOT_DETECTED": "#ffffff",
                    "X_WITH_PERIOD": list(palette)},
        "class_counts": grid.class_counts(),
        "incomplete_counts": {str(p): int(k) for p, k in sorted(grid.incomplete_counts.items())},
    }
    if extra:
        m.update(extra)
    return m


def write_json(obj, path):
    path = _writable(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def emit_xset_image(grid, path, palette=DEFAULT_PALETTE, extra=None):
    """Write the PNG and a JSON manifest with the same stem.

    Returns (png_path, manifest_path).
    """
    from PIL import Image

    path = _writable(path)
    Image.fromarray(colorize(grid, palette), mode="RGB").save(path, format="PNG")
    man = write_json(xset_manifest(grid, palette, extra), path.with_suffix(".json"))
    return path, man
