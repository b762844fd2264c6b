"""Command-line interface: ``multatlas {orbits,yc,xset,verify}``.

Settings resolve as flags > config file (TOML, optionally one table per
subcommand) > built-in defaults. Every run writes a JSON manifest echoing
the resolved settings.
"""
import argparse
import csv
import logging
import re
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .atlas import DEFAULT_PALETTE, GridSpec, RenderConfig, build_yc, default_threads, render_xset
from .dynamics import RENDER_BUDGET
from .orbits import DEFAULT_CONFIG, _make_orbits, orbits_of_period
from .output import emit_xset_image, emit_yc_figure, fmt, write_json
from .verify import CHECKS, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3

DEFAULTS = {
    "orbits": {"c": None, "period": None, "out": None, "allow_partial": False},
    "yc": {"c": None, "max_period": 8, "out_prefix": "yc"},
    "xset": {
        "bounds": "-2.5,1.5,-2,2", "res": "400x400", "max_period": 8,
        "escape_iters": RENDER_BUDGET, "threads": None, "tile_size": 32,
        "continuation": True, "margin": 0.0, "supersample": False, "out": "xset.png",
    },
    "verify": {"seed": 0, "only": None, "k": None},
}

# options whose values may start with '-'
_VALUE_OPTS = ("--c", "--bounds")

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


class UsageError(Exception):
    pass


def parse_complex(text):
    """Parse "a,b" or "a+bi" (also "a-bi", "bi", "a"; i or j)."""
    s = str(text).strip().replace(" ", "")
    if "," in s:
        parts = s.split(",")
        if len(parts) != 2:
            raise UsageError(f"cannot parse complex number {text!r}")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise UsageError(f"cannot parse complex number {text!r}") from None
    m = re.fullmatch(rf"({_NUM})?(?:({_NUM}|[+-])?[ij])?", s)
    if not s or m is None:
        raise UsageError(f"cannot parse complex number {text!r}")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_bounds(text):
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise UsageError(f"bounds must be xmin,xmax,ymin,ymax, got {text!r}") from None
    if len(vals) != 4:
        raise UsageError(f"bounds must be xmin,xmax,ymin,ymax, got {text!r}")
    return vals


def parse_res(text):
    m = re.fullmatch(r"(\d+)[xX](\d+)", str(text).strip())
    if not m:
        raise UsageError(f"resolution must be WIDTHxHEIGHT, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def parse_periods(text):
    """"5" -> [5]; "1-8" or "1..8" -> [1, ..., 8]."""
    s = str(text).strip()
    m = re.fullmatch(r"(\d+)(?:(?:-|\.\.)(\d+))?", s)
    if not m:
        raise UsageError(f"period must be N or A-B, got {text!r}")
    a = int(m.group(1))
    b = int(m.group(2) or a)
    if a < 1 or b < a:
        raise UsageError(f"bad period range {text!r}")
    return list(range(a, b + 1))


def _fold_values(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="multatlas", description="Multiplier atlas for z^2 + c.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--out-dir", default=".", help="where manifests and relative outputs go")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("orbits", help="periodic orbits, multipliers and nu at one c")
    s.add_argument("--c", help='parameter, "re,im" or "re+imi"')
    s.add_argument("--period", help="period N or range A-B")
    s.add_argument("--out", help="CSV file (default: stdout)")
    s.add_argument("--allow-partial", action="store_true", default=None,
                   help="exit 0 even if some orbit set is incomplete")

    s = sub.add_parser("yc", help="nu points, hull and figure at one c")
    s.add_argument("--c", help='parameter, "re,im" or "re+imi"')
    s.add_argument("--max-period", type=int)
    s.add_argument("--out-prefix", help="writes PREFIX.svg, PREFIX.csv, PREFIX.json")

    s = sub.add_parser("xset", help="render the parameter-plane classification")
    s.add_argument("--bounds", help="xmin,xmax,ymin,ymax")
    s.add_argument("--res", help="WIDTHxHEIGHT")
    s.add_argument("--max-period", type=int)
    s.add_argument("--escape-iters", type=int)
    s.add_argument("--threads", type=int, help="workers (default: $MULTATLAS_THREADS or CPU count)")
    s.add_argument("--tile-size", type=int)
    s.add_argument("--continuation", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--margin", type=float)
    s.add_argument("--supersample", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--out", help="PNG path; the manifest goes next to it")

    s = sub.add_parser("verify", help="run the numerical self-check battery")
    s.add_argument("--seed", type=int)
    s.add_argument("--only", help=f"comma-separated subset of: {','.join(CHECKS)}")
    s.add_argument("--k", type=int, help="largest k for the summation and Vieta checks")
    return p


def load_config(path, command):
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    flat.update(data.get(command, {}))
    unknown = set(flat) - set(DEFAULTS[command])
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    return flat


def resolve(args):
    cfg = dict(DEFAULTS[args.command])
    cfg.update(load_config(args.config, args.command))
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _resolve_path(out_dir, path):
    p = Path(path)
    return p if p.is_absolute() else Path(out_dir) / p


def _manifest(command, cfg, **extra):
    m = {"tool": "multatlas", "version": __version__, "command": command, "config": cfg}
    m.update(extra)
    return m


def cmd_orbits(cfg, out_dir):
    if cfg["c"] is None or cfg["period"] is None:
        raise UsageError("orbits needs --c and --period")
    c = parse_complex(cfg["c"])
    periods = parse_periods(cfg["period"])
    if periods[-1] > DEFAULT_CONFIG.n_max:
        raise UsageError(f"period must be <= {DEFAULT_CONFIG.n_max}")
    header = ["period", "z_re", "z_im", "rho_re", "rho_im", "rho_prime_re", "rho_prime_im",
              "nu_re", "nu_im", "stability"]
    rows = []
    incomplete = []
    for n in periods:
        blk = orbits_of_period(c, n)
        if blk.incomplete:
            incomplete.append(n)
        for o in _make_orbits(c, blk.cycles, DEFAULT_CONFIG):
            rp = o.multiplier_derivative
            nu = o.nu
            rows.append([n, fmt(o.points[0].real), fmt(o.points[0].imag),
                         fmt(o.multiplier.real), fmt(o.multiplier.imag),
                         "" if rp is None else fmt(rp.real), "" if rp is None else fmt(rp.imag),
                         "" if nu is None else fmt(nu.real), "" if nu is None else fmt(nu.imag),
                         o.stability.value])
    if cfg["out"]:
        path = _resolve_path(out_dir, cfg["out"])
        fh = open(path, "w", newline="", encoding="utf-8")
    else:
        path, fh = None, sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path is not None:
            fh.close()
    write_json(_manifest("orbits", cfg, incomplete_periods=incomplete,
                         output=None if path is None else str(path)),
               Path(out_dir) / "orbits_manifest.json")
    if incomplete:
        print(f"incomplete orbit sets for periods {incomplete}", file=sys.stderr)
        if not cfg["allow_partial"]:
            return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_yc(cfg, out_dir):
    if cfg["c"] is None:
        raise UsageError("yc needs --c")
    c = parse_complex(cfg["c"])
    n = int(cfg["max_period"])
    if not 1 <= n <= DEFAULT_CONFIG.n_max:
        raise UsageError(f"max-period must be in 1..{DEFAULT_CONFIG.n_max}")
    ds = build_yc(c, n)
    prefix = _resolve_path(out_dir, cfg["out_prefix"])
    svg, csv_path = emit_yc_figure(ds, prefix.with_suffix(".svg"))
    write_json(_manifest("yc", cfg, origin_signed_distance=ds.origin_signed_distance,
                         incomplete_periods=ds.incomplete_periods,
                         outputs=[str(svg), str(csv_path)]),
               prefix.with_suffix(".json"))
    if ds.incomplete_periods:
        print(f"incomplete orbit sets for periods {ds.incomplete_periods}", file=sys.stderr)
    print(f"origin signed distance: {ds.origin_signed_distance:.6g}")
    return EXIT_OK


def cmd_xset(cfg, out_dir):
    xmin, xmax, ymin, ymax = parse_bounds(cfg["bounds"])
    w, h = parse_res(cfg["res"])
    try:
        spec = GridSpec(xmin, xmax, ymin, ymax, w, h)
        threads = cfg["threads"] if cfg["threads"] is not None else default_threads()
        rc = RenderConfig(threads=int(threads), tile_size=int(cfg["tile_size"]),
                          continuation=bool(cfg["continuation"]), margin=float(cfg["margin"]),
                          supersample=bool(cfg["supersample"]))
        grid = render_xset(spec, int(cfg["max_period"]), int(cfg["escape_iters"]), rc)
    except ValueError as e:
        raise UsageError(str(e)) from None
    resolved = dict(cfg, threads=rc.threads)
    png, man = emit_xset_image(grid, _resolve_path(out_dir, cfg["out"]), DEFAULT_PALETTE,
                               extra={"tool": "multatlas", "version": __version__,
                                      "command": "xset", "config": resolved})
    counts = grid.class_counts()
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def cmd_verify(cfg, out_dir):
    only = cfg["only"]
    if isinstance(only, str):
        only = [s for s in only.split(",") if s]
    try:
        results = run_checks(seed=int(cfg["seed"]), only=only, k=cfg["k"])
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    write_json(_manifest("verify", cfg, results=[
        {"name": r.name, "passed": r.passed, "worst": fmt(r.worst), "threshold": r.threshold}
        for r in results]), Path(out_dir) / "verify_manifest.json")
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"orbits": cmd_orbits, "yc": cmd_yc, "xset": cmd_xset, "verify": cmd_verify}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_fold_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if not Path(args.out_dir).is_dir():
            raise UsageError(f"output directory does not exist: {args.out_dir}")
        cfg = resolve(args)
        return COMMANDS[args.command](cfg, args.out_dir)
    except UsageError as e:
        print(f"multatlas {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
