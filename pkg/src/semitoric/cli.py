"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numeric
failure.  Errors are reported on stderr as a one-line JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import dh, serialize, svg, systems
from .affine import as_rational, format_rational, is_finite
from .cuts import (
    SemitoricError,
    canonical_form,
    flip,
    orbit,
    validate,
)
from .polygon import PolygonError, area

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CommandFailed(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def num(x: float):
    """Float rounded to 12 significant digits for JSON output."""
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    v = float(f"{x:.12g}")
    return 0.0 if v == 0 else v


def fmt(x: float) -> str:
    v = num(x)
    return v if isinstance(v, str) else f"{v:.12g}"


def _read_semitoric(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return serialize.loads_semitoric(text)


def _write_svg(path: Optional[str], content: str):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)


def _bits(text: str) -> tuple[int, ...]:
    cleaned = text.replace(",", "").replace(" ", "")
    if not cleaned or any(ch not in "01" for ch in cleaned):
        raise UsageError(f"--bits expects a string of 0/1, got {text!r}")
    return tuple(int(ch) for ch in cleaned)


def _truncation(values):
    if values is None:
        return None
    try:
        return tuple(as_rational(v) for v in values)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--truncate expects two rationals: {exc}") from exc


def _parse_t(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --t value {text!r}") from exc


# --- polygon ------------------------------------------------------------


def cmd_polygon(args, out) -> int:
    sp = _read_semitoric(args.file)
    if args.action == "validate":
        report = validate(sp)
        out.write(serialize.dumps({
            "valid": report.ok,
            "issues": [{"code": i.code, "message": i.message} for i in report.issues],
        }))
        _write_svg(args.svg, svg.polygon_svg(sp))
        return EXIT_OK if report.ok else EXIT_INVALID
    if args.action == "canonical":
        result = canonical_form(sp)
        out.write(serialize.dump_semitoric(result))
        _write_svg(args.svg, svg.polygon_svg(result))
        return EXIT_OK
    if args.action == "flip":
        if args.bits is None:
            raise UsageError("polygon flip needs --bits")
        bits = _bits(args.bits)
        if len(bits) != sp.m_f:
            raise UsageError(f"--bits has length {len(bits)} but there are {sp.m_f} cuts")
        result = flip(sp, bits)
        out.write(serialize.dump_semitoric(result))
        _write_svg(args.svg, svg.polygon_svg(result))
        return EXIT_OK
    if args.action == "orbit":
        elements = orbit(sp)
        out.write(serialize.dumps([
            {"bits": "".join(map(str, e.bits)), "duplicate_of": e.duplicate_of,
             "polygon": serialize.semitoric_to_dict(e.polygon)}
            for e in elements
        ]))
        return EXIT_OK
    if args.action == "area":
        value = area(sp.polygon, _truncation(args.truncate))
        out.write(serialize.dumps({"area": format_rational(value)}))
        return EXIT_OK
    raise UsageError(f"unknown polygon action {args.action}")


# --- dh -------------------------------------------------------------------


def _sample_csv(f: dh.DHFunction, samples: int, lo, hi) -> str:
    lo, hi = Fraction(lo), Fraction(hi)
    xs = {lo + (hi - lo) * Fraction(i, samples) for i in range(samples + 1)} if samples > 0 else set()
    xs |= {b for b in f.breakpoints if lo <= b <= hi}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f.variable, "rho", f"{f.variable}_exact", "rho_exact"])
    for x in sorted(xs):
        v = f(x)
        w.writerow([fmt(float(x)), fmt(float(v)), format_rational(x), format_rational(v)])
    return buf.getvalue()


def _emit_density(f: dh.DHFunction, args, out, span):
    if args.format == "csv":
        out.write(_sample_csv(f, args.samples, *span))
    else:
        out.write(serialize.dumps(f.to_dict()))
    _write_svg(args.svg, svg.density_svg(f))


def cmd_dh(args, out) -> int:
    sp = _read_semitoric(args.file)
    if args.action == "rho-j":
        f = dh.rho_J(sp)
        poly = sp.polygon
        bp = f.breakpoints
        lo = poly.xmin if is_finite(poly.xmin) else bp[0] - 2
        hi = poly.xmax if is_finite(poly.xmax) else bp[-1] + 2
        _emit_density(f, args, out, (lo, hi))
        return EXIT_OK
    if args.action == "rho-k":
        f = dh.rho_K(sp, _truncation(args.truncate))
        _emit_density(f, args, out, (f.breakpoints[0], f.breakpoints[-1]))
        return EXIT_OK
    if args.action == "jumps":
        out.write(serialize.dumps([j.to_dict() for j in dh.jumps(sp)]))
        return EXIT_OK
    if args.action == "compactness":
        out.write(serialize.dumps(dh.compactness_report(sp).to_dict()))
        return EXIT_OK
    raise UsageError(f"unknown dh action {args.action}")


# --- system -----------------------------------------------------------------


def _model(args) -> systems.SystemModel:
    t = _parse_t(args.t)
    radii = None
    if args.radii:
        try:
            radii = tuple(Fraction(r) for r in args.radii)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError("--radii expects two positive numbers") from exc
        if min(radii) <= 0:
            raise UsageError("--radii must be positive")
    return systems.make_model(args.model, t, radii)


def _x_grid(model, n: int, x_max: float):
    if n < 0:
        raise UsageError("--grid must be non-negative")
    if n == 0:
        return []
    return systems.default_grid(model, n, x_max)


def _complex(z: complex):
    return {"re": num(z.real), "im": num(z.imag)}


def cmd_system(args, out) -> int:
    model = _model(args)
    if args.action == "sample":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "h_minus", "h_plus", "f2_top", "volume", "volume_mc"])
        for x in _x_grid(model, args.grid, args.x_max):
            lo, hi = model.boundary_at(x)
            f2 = model.developing_map(x, hi)
            vol = model.volume(x)
            mc = model.volume_monte_carlo(x, samples=args.mc_samples, seed=args.seed)
            w.writerow([fmt(x), fmt(lo), fmt(hi), fmt(f2), fmt(vol), fmt(mc)])
        out.write(buf.getvalue())
        return EXIT_OK
    if args.action == "classify":
        points = []
        for p in model.critical_points_rank0():
            c = model.classify_singularity(p)
            j, h = model.eval_moment(p)
            points.append({"label": p.label, "J": num(j), "H": num(h), "class": c.kind,
                           "eigenvalues": [_complex(z) for z in c.eigenvalues]})
        out.write(serialize.dumps({"model": model.kind, "t": num(model.t), "points": points}))
        return EXIT_OK
    if args.action == "focus-interval":
        n = max(args.grid, 2)
        ts = [args.t_min + (args.t_max - args.t_min) * i / (n - 1) for i in range(n)]
        intervals = systems.focus_interval(model, ts)
        out.write(serialize.dumps({"model": model.kind,
                                   "intervals": [[num(a), num(b)] for a, b in intervals]}))
        return EXIT_OK
    if args.action == "polygonize":
        rep = systems.polygonize_report(model, _x_grid(model, args.grid, args.x_max), args.tol)
        data = serialize.semitoric_to_dict(rep.semitoric)
        if args.report:
            data = {"polygon": data,
                    "vertex_error": num(rep.vertex_error),
                    "residuals": [num(r) for r in rep.residuals],
                    "raw_vertices": [[num(x), num(y)] for x, y in rep.raw_vertices],
                    "unsnapped": rep.unsnapped}
        out.write(serialize.dumps(data))
        _write_svg(args.svg, svg.polygon_svg(rep.semitoric))
        return EXIT_OK
    raise UsageError(f"unknown system action {args.action}")


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semitoric", description="Semi-toric moment polygons and DH measures.")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    pg = sub.add_parser("polygon", help="validate and transform polygon files")
    pg.add_argument("action", choices=["validate", "canonical", "flip", "orbit", "area"])
    pg.add_argument("file", help="polygon JSON ('-' for stdin)")
    pg.add_argument("--bits", help="flip selector such as 101")
    pg.add_argument("--truncate", nargs=2, metavar=("A", "B"))
    pg.add_argument("--svg", metavar="PATH", help="also write a drawing")
    pg.set_defaults(handler=cmd_polygon)

    dg = sub.add_parser("dh", help="Duistermaat-Heckman densities and jumps")
    dg.add_argument("action", choices=["rho-j", "rho-k", "jumps", "compactness"])
    dg.add_argument("file", help="polygon JSON ('-' for stdin)")
    dg.add_argument("--truncate", nargs=2, metavar=("A", "B"))
    dg.add_argument("--format", choices=["json", "csv"], default="json")
    dg.add_argument("--samples", type=int, default=20, help="CSV sample count")
    dg.add_argument("--svg", metavar="PATH")
    dg.set_defaults(handler=cmd_dh)

    sg = sub.add_parser("system", help="the example integrable systems")
    sg.add_argument("action", choices=["sample", "classify", "focus-interval", "polygonize"])
    sg.add_argument("--model", choices=["spin-oscillator", "coupled-sz"], required=True)
    sg.add_argument("--t", default="1/2", help="coupling parameter (decimal or p/q)")
    sg.add_argument("--radii", nargs=2, metavar=("S", "N"))
    sg.add_argument("--grid", type=int, default=41)
    sg.add_argument("--tol", type=float, default=1e-2)
    sg.add_argument("--seed", type=int, default=0)
    sg.add_argument("--x-max", type=float, default=3.0, help="sampling cutoff for unbounded J")
    sg.add_argument("--t-min", type=float, default=-0.5)
    sg.add_argument("--t-max", type=float, default=1.5)
    sg.add_argument("--mc-samples", type=int, default=100000)
    sg.add_argument("--report", action="store_true", help="include fit diagnostics")
    sg.add_argument("--svg", metavar="PATH")
    sg.set_defaults(handler=cmd_system)
    return parser


def _fail(err, kind: str, message: str, code: int) -> int:
    err.write(json.dumps({"error": kind, "message": message, "exit": code}) + "\n")
    return code


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if getattr(args, "seed", 0) < 0:
            raise UsageError("--seed must be an unsigned integer")
        return args.handler(args, out)
    except UsageError as exc:
        return _fail(err, "UsageError", str(exc), EXIT_USAGE)
    except (systems.FitFailure, systems.ValidationFailure, systems.OutOfRange,
            systems.EmptyLevelSet, systems.NotCritical) as exc:
        return _fail(err, type(exc).__name__, str(exc), EXIT_NUMERIC)
    except (SemitoricError, PolygonError, dh.DHError) as exc:
        return _fail(err, type(exc).__name__, str(exc), EXIT_INVALID)
    except ValueError as exc:
        return _fail(err, "UsageError", str(exc), EXIT_USAGE)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
