"""Command line front end.

Exit codes: 0 success, 1 bad input, 2 internal invariant violation,
3 a checked property failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algebra import SeriesError, pretty, to_text
from .mctrees import MCError, diagram_of, enumerate_trees, input_from_diagram, solve
from .plotting import PlotError, amoeba_svg, broken_lines_svg, diagram_svg
from .scattering import (
    DiagramError,
    InvariantError,
    ScatteringDiagram,
    added_rays,
    complete,
    crossings_along,
    diagram_from_dict,
    diagram_to_json,
    is_consistent,
)
from .tropical import (
    Fan,
    broken_lines,
    check_generic,
    potential_at,
    scattering_diagram,
    wall_crossing_report,
)

OK, BAD_INPUT, INTERNAL, CHECK_FAILED = 0, 1, 2, 3


class InputError(ValueError):
    pass


# ------------------------------------------------------------------------------
# parsing helpers


def parse_point(text: str) -> tuple[Fraction, Fraction]:
    try:
        a, b = text.split(",")
        return Fraction(a.strip()), Fraction(b.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad point {text!r}: expected 'x,y' with rational coordinates") from exc


def parse_points(text: str | None) -> list[tuple[Fraction, Fraction]]:
    if not text or not text.strip():
        return []
    return [parse_point(chunk) for chunk in text.split(";") if chunk.strip()]


def parse_bounds(text: str | None):
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad bounds {text!r}") from exc
    if len(vals) != 4:
        raise InputError("bounds need four numbers: xmin,ymin,xmax,ymax")
    return tuple(vals)


def read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_diagram(path: str, order: int | None = None) -> ScatteringDiagram:
    data = read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    if order is not None:
        data = dict(data, order=order)
    try:
        return diagram_from_dict(data)
    except (DiagramError, SeriesError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_fan(name: str | None) -> Fan:
    if name is None or name.upper() == "P2":
        return Fan.p2()
    if name.upper() in ("P1XP1", "P1P1"):
        return Fan.p1xp1()
    data = read_json(name)
    try:
        return Fan.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{name}: {exc}") from exc


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def random_points(fan: Fan, k: int, seed: int) -> list[tuple[Fraction, Fraction]]:
    rng = random.Random(seed)
    while True:
        pts = [(Fraction(rng.randint(-300, 300), 97), Fraction(rng.randint(-300, 300), 89)) for _ in range(k)]
        try:
            check_generic(fan, pts)
            return pts
        except DiagramError:
            continue


# ------------------------------------------------------------------------------
# commands


def cmd_scatter_complete(args) -> int:
    d0 = load_diagram(args.input, args.order)
    d = complete(d0)
    cert = is_consistent(d)
    emit(diagram_to_json(d), args.out)
    report = cert.to_text() + f"added {len(added_rays(d0, d))} ray(s)\n"
    (sys.stdout if args.out else sys.stderr).write(report)
    return OK if cert.consistent else INTERNAL


def cmd_scatter_check(args) -> int:
    d = load_diagram(args.input, args.order)
    cert = is_consistent(d)
    sys.stdout.write(cert.to_text())
    return OK if cert.consistent else CHECK_FAILED


def _points_from(args, fan):
    if args.random is not None:
        return random_points(fan, args.random, args.seed)
    return parse_points(args.points)


def cmd_potential(args) -> int:
    fan = load_fan(args.fan)
    pts = _points_from(args, fan)
    fmt = to_text if args.format == "canonical" else pretty
    d = scattering_diagram(fan, pts, args.order)
    if args.at is not None:
        W = potential_at(fan, d, parse_point(args.at))
        sys.stdout.write(fmt(W) + "\n")
        return OK
    if args.from_ is None or args.to is None:
        raise InputError("give --at, or both --from and --to")
    q_plus, q_minus = parse_point(args.from_), parse_point(args.to)
    crossed = crossings_along(d, q_plus, q_minus)
    r = wall_crossing_report(fan, d, q_plus, q_minus)
    sys.stdout.write(f"W(from) = {fmt(potential_at(fan, d, q_plus))}\n")
    sys.stdout.write(f"W(to)   = {fmt(r.direct)}\n")
    sys.stdout.write(f"Theta(W(from)) = {fmt(r.transported)}\n")
    sys.stdout.write(f"walls crossed: {len(crossed)}\n")
    if r.holds:
        sys.stdout.write(f"wall-crossing identity holds mod t^{args.order}\n")
        return OK
    sys.stdout.write(f"wall-crossing identity FAILS mod t^{args.order}\n")
    return CHECK_FAILED


def cmd_mctrees(args) -> int:
    d0 = load_diagram(args.input, args.order)
    sol = solve(input_from_diagram(d0), d0.order)
    sys.stdout.write(sol.to_text())
    if args.trees:
        sys.stdout.write("trees:\n")
        for desc, value in enumerate_trees(sol.input, d0.order):
            sys.stdout.write(f"  {desc}: {value.to_text()}\n")
    mc = diagram_of(sol)
    if args.out:
        Path(args.out).write_text(diagram_to_json(mc))
    cut = min(3, d0.order)
    full = complete(d0.truncate(cut))
    if mc.truncate(cut) == full:
        sys.stdout.write(f"matches completion mod t^{cut}\n")
        return OK
    sys.stdout.write(f"differs from completion mod t^{cut}\n")
    return CHECK_FAILED


def cmd_plot(args) -> int:
    bounds = parse_bounds(args.bounds)
    if args.what == "diagram":
        if not args.input:
            raise InputError("plot diagram needs an input diagram file")
        d = load_diagram(args.input)
        emit(diagram_svg(d, bounds), args.out)
    elif args.what == "disks":
        fan = load_fan(args.fan)
        pts = _points_from(args, fan)
        if args.at is None:
            raise InputError("plot disks needs --at")
        Q = parse_point(args.at)
        d = scattering_diagram(fan, pts, args.order)
        lines = broken_lines(fan, d, Q)
        W = potential_at(fan, d, Q)
        emit(broken_lines_svg(d, lines, Q, bounds, title=f"W = {pretty(W)}"), args.out)
    else:
        if not args.input:
            raise InputError("plot amoeba needs a Laurent polynomial, e.g. '1 + z1 + z2'")
        emit(amoeba_svg(args.input, args.tbase, bounds or (-4, -4, 4, 4), args.samples, args.seed), args.out)
    return OK


# ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropvertex", description="Scattering diagrams and tropical disk counts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def order_flag(sp, default=None):
        sp.add_argument("--order", type=int, default=default, help="truncation order N (terms t^j, j < N)")

    sp = sub.add_parser("scatter-complete", help="complete a diagram file")
    sp.add_argument("input")
    order_flag(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scatter_complete)

    sp = sub.add_parser("scatter-check", help="certify consistency of a diagram file")
    sp.add_argument("input")
    order_flag(sp)
    sp.set_defaults(func=cmd_scatter_check)

    def point_flags(sp):
        sp.add_argument("--fan", help="fan JSON file, or P2 / P1xP1 (default P2)")
        sp.add_argument("--points", help='marked points "x1,y1;x2,y2"')
        sp.add_argument("--random", type=int, metavar="K", help="use K random generic points")
        sp.add_argument("--seed", type=int, default=0)
        order_flag(sp, 4)

    sp = sub.add_parser("potential", help="perturbed superpotential and wall-crossing checks")
    point_flags(sp)
    sp.add_argument("--at", help='endpoint "x,y"')
    sp.add_argument("--from", dest="from_", help="start point for a wall-crossing check")
    sp.add_argument("--to", help="end point for a wall-crossing check")
    sp.add_argument("--format", choices=["pretty", "canonical"], default="pretty")
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("mctrees", help="Maurer-Cartan tree solver on a diagram file")
    sp.add_argument("input")
    order_flag(sp)
    sp.add_argument("--out", help="write the resulting diagram here")
    sp.add_argument("--trees", action="store_true", help="also list the trees")
    sp.set_defaults(func=cmd_mctrees)

    sp = sub.add_parser("plot", help="SVG output")
    sp.add_argument("what", choices=["diagram", "disks", "amoeba"])
    sp.add_argument("input", nargs="?", help="diagram file, or the Laurent polynomial for amoeba")
    point_flags(sp)
    sp.add_argument("--at")
    sp.add_argument("--out")
    sp.add_argument("--bounds", help="xmin,ymin,xmax,ymax")
    sp.add_argument("--tbase", type=float, default=2.718281828459045)
    sp.add_argument("--samples", type=int, default=3000)
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else BAD_INPUT
    if getattr(args, "order", None) is not None and args.order < 1:
        print("error: --order must be at least 1", file=sys.stderr)
        return BAD_INPUT
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL
    except (InputError, DiagramError, SeriesError, MCError, PlotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
