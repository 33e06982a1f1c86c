"""Command-line entry point.

Exit codes: 0 success, 2 bad input, 3 numerical failure. Results go to
stdout as JSON (and optionally to ``--json``); errors go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import catalog
from .bifurcation import grid_points, normalize_region, scan_bifurcation
from .errors import InputError, MonodromyLabError, NumericalError
from .lattice import FiberConfig, LatticeConfig, LoopPath, TransportConfig, lattice_at_value
from .model import HOLONOMY_RELATION, model_affine_holonomy, model_monodromy
from .monodromy import AmbiguousCycleError, fixed_cycle, monodromy_around, vanishing_cycle
from .report import RunReport
from .svg import diagram_svg, write_svg
from .williamson import classify_equilibrium, find_equilibria

log = logging.getLogger("monodromy_lab")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
DEFAULT_BOX = (-1.5, 1.5)
MIN_RADIUS = 1e-3


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what}: expected {n} numbers, got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise UsageError(f"{what}: numbers must be finite")
    return vals


def _box(text: str, dim: int) -> list[tuple[float, float]]:
    """``lo:hi`` for every axis, or ``lo:hi,lo:hi,...`` with one pair per axis."""
    pairs = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise UsageError(f"--box: expected lo:hi, got {part!r}")
        try:
            pairs.append((float(bits[0]), float(bits[1])))
        except ValueError:
            raise UsageError(f"--box: non-numeric bound in {part!r}") from None
    try:
        return normalize_region(pairs[0] if len(pairs) == 1 else pairs, dim)
    except ValueError as exc:
        raise UsageError(f"--box: {exc}") from None


def _system(args):
    if args.file is None and args.system is None:
        raise UsageError("one of --system NAME or --file PATH is required")
    if args.file is not None:
        try:
            return catalog.load_system(args.file)
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    return catalog.builtin(args.system)


def _lattice_config(args) -> LatticeConfig:
    return LatticeConfig() if args.tol is None else LatticeConfig(flow_tol=args.tol)


def _fiber_config(args) -> FiberConfig:
    return FiberConfig(rng_seed=args.seed_rng)


# --------------------------------------------------------------------------
# commands


def cmd_classify(args, report: RunReport) -> None:
    system = _system(args)
    zero_tol = 1e-9 if args.tol is None else args.tol
    if args.all_seeds:
        region = _box(args.box, system.dim) if args.box else normalize_region(DEFAULT_BOX, system.dim)
        seeds = list(system.known_equilibria) + list(grid_points(region, args.grid))
        dropped: list = []
        points = find_equilibria(system, seeds, dropped)
        report.diagnostics["seeds_dropped"] = len(dropped)
        report.inputs["region"] = region
    elif args.point is not None:
        points = [np.array(_floats(args.point, system.dim, "--point"))]
    else:
        raise UsageError("classify needs --point x1,... or --all-seeds")
    out = []
    for x in points:
        rep = classify_equilibrium(system, x, zero_tol=zero_tol)
        out.append({"point": np.asarray(x).tolist(), **rep.to_json()})
    report.inputs["zero_tol"] = zero_tol
    report.outputs["reports"] = out


def cmd_scan(args, report: RunReport) -> None:
    system = _system(args)
    region = _box(args.box, system.dim) if args.box else normalize_region(DEFAULT_BOX, system.dim)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    diagram = scan_bifurcation(system, region, args.grid)
    report.inputs.update(region=region, grid=args.grid)
    report.outputs["critical_values"] = [cv.to_json() for cv in diagram.critical_values]
    for d in diagram.diagnostics:
        report.diagnostics.update(d)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["c1", "c2", "type"])
            for cv in diagram.critical_values:
                w.writerow([repr(cv.value[0]), repr(cv.value[1]), cv.tag])
    if args.svg:
        write_svg(args.svg, diagram_svg([(cv.value, cv.tag) for cv in diagram.critical_values],
                                        title=f"{system.name}: critical values"))


def cmd_lattice(args, report: RunReport) -> None:
    system = _system(args)
    if args.value is None:
        raise UsageError("lattice needs --value c1,c2")
    c = _floats(args.value, 2, "--value")
    seed = None if args.point is None else _floats(args.point, system.dim, "--point")
    cfg = _lattice_config(args)
    lat = lattice_at_value(system, c, seed=seed, config=cfg, fiber=_fiber_config(args))
    report.inputs.update(value=c, config=asdict(cfg))
    report.outputs["lattice"] = lat.to_json()


def cmd_monodromy(args, report: RunReport) -> None:
    system = _system(args)
    if args.center is None or args.radius is None:
        raise UsageError("monodromy needs --center c1,c2 and --radius r")
    center = _floats(args.center, 2, "--center")
    if not args.radius > MIN_RADIUS:
        raise UsageError(f"--radius must exceed {MIN_RADIUS:g} (continuation exclusion zone)")
    if args.samples < 3:
        raise UsageError("--samples must be at least 3")
    loop = LoopPath.circle(center, args.radius, args.samples)
    seed = None if args.point is None else _floats(args.point, system.dim, "--point")
    cfg = _lattice_config(args)
    M = monodromy_around(system, loop, seed=seed, config=cfg, fiber=_fiber_config(args))
    try:
        v, w = list(vanishing_cycle(M)), list(fixed_cycle(M))
    except (AmbiguousCycleError, NumericalError):
        v = w = None
    report.inputs.update(center=center, radius=args.radius, samples=args.samples, config=asdict(cfg),
                         transport=asdict(TransportConfig()))
    report.outputs.update(M.to_json())
    report.outputs.update(identity=M.is_identity(), unipotent=M.is_unipotent(), twist=M.twist(),
                          vanishing_cycle=v, fixed_cycle=w)
    report.outputs["start_basis"] = M.start.basis.tolist()
    report.outputs["final_basis"] = M.final.basis.tolist()
    report.diagnostics.update(asdict(M.stats))
    if args.svg:
        region = _box(args.box, system.dim) if args.box else normalize_region(DEFAULT_BOX, system.dim)
        diagram = scan_bifurcation(system, region, args.grid)
        write_svg(args.svg, diagram_svg([(cv.value, cv.tag) for cv in diagram.critical_values],
                                        loop=loop.values, title=f"{system.name}: loop"))


def cmd_model(args, report: RunReport) -> None:
    n = args.pinch_points
    if n is None or n < 1:
        raise UsageError("--pinch-points must be a positive integer")
    M = model_monodromy(n)
    report.inputs["pinch_points"] = n
    report.outputs.update(matrix=[list(r) for r in M.entries], det=M.det, trace=M.trace,
                          affine_holonomy=[list(r) for r in model_affine_holonomy(n)],
                          holonomy_relation=HOLONOMY_RELATION, vanishing_cycle=list(vanishing_cycle(M)), fixed_cycle=list(fixed_cycle(M)))


def cmd_list(args, report: RunReport) -> None:
    rows = []
    for name in catalog.names():
        e = catalog.entry(name)
        rows.append({"name": name, "dim": e.system.dim, "s1_index": e.system.s1_index,
                     "extended": e.extended, "description": e.system.description})
    report.outputs["systems"] = rows


COMMANDS = {
    "classify": cmd_classify,
    "scan": cmd_scan,
    "lattice": cmd_lattice,
    "monodromy": cmd_monodromy,
    "model": cmd_model,
    "list-systems": cmd_list,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--system", metavar="NAME")
    src.add_argument("--file", metavar="PATH")
    common.add_argument("--json", metavar="PATH", help="also write the report here")
    common.add_argument("--csv", metavar="PATH")
    common.add_argument("--svg", metavar="PATH")
    common.add_argument("--tol", type=float, help="zero tolerance (classify) or flow tolerance")
    common.add_argument("--seed-rng", type=int, default=0, help="restart sequence for fiber search")

    parser = _Parser(prog="monodromy-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("classify", parents=[common])
    p.add_argument("--point")
    p.add_argument("--all-seeds", action="store_true")
    p.add_argument("--box")
    p.add_argument("--grid", type=int, default=5)
    p = sub.add_parser("scan", parents=[common])
    p.add_argument("--box")
    p.add_argument("--grid", type=int, default=5)
    p = sub.add_parser("lattice", parents=[common])
    p.add_argument("--value")
    p.add_argument("--point", help="seed for the fiber search")
    p = sub.add_parser("monodromy", parents=[common])
    p.add_argument("--center")
    p.add_argument("--radius", type=float)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--point", help="seed for the fiber search")
    p.add_argument("--box", help="scan region for --svg")
    p.add_argument("--grid", type=int, default=5)
    p = sub.add_parser("model", parents=[common])
    p.add_argument("--pinch-points", type=int)
    sub.add_parser("list-systems", parents=[common])
    return parser


# flags whose values may start with '-' (e.g. --box -1.5:1.5), which argparse would take for options
_VALUE_FLAGS = ("--box", "--point", "--center", "--value")


def _join_values(argv: list) -> list:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2] != "-":
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _configure_logging() -> None:
    level = os.environ.get("MONODROMY_LAB_LOG", "error").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(_join_values(argv))
        if args.command is None:
            raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
        report = RunReport(argv, getattr(args, "system", None) or getattr(args, "file", None))
        COMMANDS[args.command](args, report)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        hint = " (try raising --samples)" if argv[:1] == ["monodromy"] else ""
        print(f"numerical failure: {type(exc).__name__}: {exc}{hint}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MonodromyLabError as exc:  # pragma: no cover - hierarchy is exhaustive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report.wall_time = time.perf_counter() - t0
    text = report.dumps()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
