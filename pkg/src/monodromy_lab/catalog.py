"""Built-in integrable systems and the plain-text system definition format.

System definition file (UTF-8)::

    # comments start with '#'
    [system]
    name = champagne
    F1 = 0.5*(y1^2 + y2^2) - (x1^2 + x2^2) + (x1^2 + x2^2)^2
    F2 = x1*y2 - x2*y1
    s1_index = 2            # optional, 1 or 2
    seed = 0, 0, 0, 0       # optional, repeatable, 4 reals

Keys are case-sensitive. ``F1``/``F2`` use the grammar of :mod:`.expr`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import expr
from .errors import ParseError, UnknownSystemError
from .geometry import SystemDescriptor, gradients, moment_map


@dataclass(frozen=True)
class CatalogEntry:
    """A built-in system plus metadata used only by tests and docs."""

    system: SystemDescriptor
    config: str | None
    citation: str
    expected_critical_values: tuple = ()
    expected_types: tuple = ()
    extended: bool = False


@dataclass(frozen=True)
class ParsedSystem:
    name: str
    f1: expr.Expr
    f2: expr.Expr
    s1_index: int | None = None
    seeds: tuple = ()
    gradient_exprs: tuple = field(default=(), repr=False)


# --------------------------------------------------------------------------
# built-ins (hand-written numerics; their config text is cross-checked in tests)


def _linear_focus() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        return np.array([x1 * y1 + x2 * y2, x1 * y2 - x2 * y1])

    def dF(x):
        x1, y1, x2, y2 = x
        return np.array([[y1, x1, y2, x2], [y2, -x2, -y1, x1]])

    return SystemDescriptor("linear-focus", F, dF, s1_index=2, known_equilibria=(np.zeros(4),),
                            fiber_seed=(1.0, 0.0, 0.0, 0.0),
                            description="focus-focus normal form x1*y1+x2*y2, x1*y2-x2*y1")


def _linear_elliptic() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        return np.array([x1 * x1 + y1 * y1, x2 * x2 + y2 * y2])

    def dF(x):
        x1, y1, x2, y2 = x
        return np.array([[2 * x1, 2 * y1, 0.0, 0.0], [0.0, 0.0, 2 * x2, 2 * y2]])

    return SystemDescriptor("linear-elliptic", F, dF, known_equilibria=(np.zeros(4),),
                            fiber_seed=(0.7, 0.2, 0.5, -0.3),
                            description="elliptic-elliptic normal form")


def _linear_hyperbolic() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        return np.array([x1 * y1, x2 * y2])

    def dF(x):
        x1, y1, x2, y2 = x
        return np.array([[y1, x1, 0.0, 0.0], [0.0, 0.0, y2, x2]])

    return SystemDescriptor("linear-hyperbolic", F, dF, known_equilibria=(np.zeros(4),),
                            fiber_seed=(0.7, 0.2, 0.5, -0.3),
                            description="hyperbolic-hyperbolic normal form")


def _linear_elliptic_hyperbolic() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        return np.array([x1 * x1 + y1 * y1, x2 * y2])

    def dF(x):
        x1, y1, x2, y2 = x
        return np.array([[2 * x1, 2 * y1, 0.0, 0.0], [0.0, 0.0, y2, x2]])

    return SystemDescriptor("linear-elliptic-hyperbolic", F, dF, known_equilibria=(np.zeros(4),),
                            fiber_seed=(0.7, 0.2, 0.5, -0.3),
                            description="elliptic-hyperbolic normal form")


def _oscillators() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        return np.array([0.5 * (x1 * x1 + y1 * y1), 0.5 * (x2 * x2 + y2 * y2)])

    def dF(x):
        x1, y1, x2, y2 = x
        return np.array([[x1, y1, 0.0, 0.0], [0.0, 0.0, x2, y2]])

    return SystemDescriptor("oscillators", F, dF, known_equilibria=(np.zeros(4),),
                            fiber_seed=(1.0, 0.0, 1.0, 0.0),
                            description="two decoupled unit-frequency harmonic oscillators")


def _champagne() -> SystemDescriptor:
    def F(x):
        x1, y1, x2, y2 = x
        r2 = x1 * x1 + x2 * x2
        return np.array([0.5 * (y1 * y1 + y2 * y2) - r2 + r2 * r2, x1 * y2 - x2 * y1])

    def dF(x):
        x1, y1, x2, y2 = x
        k = -2.0 + 4.0 * (x1 * x1 + x2 * x2)
        return np.array([[k * x1, y1, k * x2, y2], [y2, -x2, -y1, x1]])

    return SystemDescriptor("champagne", F, dF, s1_index=2, known_equilibria=(np.zeros(4),),
                            fiber_seed=(1.0, 0.0, 0.0, 0.0),
                            description="champagne bottle potential -r^2 + r^4 with angular momentum")


# spherical pendulum on {|q| = 1, q.p = 0} in R^6, coordinates (q1, p1, q2, p2, q3, p3)


def _pendulum_F(x):
    q1, p1, q2, p2, q3, p3 = x
    return np.array([0.5 * (p1 * p1 + p2 * p2 + p3 * p3) + q3, q1 * p2 - q2 * p1])


def _pendulum_dF(x):
    q1, p1, q2, p2, q3, p3 = x
    return np.array([[0.0, p1, 0.0, p2, 1.0, p3], [p2, -q2, -p1, q1, 0.0, 0.0]])


def _pendulum_constraint(x):
    q1, p1, q2, p2, q3, p3 = x
    g = np.array([0.5 * (q1 * q1 + q2 * q2 + q3 * q3 - 1.0), q1 * p1 + q2 * p2 + q3 * p3])
    G = np.array([[q1, 0.0, q2, 0.0, q3, 0.0], [p1, q1, p2, q2, p3, q3]])
    return g, G


def _pendulum_project(x):
    q = np.array(x[0::2], dtype=float)
    p = np.array(x[1::2], dtype=float)
    norm = np.linalg.norm(q)
    q = q / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
    p -= np.dot(q, p) * q
    out = np.empty(6)
    out[0::2] = q
    out[1::2] = p
    return out


def _spherical_pendulum() -> SystemDescriptor:
    return SystemDescriptor(
        "spherical-pendulum", _pendulum_F, _pendulum_dF, s1_index=2,
        known_equilibria=(np.array([0, 0, 0, 0, -1.0, 0]), np.array([0, 0, 0, 0, 1.0, 0])),
        dim=6, constraint=_pendulum_constraint, project=_pendulum_project,
        fiber_seed=(0.6, 0.0, 0.0, 0.3, 0.8, 0.0), extended=True,
        description="unit spherical pendulum H = |p|^2/2 + q3, J = q1 p2 - q2 p1, embedded in R^6",
    )


_LINEAR_CITATION = "Williamson normal forms for non-degenerate rank-0 points of 2-degree-of-freedom systems"

_CONFIGS = {
    "linear-focus": ("x1*y1 + x2*y2", "x1*y2 - x2*y1", 2),
    "linear-elliptic": ("x1^2 + y1^2", "x2^2 + y2^2", None),
    "linear-hyperbolic": ("x1*y1", "x2*y2", None),
    "linear-elliptic-hyperbolic": ("x1^2 + y1^2", "x2*y2", None),
    "oscillators": ("0.5*(x1^2 + y1^2)", "0.5*(x2^2 + y2^2)", None),
    "champagne": ("0.5*(y1^2 + y2^2) - (x1^2 + x2^2) + (x1^2 + x2^2)^2", "x1*y2 - x2*y1", 2),
}


def render_config(name: str, f1: str, f2: str, s1_index=None, seeds=()) -> str:
    lines = ["[system]", f"name = {name}", f"F1 = {f1}", f"F2 = {f2}"]
    if s1_index is not None:
        lines.append(f"s1_index = {s1_index}")
    for s in seeds:
        lines.append("seed = " + ", ".join(repr(float(v)) for v in s))
    return "\n".join(lines) + "\n"


def _entry(system: SystemDescriptor, citation: str, values=(), types=()) -> CatalogEntry:
    cfg = None
    if system.name in _CONFIGS:
        f1, f2, s1 = _CONFIGS[system.name]
        cfg = render_config(system.name, f1, f2, s1, [tuple(p) for p in system.known_equilibria])
    return CatalogEntry(system, cfg, citation, tuple(values), tuple(types), system.extended)


def _build_catalog() -> dict[str, CatalogEntry]:
    return {
        "linear-focus": _entry(_linear_focus(), _LINEAR_CITATION, [(0.0, 0.0)], ["FocusFocus"]),
        "linear-elliptic": _entry(_linear_elliptic(), _LINEAR_CITATION, [(0.0, 0.0)], ["EllipticElliptic"]),
        "linear-hyperbolic": _entry(_linear_hyperbolic(), _LINEAR_CITATION, [(0.0, 0.0)], ["HyperbolicHyperbolic"]),
        "linear-elliptic-hyperbolic": _entry(_linear_elliptic_hyperbolic(), _LINEAR_CITATION,
                                             [(0.0, 0.0)], ["EllipticHyperbolic"]),
        "oscillators": _entry(_oscillators(), "decoupled harmonic oscillators", [(0.0, 0.0)], ["EllipticElliptic"]),
        "champagne": _entry(_champagne(), "champagne bottle (Bates 1991); a Garnier-type system",
                            [(0.0, 0.0)], ["FocusFocus"]),
        "spherical-pendulum": _entry(_spherical_pendulum(), "spherical pendulum (Duistermaat 1980)",
                                     [(-1.0, 0.0), (1.0, 0.0)], ["EllipticElliptic", "FocusFocus"]),
    }


CATALOG = _build_catalog()


def names() -> list[str]:
    return list(CATALOG)


def entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownSystemError(name, CATALOG) from None


def builtin(name: str) -> SystemDescriptor:
    return entry(name).system


def builtin_config(name: str) -> str:
    cfg = entry(name).config
    if cfg is None:
        raise ValueError(f"{name} has no 4-variable text form")
    return cfg


# --------------------------------------------------------------------------
# text format

_KEYS = ("name", "F1", "F2", "s1_index", "seed")


def parse_definition(text: str) -> ParsedSystem:
    """Parse a system definition document into expression trees."""
    fields: dict = {"seed": []}
    in_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip())
        if stripped.startswith("["):
            if stripped != "[system]":
                raise ParseError(f"unknown section {stripped!r}", lineno, indent + 1)
            if in_section:
                raise ParseError("duplicate [system] section", lineno, indent + 1)
            in_section = True
            continue
        if not in_section:
            raise ParseError("expected [system] section header", lineno, indent + 1)
        if "=" not in body:
            raise ParseError("expected 'key = value'", lineno, indent + 1)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        value = value_part.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, indent + 1)
        if key != "seed" and key in fields:
            raise ParseError(f"duplicate key {key!r}", lineno, indent + 1)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, value_col)
        if key in ("F1", "F2"):
            fields[key] = expr.parse(value, lineno, value_col)
        elif key == "s1_index":
            if value not in ("1", "2"):
                raise ParseError("s1_index must be 1 or 2", lineno, value_col)
            fields[key] = int(value)
        elif key == "seed":
            parts = value.split(",")
            try:
                seed = tuple(float(p) for p in parts)
            except ValueError:
                raise ParseError("seed must be 4 comma-separated reals", lineno, value_col) from None
            if len(seed) != 4 or not all(math.isfinite(v) for v in seed):
                raise ParseError("seed must be 4 comma-separated finite reals", lineno, value_col)
            fields["seed"].append(seed)
        else:
            fields[key] = value
    if not in_section:
        raise ParseError("missing [system] section", 1, 1)
    last = len(text.splitlines()) or 1
    for key in ("name", "F1", "F2"):
        if key not in fields:
            raise ParseError(f"missing key {key!r}", last, 1)
    f1, f2 = fields["F1"], fields["F2"]
    return ParsedSystem(fields["name"], f1, f2, fields.get("s1_index"), tuple(fields["seed"]),
                        (expr.gradient(f1), expr.gradient(f2)))


def descriptor_from_parsed(parsed: ParsedSystem) -> SystemDescriptor:
    f1 = expr.compile_function(parsed.f1)
    f2 = expr.compile_function(parsed.f2)
    g1 = [expr.compile_function(d) for d in parsed.gradient_exprs[0]]
    g2 = [expr.compile_function(d) for d in parsed.gradient_exprs[1]]

    def F(x):
        a = (float(x[0]), float(x[1]), float(x[2]), float(x[3]))
        return np.array([f1(*a), f2(*a)])

    def dF(x):
        a = (float(x[0]), float(x[1]), float(x[2]), float(x[3]))
        return np.array([[g(*a) for g in g1], [g(*a) for g in g2]])

    seeds = tuple(np.array(s) for s in parsed.seeds)
    return SystemDescriptor(parsed.name, F, dF, s1_index=parsed.s1_index, known_equilibria=seeds,
                            fiber_seed=parsed.seeds[0] if parsed.seeds else None,
                            description=f"F1 = {expr.to_source(parsed.f1)}; F2 = {expr.to_source(parsed.f2)}")


def parse_system(text: str) -> SystemDescriptor:
    return descriptor_from_parsed(parse_definition(text))


def load_system(path) -> SystemDescriptor:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def resolve(name: str | None = None, path=None) -> SystemDescriptor:
    if path is not None:
        return load_system(path)
    if name is None:
        raise UnknownSystemError("<none>", CATALOG)
    return builtin(name)


def recombine(system: SystemDescriptor, A) -> SystemDescriptor:
    """System with moment map ``A @ F`` for a constant invertible 2x2 ``A``."""
    A = np.asarray(A, dtype=float)
    if abs(np.linalg.det(A)) < 1e-12:
        raise ValueError("recombination matrix must be invertible")

    def F(x):
        return A @ moment_map(system, x)

    def dF(x):
        return A @ gradients(system, x)

    return replace(system, name=f"{system.name}*A", evaluate=F, gradient=dF, s1_index=None)


def scaled(system: SystemDescriptor, factor: float) -> SystemDescriptor:
    return recombine(system, factor * np.eye(2))
