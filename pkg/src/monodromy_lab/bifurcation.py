"""Critical values of the moment map from grid-seeded Newton searches."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NotFocusFocusValueError, NumericalError
from .geometry import (
    SystemDescriptor,
    differential_norm,
    gradients,
    hessians_at,
    moment_map,
    project_point,
    rank_defect,
    vector_fields,
)
from .williamson import (
    WilliamsonType,
    _fd_jacobian,
    classify_equilibrium,
    find_equilibria,
)

log = logging.getLogger(__name__)

VALUE_DEDUP = 1e-5
RANK_TOL = 1e-8
PINCH_VALUE_TOL = 1e-6


@dataclass(frozen=True)
class CriticalValue:
    value: tuple
    kind: str  # "equilibrium" or "rank-1"
    williamson: WilliamsonType | None
    point: tuple

    @property
    def tag(self) -> str:
        return self.williamson.value if self.williamson is not None else "rank-1"

    def to_json(self) -> dict:
        return {"value": list(self.value), "kind": self.kind, "type": self.tag, "point": list(self.point)}


@dataclass
class BifurcationDiagram:
    critical_values: list
    region: list
    resolution: int
    diagnostics: list = field(default_factory=list)

    def equilibria(self) -> list[CriticalValue]:
        return [cv for cv in self.critical_values if cv.kind == "equilibrium"]

    def rank_one(self) -> list[CriticalValue]:
        return [cv for cv in self.critical_values if cv.kind == "rank-1"]

    def to_json(self) -> dict:
        return {
            "critical_values": [cv.to_json() for cv in self.critical_values],
            "region": [list(r) for r in self.region],
            "resolution": self.resolution,
        }


def normalize_region(region, dim: int) -> list[tuple[float, float]]:
    """Accept ``(lo, hi)`` for every axis or one pair per axis."""
    arr = np.asarray(region, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (dim, 1))
    if arr.shape != (dim, 2):
        raise ValueError(f"region must be (lo, hi) or {dim} such pairs")
    if np.any(arr[:, 0] >= arr[:, 1]) or not np.all(np.isfinite(arr)):
        raise ValueError("region needs finite lo < hi on every axis")
    return [(float(a), float(b)) for a, b in arr]


def grid_points(region, grid: int) -> np.ndarray:
    if grid < 2:
        raise ValueError("grid must be at least 2 per axis")
    axes = [np.linspace(lo, hi, grid) for lo, hi in region]
    return np.array(list(itertools.product(*axes)))


def _rank1_residual(system, x, theta):
    c, s = np.cos(theta), np.sin(theta)
    if system.constraint is None:
        return c * gradients(system, x)[0] + s * gradients(system, x)[1]
    X = vector_fields(system, x)
    g, _ = system.constraint(x)
    return np.concatenate([c * X[0] + s * X[1], np.atleast_1d(g)])


def _rank1_jacobian(system, x, theta):
    c, s = np.cos(theta), np.sin(theta)
    if system.constraint is None:
        H1, H2 = hessians_at(system, x)
        G = gradients(system, x)
        return np.column_stack([c * H1 + s * H2, -s * G[0] + c * G[1]])
    z = np.append(x, theta)
    return _fd_jacobian(lambda w: _rank1_residual(system, w[:-1], w[-1]), z)


def refine_rank_one(system: SystemDescriptor, seed, max_iter: int = 60):
    """Minimal-norm Newton on ``cos(t) dF1 + sin(t) dF2 = 0``; returns a point or None."""
    x = project_point(system, np.asarray(seed, dtype=float))
    try:
        X = vector_fields(system, x)
    except NumericalError:
        return None
    _, _, vt = np.linalg.svd(X.T, full_matrices=False)
    theta = float(np.arctan2(vt[-1, 1], vt[-1, 0]))
    for _ in range(max_iter):
        try:
            r = _rank1_residual(system, x, theta)
            if np.linalg.norm(r) < 1e-14:
                break
            step = np.linalg.lstsq(_rank1_jacobian(system, x, theta), -r, rcond=None)[0]
        except (NumericalError, np.linalg.LinAlgError, ArithmeticError):
            return None
        x = project_point(system, x + step[:-1])
        theta += step[-1]
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e6:
            return None
        if np.linalg.norm(step) < 1e-15 * max(1.0, np.linalg.norm(x)):
            break
    try:
        return x if rank_defect(system, x) < RANK_TOL else None
    except NumericalError:
        return None


def _add_value(values: list, cv: CriticalValue) -> None:
    for i, other in enumerate(values):
        if np.linalg.norm(np.subtract(cv.value, other.value)) < VALUE_DEDUP:
            # equilibria take precedence over rank-1 tags at the same value
            if other.kind == "rank-1" and cv.kind == "equilibrium":
                values[i] = cv
            return
    values.append(cv)


def scan_bifurcation(system: SystemDescriptor, region, grid: int = 5, rank_one: bool = True) -> BifurcationDiagram:
    region = normalize_region(region, system.dim)
    seeds = grid_points(region, grid)
    diagnostics: list = []
    values: list[CriticalValue] = []
    eq_seeds = list(system.known_equilibria) + list(seeds)
    dropped_eq: list = []
    equilibria = find_equilibria(system, eq_seeds, dropped_eq)
    if dropped_eq:
        diagnostics.append({"equilibrium_seeds_dropped": len(dropped_eq)})
    for x in equilibria:
        try:
            report = classify_equilibrium(system, x)
        except NumericalError as exc:
            diagnostics.append({"point": x.tolist(), "reason": str(exc)})
            continue
        _add_value(values, CriticalValue(tuple(moment_map(system, x).tolist()), "equilibrium",
                                         report.type, tuple(x.tolist())))
    if rank_one:
        dropped = 0
        for seed in seeds:
            x = refine_rank_one(system, seed)
            if x is None:
                dropped += 1
                continue
            if differential_norm(system, x) < 1e-8:
                continue  # an equilibrium; handled above
            _add_value(values, CriticalValue(tuple(moment_map(system, x).tolist()), "rank-1",
                                             None, tuple(x.tolist())))
        if dropped:
            diagnostics.append({"rank1_seeds_dropped": dropped})
    values.sort(key=lambda cv: (cv.kind != "equilibrium", cv.value))
    return BifurcationDiagram(values, region, grid, diagnostics)


def count_pinch_points(system: SystemDescriptor, c, region=None, grid: int = 3) -> int:
    """Number of distinct focus-focus equilibria over the critical value ``c``."""
    c = np.asarray(c, dtype=float)
    seeds = list(system.known_equilibria)
    if region is not None:
        seeds += list(grid_points(normalize_region(region, system.dim), grid))
    count = 0
    for x in find_equilibria(system, seeds):
        if np.linalg.norm(moment_map(system, x) - c) > PINCH_VALUE_TOL:
            continue
        if classify_equilibrium(system, x).type is WilliamsonType.FOCUS_FOCUS:
            count += 1
    if count == 0:
        raise NotFocusFocusValueError(f"no focus-focus equilibrium over {c.tolist()}")
    return count
