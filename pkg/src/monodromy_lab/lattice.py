"""Regular fibers, period lattices and their continuation along paths of values.

A period lattice is the set of time pairs ``(t1, t2)`` whose joint flow
fixes a point of a Liouville torus. Basis vectors are stored as rows of a
2x2 array. When the system has a global circle action (``s1_index``), the
circle period vector (e.g. ``(0, 2*pi)``) is the second row, held exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    ContinuationStuckError,
    FiberNotFoundError,
    HorizonError,
    NumericalError,
    RegularityError,
)
from .geometry import (
    SystemDescriptor,
    differential_norm,
    flow_dense,
    flow_joint,
    gradients,
    moment_map,
    project_point,
    smallest_singular_value,
    tangent_basis,
    vector_fields,
)

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
DEFAULT_SEED = (0.7, 0.3, 0.5, -0.2)


@dataclass(frozen=True)
class LatticeConfig:
    flow_tol: float = 1e-10
    search_tol: float = 1e-8
    horizon: float = 40.0
    residual_max: float = 1e-6
    newton_target: float = 1e-10
    newton_max_iter: int = 20
    regularity_tol: float = 1e-8
    candidate_fraction: float = 0.1
    trajectory_samples: int = 8000
    circle_samples: int = 512
    critical_exclusion: float = 1e-3


@dataclass(frozen=True)
class TransportConfig:
    max_bisections: int = 12
    jump_fraction: float = 0.3


@dataclass(frozen=True)
class FiberConfig:
    tol: float = 1e-10
    max_iter: int = 60
    max_restarts: int = 20
    rng_seed: int = 0


@dataclass
class PeriodLattice:
    basis: np.ndarray  # rows T1, T2 in the (t1, t2) plane
    anchor: np.ndarray
    value: np.ndarray
    residuals: np.ndarray
    s1_row: int | None = None

    def to_json(self) -> dict:
        return {
            "basis": self.basis.tolist(),
            "anchor": self.anchor.tolist(),
            "value": self.value.tolist(),
            "residuals": self.residuals.tolist(),
        }


@dataclass(frozen=True)
class LoopPath:
    values: np.ndarray  # (k + 1, 2), first == last
    center: tuple | None = None
    radius: float | None = None
    samples: int | None = None

    @classmethod
    def circle(cls, center, radius: float, samples: int = 64, start_angle: float = 0.0) -> "LoopPath":
        if radius <= 0 or samples < 3:
            raise ValueError("circle needs radius > 0 and at least 3 samples")
        angles = start_angle + TWO_PI * np.arange(samples + 1) / samples
        c = np.asarray(center, dtype=float)
        values = c + radius * np.column_stack([np.cos(angles), np.sin(angles)])
        values[-1] = values[0]
        return cls(values, (float(c[0]), float(c[1])), float(radius), int(samples))

    @classmethod
    def from_values(cls, values) -> "LoopPath":
        return cls(np.asarray(values, dtype=float))

    @property
    def closed(self) -> bool:
        return bool(np.array_equal(self.values[0], self.values[-1]))

    def reversed(self) -> "LoopPath":
        return LoopPath(self.values[::-1].copy(), self.center, self.radius, self.samples)

    def rotated(self, k: int) -> "LoopPath":
        """Same closed loop started at sample ``k``."""
        body = self.values[:-1]
        v = np.vstack([np.roll(body, -k, axis=0), body[k % len(body)]])
        return LoopPath(v, self.center, self.radius, self.samples)


# --------------------------------------------------------------------------
# fibers


def _tangent_projector(system: SystemDescriptor, x: np.ndarray) -> np.ndarray | None:
    if system.constraint is None:
        return None
    T = tangent_basis(system, x)
    return T @ T.T


def _gauss_newton_fiber(system, c, x, cfg: FiberConfig):
    x = project_point(system, np.array(x, dtype=float))
    r = moment_map(system, x) - c
    for _ in range(cfg.max_iter):
        if np.linalg.norm(r) < 1e-2 * cfg.tol:
            break
        Jf = gradients(system, x)
        P = _tangent_projector(system, x)
        if P is not None:
            Jf = Jf @ P
        step = -np.linalg.lstsq(Jf, r, rcond=None)[0]
        alpha = 1.0
        for _ in range(30):
            trial = project_point(system, x + alpha * step)
            r_trial = moment_map(system, trial) - c
            if np.linalg.norm(r_trial) < np.linalg.norm(r):
                break
            alpha *= 0.5
        else:
            break
        x, r = trial, r_trial
    return x, float(np.linalg.norm(r))


def find_fiber_point(system: SystemDescriptor, c, seed, config: FiberConfig | None = None) -> np.ndarray:
    """A point ``x`` with ``|F(x) - c| < tol`` by minimal-norm Gauss-Newton.

    Restarts from deterministic random perturbations of ``seed``.
    """
    cfg = config or FiberConfig()
    c = np.asarray(c, dtype=float)
    seed = np.asarray(seed, dtype=float)
    rng = np.random.default_rng(cfg.rng_seed)
    scale = 0.3 * max(1.0, float(np.max(np.abs(seed))))
    best = np.inf
    for attempt in range(cfg.max_restarts + 1):
        start = seed if attempt == 0 else seed + scale * rng.standard_normal(seed.size)
        try:
            x, res = _gauss_newton_fiber(system, c, start, cfg)
        except (NumericalError, np.linalg.LinAlgError, FloatingPointError):
            continue
        if res < cfg.tol:
            return x
        best = min(best, res)
    raise FiberNotFoundError(c, best)


# --------------------------------------------------------------------------
# regularity


def known_critical_values(system: SystemDescriptor) -> list[np.ndarray]:
    out = []
    for p in system.known_equilibria:
        try:
            if differential_norm(system, p) < 1e-8:
                out.append(moment_map(system, p))
        except NumericalError:
            continue
    return out


def check_value_admissible(system: SystemDescriptor, c, exclusion: float = 1e-3) -> None:
    c = np.asarray(c, dtype=float)
    for v in known_critical_values(system):
        d = float(np.linalg.norm(c - v))
        if d < exclusion:
            raise RegularityError(
                f"value {c.tolist()} lies within {d:.2e} of critical value {v.tolist()} "
                f"(exclusion radius {exclusion:g})"
            )


def check_regular_point(system: SystemDescriptor, x, tol: float = 1e-8) -> None:
    s = smallest_singular_value(system, x)
    if s < tol:
        raise RegularityError(f"rank dF < 2 at {np.asarray(x).tolist()} (smallest singular value {s:.2e})")


# --------------------------------------------------------------------------
# return times


def return_residual(system: SystemDescriptor, x, T, tol: float = 1e-10) -> float:
    return float(np.linalg.norm(flow_joint(system, x, T, tol) - x))


def refine_return_time(system: SystemDescriptor, x, T, config: LatticeConfig | None = None):
    """Newton on ``phi_T(x) = x`` for the two unknown times.

    The Jacobian columns are ``X1, X2`` at ``phi_T(x)`` (the flows commute).
    Returns ``(T, residual)``.
    """
    cfg = config or LatticeConfig()
    T = np.array(T, dtype=float)
    y = flow_joint(system, x, T, cfg.flow_tol)
    r = y - x
    res = float(np.linalg.norm(r))
    for _ in range(cfg.newton_max_iter):
        if res < cfg.newton_target:
            break
        A = vector_fields(system, y).T
        dT = np.linalg.lstsq(A, -r, rcond=None)[0]
        T_new = T + dT
        y_new = flow_joint(system, x, T_new, cfg.flow_tol)
        r_new = y_new - x
        res_new = float(np.linalg.norm(r_new))
        if not res_new < 2.0 * res + 1e-12:
            break
        T, y, r, res = T_new, y_new, r_new, res_new
        if np.linalg.norm(dT) < 1e-13 * (1.0 + np.linalg.norm(T)):
            break
    return T, res


def _unit(component: int) -> np.ndarray:
    e = np.zeros(2)
    e[component - 1] = 1.0
    return e


def _local_minima(d: np.ndarray, threshold: float) -> list[int]:
    """Indices of local minima below ``threshold`` after the curve first leaves the threshold."""
    above = np.nonzero(d > threshold)[0]
    if above.size == 0:
        return []
    out = []
    for j in range(int(above[0]) + 1, d.size - 1):
        if d[j] < threshold and d[j] <= d[j - 1] and d[j] <= d[j + 1]:
            out.append(j)
    return out


def _return_candidates(system, x, other: int, orbit_times, orbit_points, cfg: LatticeConfig):
    """Times where the flow of X_other comes back to the sampled orbit of the other field.

    Yields ``(t_other, t_orbit)`` pairs sorted by ``t_other``; ``orbit_points[k]``
    is the image of ``x`` at time ``orbit_times[k]``.
    """
    traj = flow_dense(system, x, _unit(other), cfg.horizon, cfg.search_tol)
    ts = np.linspace(0.0, cfg.horizon, cfg.trajectory_samples + 1)
    Y = traj(ts).T
    diam = max(np.max(np.linalg.norm(Y - x, axis=1)), np.max(np.linalg.norm(orbit_points - x, axis=1)))
    tree = cKDTree(orbit_points)
    d, k = tree.query(Y)
    threshold = cfg.candidate_fraction * diam
    return [(ts[j], orbit_times[k[j]]) for j in _local_minima(d, threshold)], diam


def _gauss_reduce(B: np.ndarray) -> np.ndarray:
    u, v = B[0].copy(), B[1].copy()
    if u @ u > v @ v:
        u, v = v, u
    for _ in range(1000):
        m = round(float(u @ v) / float(u @ u))
        v = v - m * u
        if v @ v >= u @ u:
            break
        u, v = v, u
    return np.array([u, v])


def _orient(B: np.ndarray, keep_row: int | None = None) -> np.ndarray:
    if np.linalg.det(B) < 0:
        flip = 0 if keep_row != 0 else 1
        B = B.copy()
        B[flip] = -B[flip]
    return B


def _s1_lattice(system, x, cfg: LatticeConfig) -> PeriodLattice:
    s = system.s1_index
    o = 3 - s
    circle = flow_dense(system, x, _unit(s), TWO_PI, cfg.flow_tol)
    s1_res = float(np.linalg.norm(circle(TWO_PI) - x))
    if s1_res > cfg.residual_max:
        raise NumericalError(f"{system.name}: flow of F{s} is not 2*pi periodic at x (residual {s1_res:.2e})")
    angles = TWO_PI * np.arange(cfg.circle_samples) / cfg.circle_samples
    points = circle(angles).T
    candidates, _ = _return_candidates(system, x, o, angles, points, cfg)
    T_s1 = TWO_PI * _unit(s)
    for t_o, angle in candidates:
        guess = t_o * _unit(o) - angle * _unit(s)
        T, res = refine_return_time(system, x, guess, cfg)
        if res < cfg.residual_max and T[o - 1] > 1e-3:
            # reduce against the circle vector: circle time in (-pi, pi]
            T = T - np.round(T[s - 1] / TWO_PI) * T_s1
            B = np.array([T, T_s1])
            B = _orient(B, keep_row=1)
            return PeriodLattice(B, x.copy(), moment_map(system, x), np.array([res, s1_res]), s1_row=1)
    raise HorizonError(
        f"{system.name}: no return to the circle orbit within horizon {cfg.horizon:g}; "
        "increase the horizon or check that the fiber is compact"
    )


def _general_lattice(system, x, cfg: LatticeConfig) -> PeriodLattice:
    L = cfg.horizon
    n = cfg.trajectory_samples
    fwd = flow_dense(system, x, _unit(2), L, cfg.search_tol)
    bwd = flow_dense(system, x, -_unit(2), L, cfg.search_tol)
    tp = np.linspace(0.0, L, n + 1)
    orbit_times = np.concatenate([-tp[:0:-1], tp])
    orbit_points = np.vstack([bwd(tp[:0:-1]).T, fwd(tp).T])
    found: list[tuple[np.ndarray, float]] = []

    # pure X2 returns
    d2 = np.linalg.norm(fwd(tp).T - x, axis=1)
    diam2 = float(np.max(np.linalg.norm(orbit_points - x, axis=1)))
    for j in _local_minima(d2, cfg.candidate_fraction * diam2)[:3]:
        T, res = refine_return_time(system, x, (0.0, tp[j]), cfg)
        if res < cfg.residual_max and np.linalg.norm(T) > 1e-3:
            found.append((T, res))
    # returns of the X1 flow to the X2 orbit
    candidates, _ = _return_candidates(system, x, 1, orbit_times, orbit_points, cfg)
    for t1, t2 in candidates[:8]:
        T, res = refine_return_time(system, x, (t1, -t2), cfg)
        if res < cfg.residual_max and np.linalg.norm(T) > 1e-3:
            found.append((T, res))
    vecs = []
    for T, res in found:
        if all(np.linalg.norm(T - V) > 1e-6 and np.linalg.norm(T + V) > 1e-6 for V, _ in vecs):
            vecs.append((T, res))
    vecs.sort(key=lambda tr: float(np.linalg.norm(tr[0])))
    if not vecs:
        raise HorizonError(f"{system.name}: no return time found within horizon {L:g}; increase the horizon")
    v1 = vecs[0][0]
    v2 = None
    for T, _ in vecs[1:]:
        if abs(v1[0] * T[1] - v1[1] * T[0]) > 1e-6 * np.linalg.norm(v1) * np.linalg.norm(T):
            v2 = T
            break
    if v2 is None:
        raise HorizonError(
            f"{system.name}: only one independent return time found within horizon {L:g}; "
            "the fiber may be non-compact"
        )
    u, v = _gauss_reduce(np.array([v1, v2]))
    if abs(v[0]) > abs(u[0]) + 1e-9:
        u, v = v, u
    if u[0] < 0:
        u = -u
    B = _orient(np.array([u, v]), keep_row=0)
    residuals = np.array([return_residual(system, x, B[i], cfg.flow_tol) for i in range(2)])
    return PeriodLattice(B, x.copy(), moment_map(system, x), residuals)


def period_lattice(system: SystemDescriptor, x, config: LatticeConfig | None = None) -> PeriodLattice:
    """Reduced, positively oriented basis of the period lattice of the torus through ``x``."""
    cfg = config or LatticeConfig()
    x = project_point(system, np.asarray(x, dtype=float))
    check_regular_point(system, x, cfg.regularity_tol)
    check_value_admissible(system, moment_map(system, x), cfg.critical_exclusion)
    if system.s1_index is not None:
        return _s1_lattice(system, x, cfg)
    return _general_lattice(system, x, cfg)


def lattice_at_value(system: SystemDescriptor, c, seed=None, config: LatticeConfig | None = None,
                     fiber: FiberConfig | None = None) -> PeriodLattice:
    cfg = config or LatticeConfig()
    check_value_admissible(system, c, cfg.critical_exclusion)
    if seed is None:
        seed = system.fiber_seed if system.fiber_seed is not None else DEFAULT_SEED[: system.dim]
    x = find_fiber_point(system, c, seed, fiber)
    return period_lattice(system, x, cfg)


# --------------------------------------------------------------------------
# continuation


@dataclass
class TransportStats:
    bisections: int = 0
    steps: int = 0
    newton_failures: int = 0
    jumps: int = 0
    events: list = field(default_factory=list)


def _continue_basis(system, x_new, B, s1_row, cfg: LatticeConfig, tcfg: TransportConfig, stats):
    B_new = B.copy()
    residuals = np.zeros(2)
    for i in range(2):
        if i == s1_row:
            residuals[i] = return_residual(system, x_new, B[i], cfg.flow_tol)
            if residuals[i] > cfg.residual_max:
                raise NumericalError(f"circle period lost (residual {residuals[i]:.2e})")
            continue
        T, res = refine_return_time(system, x_new, B[i], cfg)
        if res > cfg.residual_max:
            stats.newton_failures += 1
            raise NumericalError(f"return-time Newton did not converge (residual {res:.2e})")
        if np.linalg.norm(T - B[i]) > tcfg.jump_fraction * np.linalg.norm(B[i]):
            stats.jumps += 1
            raise NumericalError("basis vector jumped")
        B_new[i] = T
        residuals[i] = res
    return B_new, residuals


def transport_lattice(system: SystemDescriptor, path: LoopPath, start: PeriodLattice,
                      config: LatticeConfig | None = None, transport: TransportConfig | None = None,
                      stats: TransportStats | None = None) -> list[PeriodLattice]:
    """Continue ``start`` along ``path`` without re-reduction.

    Each step re-locates the anchor on the new fiber (seeded from the old
    one) and Newton-refines the return times from the previous basis, so the
    basis moves continuously. Failing steps are bisected.
    """
    cfg = config or LatticeConfig()
    tcfg = transport or TransportConfig()
    stats = stats if stats is not None else TransportStats()
    values = np.asarray(path.values, dtype=float)
    if np.linalg.norm(values[0] - start.value) > 1e-8:
        raise ValueError("start lattice is not anchored at the first value of the path")
    fiber_cfg = FiberConfig(max_restarts=0)
    x = start.anchor.copy()
    B = start.basis.copy()
    out = [start]
    for k in range(1, len(values)):
        a, b = values[k - 1], values[k]
        s, h, halvings = 0.0, 1.0, 0
        residuals = start.residuals
        while s < 1.0 - 1e-15:
            h = min(h, 1.0 - s)
            c = a + (s + h) * (b - a) if s + h < 1.0 else b
            try:
                check_value_admissible(system, c, cfg.critical_exclusion)
                x_new = find_fiber_point(system, c, x, fiber_cfg)
                check_regular_point(system, x_new, cfg.regularity_tol)
                B_new, residuals = _continue_basis(system, x_new, B, start.s1_row, cfg, tcfg, stats)
            except NumericalError as exc:
                halvings += 1
                stats.bisections += 1
                stats.events.append({"value": np.asarray(c).tolist(), "reason": str(exc)})
                if halvings > tcfg.max_bisections:
                    raise ContinuationStuckError(
                        f"continuation stuck near value {np.asarray(c).tolist()}: {exc}", parameter=c
                    ) from None
                h *= 0.5
                continue
            x, B = x_new, B_new
            s += h
            stats.steps += 1
            h = min(2.0 * h, 1.0)
        out.append(PeriodLattice(B.copy(), x.copy(), b.copy(), np.asarray(residuals), start.s1_row))
    return out
