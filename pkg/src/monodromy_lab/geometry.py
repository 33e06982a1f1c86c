"""Moment maps, Hamiltonian vector fields and joint flows.

Phase points are flat float arrays ordered as canonical pairs
``(x1, y1, x2, y2)`` with symplectic form ``dx1^dy1 + dx2^dy2``, so the
Hamiltonian vector field of ``F`` is ``(dF/dy1, -dF/dx1, dF/dy2, -dF/dx2)``.

Systems living on a constraint set inside a larger canonical space (the
spherical pendulum in R^6) supply ``constraint``; their vector fields are
the Dirac-projected ones, which are tangent to the constraint set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EvaluationError, IntegrationError

EPS = np.finfo(float).eps
FD_SCALE = EPS ** (1.0 / 3.0)

PhasePoint = np.ndarray
ValuePoint = np.ndarray


def poisson_tensor(dim: int) -> np.ndarray:
    """Canonical Poisson matrix J with X_F = J grad F."""
    J = np.zeros((dim, dim))
    for k in range(0, dim, 2):
        J[k, k + 1] = 1.0
        J[k + 1, k] = -1.0
    return J


@dataclass(frozen=True)
class SystemDescriptor:
    """An integrable system given by its moment map ``F = (F1, F2)``.

    ``gradient`` returns a ``(2, dim)`` array; when absent, central finite
    differences are used. ``s1_index`` (1 or 2) marks a component whose flow
    is 2*pi periodic. ``constraint(x) -> (g, dg)`` describes an invariant
    constraint set for systems embedded in a larger space.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    s1_index: Optional[int] = None
    known_equilibria: tuple = ()
    dim: int = 4
    constraint: Optional[Callable[[np.ndarray], tuple]] = None
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fiber_seed: Optional[tuple] = None
    extended: bool = False
    description: str = ""
    _poisson: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.s1_index not in (None, 1, 2):
            raise ValueError(f"s1_index must be 1, 2 or None, got {self.s1_index!r}")
        object.__setattr__(self, "_poisson", poisson_tensor(self.dim))
        object.__setattr__(
            self, "known_equilibria", tuple(np.asarray(p, dtype=float) for p in self.known_equilibria)
        )


def _check_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise EvaluationError("non-finite phase point", x)
    return x


def moment_map(system: SystemDescriptor, x) -> np.ndarray:
    x = _check_point(x)
    try:
        value = np.asarray(system.evaluate(x), dtype=float)
    except (OverflowError, ZeroDivisionError, FloatingPointError) as exc:
        raise EvaluationError(f"{system.name}: {exc}", x) from None
    if value.shape != (2,) or not np.all(np.isfinite(value)):
        raise EvaluationError(f"{system.name}: non-finite moment map", x)
    return value


def fd_gradient(system: SystemDescriptor, x: np.ndarray) -> np.ndarray:
    x = _check_point(x)
    grad = np.empty((2, x.size))
    for i in range(x.size):
        h = FD_SCALE * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[:, i] = (moment_map(system, xp) - moment_map(system, xm)) / (xp[i] - xm[i])
    return grad


def gradients(system: SystemDescriptor, x) -> np.ndarray:
    """``(2, dim)`` array of the ambient gradients of F1 and F2."""
    x = _check_point(x)
    if system.gradient is None:
        return fd_gradient(system, x)
    try:
        grad = np.asarray(system.gradient(x), dtype=float)
    except (OverflowError, ZeroDivisionError, FloatingPointError) as exc:
        raise EvaluationError(f"{system.name}: {exc}", x) from None
    if not np.all(np.isfinite(grad)):
        raise EvaluationError(f"{system.name}: non-finite gradient", x)
    return grad


def _dirac_fields(system: SystemDescriptor, x: np.ndarray, grads: np.ndarray) -> np.ndarray:
    J = system._poisson
    fields = grads @ J.T  # rows: J grad F_i
    if system.constraint is None:
        return fields
    _, G = system.constraint(x)
    G = np.atleast_2d(G)
    C = G @ J @ G.T
    # subtract J G^T C^{-1} G (J grad F) so that G X = 0
    corr = np.linalg.solve(C, G @ fields.T)
    return fields - (J @ G.T @ corr).T


def vector_fields(system: SystemDescriptor, x) -> np.ndarray:
    """``(2, dim)`` array whose rows are X_F1 and X_F2 at ``x``."""
    x = _check_point(x)
    return _dirac_fields(system, x, gradients(system, x))


def ham_vector_field(system: SystemDescriptor, component: int, x) -> np.ndarray:
    if component not in (1, 2):
        raise ValueError(f"component must be 1 or 2, got {component!r}")
    return vector_fields(system, x)[component - 1]


def differential_norm(system: SystemDescriptor, x) -> float:
    """Norm of (X_F1, X_F2); equals |(dF1, dF2)| for canonical 4-d systems."""
    return float(np.linalg.norm(vector_fields(system, x)))


def rank_defect(system: SystemDescriptor, x) -> float:
    """Norm of X_F1 ^ X_F2; zero exactly where rank dF < 2."""
    X = vector_fields(system, x)
    a, b = X
    w = np.outer(a, b) - np.outer(b, a)
    return float(np.sqrt(0.5 * np.sum(w * w)))


def smallest_singular_value(system: SystemDescriptor, x) -> float:
    return float(np.linalg.svd(vector_fields(system, x), compute_uv=False)[-1])


def hessians_at(system: SystemDescriptor, x) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized Hessians of F1 and F2, by central differences of the gradient."""
    x = _check_point(x)
    n = x.size
    H = np.empty((2, n, n))
    for i in range(n):
        h = FD_SCALE * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        H[:, :, i] = (gradients(system, xp) - gradients(system, xm)) / (xp[i] - xm[i])
    H = 0.5 * (H + np.transpose(H, (0, 2, 1)))
    return H[0], H[1]


def project_point(system: SystemDescriptor, x: np.ndarray) -> np.ndarray:
    if system.project is None:
        return x
    return np.asarray(system.project(x), dtype=float)


def tangent_basis(system: SystemDescriptor, x) -> np.ndarray:
    """Orthonormal basis (columns) of the tangent space of the constraint set."""
    x = np.asarray(x, dtype=float)
    if system.constraint is None:
        return np.eye(x.size)
    _, G = system.constraint(x)
    G = np.atleast_2d(G)
    _, s, vt = np.linalg.svd(G)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


# --------------------------------------------------------------------------
# flows


def _joint_rhs(system: SystemDescriptor, times) -> Callable:
    t1, t2 = float(times[0]), float(times[1])

    def rhs(_t, y):
        X = vector_fields(system, y)
        return t1 * X[0] + t2 * X[1]

    return rhs


def _solve(system, rhs, x, t_end, tol, dense=False, t_eval=None):
    try:
        sol = solve_ivp(
            rhs, (0.0, t_end), x, method="DOP853", rtol=tol, atol=tol,
            dense_output=dense, t_eval=t_eval,
        )
    except EvaluationError as exc:
        raise IntegrationError(f"{system.name}: evaluation failed during integration ({exc})",
                               last_point=exc.point) from None
    if sol.status != 0:
        raise IntegrationError(
            f"{system.name}: integration failed: {sol.message}",
            last_point=sol.y[:, -1] if sol.y.size else x,
            last_time=float(sol.t[-1]) if sol.t.size else 0.0,
        )
    return sol


def flow_joint(system: SystemDescriptor, x, times, tol: float = 1e-10) -> np.ndarray:
    """Time-(t1, t2) map of the R^2 action generated by (X_F1, X_F2).

    Realized as the unit-time flow of ``t1 X1 + t2 X2``, which equals the
    composition of the two flows because they commute.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = _check_point(x)
    if times[0] == 0.0 and times[1] == 0.0:
        return x.copy()
    sol = _solve(system, _joint_rhs(system, times), x, 1.0, tol)
    return project_point(system, sol.y[:, -1])


def flow_sequential(system: SystemDescriptor, x, times, tol: float = 1e-10, first: int = 1) -> np.ndarray:
    """Flow X_first for its time, then the other field; used to test commutation."""
    order = (1, 2) if first == 1 else (2, 1)
    y = _check_point(x)
    for comp in order:
        t = times[comp - 1]
        if t != 0.0:
            unit = (t, 0.0) if comp == 1 else (0.0, t)
            y = flow_joint(system, y, unit, tol)
    return y


def flow_dense(system: SystemDescriptor, x, direction, t_end: float, tol: float = 1e-10):
    """Dense-output solution of ``x' = d1 X1 + d2 X2`` on [0, t_end]."""
    x = _check_point(x)
    return _solve(system, _joint_rhs(system, direction), x, t_end, tol, dense=True).sol
