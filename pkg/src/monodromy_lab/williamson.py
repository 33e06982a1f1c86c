"""Williamson classification of rank-0 singular points.

A combination ``c1 F1 + c2 F2`` is linearized at the equilibrium and the
eigenvalue pattern of ``J (c1 H1 + c2 H2)`` decides the type. Directions
``c = (cos k*pi/17, sin k*pi/17)``, ``k = 1..16`` are tried in order; the
first one with four nonzero eigenvalues in a recognizable pattern wins.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import NotAnEquilibriumError, NumericalError
from .geometry import (
    FD_SCALE,
    SystemDescriptor,
    differential_norm,
    gradients,
    hessians_at,
    project_point,
    tangent_basis,
    vector_fields,
)

log = logging.getLogger(__name__)

EQUILIBRIUM_THRESHOLD = 1e-8
ACCEPT_RESIDUAL = 1e-10
DEDUP_RADIUS = 1e-6
DIRECTIONS = tuple((np.cos(k * np.pi / 17), np.sin(k * np.pi / 17)) for k in range(1, 17))


class WilliamsonType(str, enum.Enum):
    ELLIPTIC_ELLIPTIC = "EllipticElliptic"
    ELLIPTIC_HYPERBOLIC = "EllipticHyperbolic"
    HYPERBOLIC_HYPERBOLIC = "HyperbolicHyperbolic"
    FOCUS_FOCUS = "FocusFocus"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class WilliamsonReport:
    type: WilliamsonType
    eigenvalues: tuple
    combination_used: tuple | None
    residual: float

    def to_json(self) -> dict:
        return {
            "type": self.type.value,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "combination_used": None if self.combination_used is None else list(self.combination_used),
            "residual": self.residual,
        }


def _fd_jacobian(fun, x: np.ndarray) -> np.ndarray:
    cols = []
    for i in range(x.size):
        h = FD_SCALE * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((fun(xp) - fun(xm)) / (xp[i] - xm[i]))
    return np.stack(cols, axis=-1)


class _Linearizer:
    """Caches second-order data at one equilibrium so directions are cheap."""

    def __init__(self, system: SystemDescriptor, x: np.ndarray):
        self.system = system
        if system.constraint is None:
            H1, H2 = hessians_at(system, x)
            J = system._poisson
            self.A1, self.A2 = J @ H1, J @ H2
        else:
            D = _fd_jacobian(lambda y: vector_fields(system, y), x)  # (2, n, n)
            T = tangent_basis(system, x)
            self.A1, self.A2 = T.T @ D[0] @ T, T.T @ D[1] @ T

    def matrix(self, c) -> np.ndarray:
        return c[0] * self.A1 + c[1] * self.A2


def linearization(system: SystemDescriptor, x, c) -> np.ndarray:
    """Linearized flow matrix of ``c1 F1 + c2 F2`` at the equilibrium ``x`` (4x4)."""
    return _Linearizer(system, np.asarray(x, dtype=float)).matrix(c)


def linearization_spectrum(system: SystemDescriptor, x, c) -> np.ndarray:
    return _sorted(np.linalg.eigvals(linearization(system, x, c)))


def _sorted(eigs) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=complex)
    return eigs[np.lexsort((np.round(eigs.imag, 12), np.round(eigs.real, 12)))]


def classify_spectrum(eigs, zero_tol: float = 1e-9) -> WilliamsonType:
    """Williamson pattern of four eigenvalues of an infinitesimally symplectic matrix."""
    eigs = np.asarray(eigs, dtype=complex)
    tol = zero_tol * max(1.0, float(np.max(np.abs(eigs))))
    if eigs.size != 4 or np.any(np.abs(eigs) < tol):
        return WilliamsonType.DEGENERATE
    re_zero = np.abs(eigs.real) < tol
    im_zero = np.abs(eigs.imag) < tol
    n_imag = int(np.sum(re_zero))
    n_real = int(np.sum(im_zero))
    if n_imag == 4:
        return WilliamsonType.ELLIPTIC_ELLIPTIC
    if n_real == 4:
        return WilliamsonType.HYPERBOLIC_HYPERBOLIC
    if n_imag == 2 and n_real == 2:
        return WilliamsonType.ELLIPTIC_HYPERBOLIC
    if n_imag == 0 and n_real == 0:
        a = np.abs(eigs.real)
        b = np.abs(eigs.imag)
        signs = {(bool(r > 0), bool(i > 0)) for r, i in zip(eigs.real, eigs.imag)}
        if np.ptp(a) < tol and np.ptp(b) < tol and len(signs) == 4:
            return WilliamsonType.FOCUS_FOCUS
    return WilliamsonType.DEGENERATE


def classify_equilibrium(system: SystemDescriptor, x, zero_tol: float = 1e-9,
                         threshold: float = EQUILIBRIUM_THRESHOLD) -> WilliamsonReport:
    x = np.asarray(x, dtype=float)
    residual = differential_norm(system, x)
    if residual >= threshold:
        raise NotAnEquilibriumError(residual)
    lin = _Linearizer(system, x)
    first = None
    for c in DIRECTIONS:
        eigs = _sorted(np.linalg.eigvals(lin.matrix(c)))
        if first is None:
            first = (c, eigs)
        kind = classify_spectrum(eigs, zero_tol)
        if kind is not WilliamsonType.DEGENERATE:
            return WilliamsonReport(kind, tuple(eigs), (float(c[0]), float(c[1])), residual)
    return WilliamsonReport(WilliamsonType.DEGENERATE, tuple(first[1]), None, residual)


# --------------------------------------------------------------------------
# equilibria


def _equilibrium_residual(system: SystemDescriptor, x: np.ndarray) -> np.ndarray:
    if system.constraint is None:
        return gradients(system, x).ravel()
    g, _ = system.constraint(x)
    return np.concatenate([vector_fields(system, x).ravel(), np.atleast_1d(g)])


def _equilibrium_jacobian(system: SystemDescriptor, x: np.ndarray) -> np.ndarray:
    if system.constraint is None:
        H1, H2 = hessians_at(system, x)
        return np.vstack([H1, H2])
    return _fd_jacobian(lambda y: _equilibrium_residual(system, y), x)


def refine_equilibrium(system: SystemDescriptor, seed, max_iter: int = 60) -> np.ndarray | None:
    """Gauss-Newton on dF1 = dF2 = 0; returns None if it does not converge."""
    try:
        x = project_point(system, np.asarray(seed, dtype=float))
        for _ in range(max_iter):
            r = _equilibrium_residual(system, x)
            if differential_norm(system, x) < 1e-13:
                break
            step = np.linalg.lstsq(_equilibrium_jacobian(system, x), -r, rcond=None)[0]
            x = project_point(system, x + step)
            if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e6:
                return None
            if np.linalg.norm(step) < 1e-15 * max(1.0, np.linalg.norm(x)):
                break
        ok = differential_norm(system, x) < ACCEPT_RESIDUAL
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError):
        return None
    return x if ok else None


def find_equilibria(system: SystemDescriptor, seeds, diagnostics: list | None = None) -> list[np.ndarray]:
    """Refine each seed to a fixed point of the R^2 action; deduplicate within 1e-6."""
    found: list[np.ndarray] = []
    for seed in seeds:
        seed = np.asarray(seed, dtype=float)
        x = refine_equilibrium(system, seed)
        if x is None:
            if diagnostics is not None:
                diagnostics.append({"seed": seed.tolist(), "reason": "no convergence"})
            log.debug("%s: seed %s dropped", system.name, seed)
            continue
        if all(np.linalg.norm(x - y) > DEDUP_RADIUS for y in found):
            found.append(x)
    return found
