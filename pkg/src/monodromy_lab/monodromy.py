"""Integer monodromy of period lattices around loops of regular values.

Convention: lattice bases are rows ``(gamma, delta)``; after transport the
new basis satisfies ``B_final = M @ B_start``, i.e. ``gamma_new = M[0,0]
gamma + M[0,1] delta``. With a circle action, ``delta`` is the circle cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousCycleError, InconclusiveMonodromyError, NotUnipotentError
from .geometry import SystemDescriptor
from .lattice import (
    DEFAULT_SEED,
    FiberConfig,
    LatticeConfig,
    LoopPath,
    PeriodLattice,
    TransportConfig,
    TransportStats,
    find_fiber_point,
    period_lattice,
    transport_lattice,
)

ROUNDING_LIMIT = 1e-3


@dataclass
class MonodromyMatrix:
    entries: tuple  # ((a, b), (c, d)) python ints
    residual: float
    real: np.ndarray | None = None
    start: PeriodLattice | None = None
    final: PeriodLattice | None = None
    stats: TransportStats | None = field(default=None, repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.entries[0][0] + self.entries[1][1]

    def is_identity(self) -> bool:
        return self.entries == ((1, 0), (0, 1))

    def is_unipotent(self) -> bool:
        K = self.matrix - np.eye(2, dtype=np.int64)
        return self.trace == 2 and not np.any(K @ K)

    def twist(self) -> int:
        """gcd of the entries of M - I: the n of a unipotent (1 n; 0 1) class."""
        (a, b), (c, d) = self.entries
        return math.gcd(math.gcd(a - 1, b), math.gcd(c, d - 1))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.entries], "residual": self.residual,
                "det": self.det, "trace": self.trace}


def integer_matrix(M) -> tuple:
    return tuple(tuple(int(v) for v in row) for row in np.asarray(M))


def monodromy_from_bases(start: np.ndarray, final: np.ndarray, limit: float = ROUNDING_LIMIT):
    """Round the real change of basis ``final @ inv(start)``; returns (entries, residual, real)."""
    real = np.asarray(final) @ np.linalg.inv(np.asarray(start))
    rounded = np.round(real)
    residual = float(np.max(np.abs(real - rounded)))
    entries = integer_matrix(rounded)
    det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    if residual >= limit:
        raise InconclusiveMonodromyError(
            f"change of basis is not integral (residual {residual:.2e}); refine the loop sampling"
        )
    if abs(det) != 1:
        raise InconclusiveMonodromyError(f"rounded change of basis has det {det}; refine the loop sampling")
    return entries, residual, real


def monodromy_around(system: SystemDescriptor, loop: LoopPath, seed=None,
                     config: LatticeConfig | None = None, transport: TransportConfig | None = None,
                     fiber: FiberConfig | None = None) -> MonodromyMatrix:
    if not loop.closed:
        raise ValueError("loop must be closed (first value == last value)")
    cfg = config or LatticeConfig()
    if seed is None:
        seed = system.fiber_seed if system.fiber_seed is not None else DEFAULT_SEED[: system.dim]
    x0 = find_fiber_point(system, loop.values[0], seed, fiber)
    start = period_lattice(system, x0, cfg)
    start.value = np.asarray(loop.values[0], dtype=float).copy()
    stats = TransportStats()
    lattices = transport_lattice(system, loop, start, cfg, transport, stats)
    final = lattices[-1]
    entries, residual, real = monodromy_from_bases(start.basis, final.basis)
    return MonodromyMatrix(entries, residual, real, start, final, stats)


# --------------------------------------------------------------------------
# integer linear algebra


def _primitive(v) -> tuple[int, int]:
    a, b = int(v[0]), int(v[1])
    g = math.gcd(a, b)
    a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


def vanishing_cycle(M) -> tuple[int, int]:
    """Primitive integer ``v`` with ``M v = v``, first nonzero entry positive."""
    entries = M.entries if isinstance(M, MonodromyMatrix) else integer_matrix(M)
    (a, b), (c, d) = entries
    k = ((a - 1, b), (c, d - 1))
    if not any(any(row) for row in k):
        raise AmbiguousCycleError("identity monodromy fixes every cycle")
    if k[0][0] * k[1][1] - k[0][1] * k[1][0] != 0:
        raise NotUnipotentError(f"{[list(r) for r in entries]} has no eigenvalue 1")
    row = k[0] if any(k[0]) else k[1]
    return _primitive((row[1], -row[0]))


def fixed_cycle(M) -> tuple[int, int]:
    """Coefficients ``(a, b)`` of the cycle ``a gamma + b delta`` left fixed by transport.

    Bases transform as rows, so this is the fixed vector of ``M.T``; for
    ``[[1, n], [0, 1]]`` it is ``(0, 1)``, the circle cycle ``delta``.
    """
    entries = M.entries if isinstance(M, MonodromyMatrix) else integer_matrix(M)
    (a, b), (c, d) = entries
    return vanishing_cycle(((a, c), (b, d)))


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def unipotent_normal_form(M) -> tuple[np.ndarray, int]:
    """``(P, n)`` with ``P`` in GL(2, Z), ``n > 0`` and ``inv(P) @ M @ P = [[1, n], [0, 1]]``."""
    entries = M.entries if isinstance(M, MonodromyMatrix) else integer_matrix(M)
    Mi = np.array(entries, dtype=np.int64)
    K = Mi - np.eye(2, dtype=np.int64)
    if int(np.trace(Mi)) != 2 or np.any(K @ K):
        raise NotUnipotentError(f"{Mi.tolist()} is not unipotent")
    v1, v2 = vanishing_cycle(entries)
    _, s, t = _ext_gcd(v1, v2)  # s*v1 + t*v2 = 1
    P = np.array([[v1, -t], [v2, s]], dtype=np.int64)  # det = v1*s + v2*t = 1
    Pinv = np.array([[s, t], [-v2, v1]], dtype=np.int64)
    N = Pinv @ Mi @ P
    n = int(N[0, 1])
    if n < 0:
        F = np.array([[1, 0], [0, -1]], dtype=np.int64)
        P = P @ F
        n = -n
    return P, n


def gl2z_conjugate(M, N) -> bool:
    """Whether two unipotent integer matrices are conjugate in GL(2, Z)."""
    try:
        return unipotent_normal_form(M)[1] == unipotent_normal_form(N)[1]
    except AmbiguousCycleError:
        return integer_matrix(M) == integer_matrix(N)
