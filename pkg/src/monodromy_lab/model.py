"""Exact winding bookkeeping for the n-chart glued focus-focus model.

Each chart is a copy of ``D x CP^1`` with coordinates ``(z1, z2)`` and
moment map ``z1 z2``; consecutive charts are glued by
``(z1, z2) -> (1/z2, z1 z2^2)``. On the 3-manifold ``|z1 z2| = eps`` a
cycle is recorded by its integer windings ``(a, b)`` of ``(arg z1, arg z2)``:

* ``lam = (1, 0)``: ``z2`` fixed, ``arg z1`` increasing (moves ``arg z1 z2``,
  i.e. transports the torus once around the loop of values);
* ``theta = (0, -1)``: ``z1`` fixed, ``arg z2`` decreasing;
* ``delta = theta + lam = (1, -1)``: the circle-action cycle, lying in a fiber.

``gamma`` is the cycle that runs once through all ``n`` charts. Transporting
it around the loop drags each of its points along ``lam``; at every chart
crossing a ``lam``-motion in the new chart reads as ``C^-1 lam`` in the old
one, and the surplus ``C^-1 lam - lam`` is what ``gamma`` picks up.
Everything is plain Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .monodromy import MonodromyMatrix

Matrix = tuple  # ((a, b), (c, d)) of ints

LAMBDA = (1, 0)
THETA = (0, -1)
DELTA = (THETA[0] + LAMBDA[0], THETA[1] + LAMBDA[1])

# basis conversions are stored explicitly so the convention can be audited
BASIS_ORDER = ("gamma", "delta")
HOLONOMY_RELATION = "equal"  # affine holonomy on (I_gamma, I_delta) == cycle monodromy on (gamma, delta)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def apply(A: Matrix, v) -> tuple[int, int]:
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


def det(A: Matrix) -> int:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def inverse(A: Matrix) -> Matrix:
    d = det(A)
    if d not in (1, -1):
        raise ValueError("not unimodular")
    return ((A[1][1] * d, -A[0][1] * d), (-A[1][0] * d, A[0][0] * d))


def crossing_matrix() -> Matrix:
    """Action of the gluing on windings: old ``(a, b)`` -> new ``(-b, a + 2b)``."""
    # arg(1/z2) = -arg z2 ; arg(z1 z2^2) = arg z1 + 2 arg z2
    return ((0, -1), (1, 2))


@dataclass(frozen=True)
class ModelAtlas:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"number of charts must be a positive integer, got {self.n!r}")

    def transition(self, i: int) -> tuple[int, Matrix]:
        """Chart index reached from chart ``i`` and the winding map (cyclic)."""
        return (i + 1) % self.n, crossing_matrix()


@dataclass(frozen=True)
class ChartWord:
    """A cycle as windings ``(a, b)`` in the current chart plus crossings made."""

    a: int
    b: int
    crossings: int = 0
    chart: int = 0

    @property
    def winding(self) -> tuple[int, int]:
        return (self.a, self.b)

    def cross(self, atlas: ModelAtlas) -> "ChartWord":
        nxt, C = atlas.transition(self.chart)
        a, b = apply(C, self.winding)
        return ChartWord(a, b, self.crossings + 1, nxt)

    def pull_back(self) -> tuple[int, int]:
        """Windings in the previous chart of a motion recorded in this one."""
        return apply(inverse(crossing_matrix()), self.winding)


def _in_delta_multiples(v) -> int:
    # v = k * delta with delta = (1, -1)
    k = v[0] // DELTA[0]
    if (k * DELTA[0], k * DELTA[1]) != tuple(v):
        raise AssertionError(f"{v} is not a multiple of delta")
    return k


@lru_cache(maxsize=None)
def _crossing_data() -> int:
    """Delta-multiple picked up by ``gamma`` at one crossing; checks delta invariance."""
    C = crossing_matrix()
    if det(C) != 1 or C[0][0] + C[1][1] != 2:
        raise AssertionError("crossing matrix is not unipotent in SL(2, Z)")
    if apply(C, DELTA) != DELTA:
        raise AssertionError("delta is not invariant under the gluing")
    # a lam-motion in the next chart, seen from the current one
    moved = ChartWord(*LAMBDA, chart=1).pull_back()
    return _in_delta_multiples((moved[0] - LAMBDA[0], moved[1] - LAMBDA[1]))


def model_monodromy(n: int) -> MonodromyMatrix:
    """Monodromy of ``(gamma, delta)`` around ``|z1 z2| = eps`` for ``n`` charts.

    Rows express new cycles in the old basis: ``gamma_new = gamma + k delta``.
    """
    atlas = ModelAtlas(n)
    surplus = _crossing_data()
    gamma_shift, chart, crossings = 0, 0, 0
    for _ in range(atlas.n):
        gamma_shift += surplus
        chart = (chart + 1) % atlas.n
        crossings += 1
    if chart != 0 or crossings != n:
        raise AssertionError("chart cycle did not close")
    return MonodromyMatrix(((1, gamma_shift), (0, 1)), 0.0)


def model_affine_holonomy(n: int) -> Matrix:
    """Linear part of the gluing ``(x, y) -> (x + n y, y)`` of the cut plane.

    In action coordinates ``(x, y) = (I_gamma, I_delta)`` this is the same
    matrix as :func:`model_monodromy` (``HOLONOMY_RELATION == "equal"``).
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    H = ((1, n), (0, 1))
    if HOLONOMY_RELATION == "equal" and H != model_monodromy(n).entries:
        raise AssertionError("affine holonomy and cycle monodromy disagree")
    return H


def fixed_vector(A: Matrix) -> tuple[int, int]:
    """Primitive fixed vector of a non-identity unipotent integer matrix."""
    k = ((A[0][0] - 1, A[0][1]), (A[1][0], A[1][1] - 1))
    row = k[0] if any(k[0]) else k[1]
    if not any(row):
        raise ValueError("identity fixes every vector")
    a, b = row[1], -row[0]
    g = gcd(a, b)
    a, b = a // g, b // g
    return (a, b) if (a > 0 or (a == 0 and b > 0)) else (-a, -b)
