import numpy as np
import pytest
from hypothesis import given, strategies as st

from monodromy_lab import catalog
from monodromy_lab.errors import (
    AmbiguousCycleError,
    FiberNotFoundError,
    InconclusiveMonodromyError,
    NotUnipotentError,
    NumericalError,
    RegularityError,
)
from monodromy_lab.geometry import flow_joint, moment_map
from monodromy_lab.lattice import (
    LatticeConfig,
    LoopPath,
    _gauss_reduce,
    find_fiber_point,
    lattice_at_value,
    period_lattice,
    return_residual,
)
from monodromy_lab.model import model_monodromy
from monodromy_lab.monodromy import (
    MonodromyMatrix,
    fixed_cycle,
    gl2z_conjugate,
    monodromy_around,
    monodromy_from_bases,
    unipotent_normal_form,
    vanishing_cycle,
)

TWO_PI = 2 * np.pi


@pytest.fixture(scope="module")
def champ_loop():
    s = catalog.builtin("champagne")
    loop = LoopPath.circle((0.0, 0.0), 0.05, 48)
    return s, loop, monodromy_around(s, loop)


def test_fiber_point(champagne):
    x = find_fiber_point(champagne, (0.1, 0.02), (0.7, 0.3, 0.5, -0.2))
    assert np.linalg.norm(moment_map(champagne, x) - (0.1, 0.02)) < 1e-10


def test_fiber_point_empty_fiber(champagne):
    # H >= -1/4 on the champagne bottle: no fiber below it
    with pytest.raises(FiberNotFoundError):
        find_fiber_point(champagne, (-1.0, 0.0), (0.7, 0.3, 0.5, -0.2))


def test_champagne_lattice(champagne):
    L = lattice_at_value(champagne, (0.1, 0.02))
    assert L.s1_row == 1
    assert L.basis[1].tolist() == [0.0, TWO_PI]
    assert np.all(L.residuals < 1e-8)
    for T in L.basis:
        assert return_residual(champagne, L.anchor, T) < 1e-8
    assert np.linalg.det(L.basis) > 0


def test_lattice_refuses_critical_value(champagne):
    with pytest.raises(RegularityError):
        lattice_at_value(champagne, (0.0, 0.0))


def test_oscillator_lattice_independent_of_value():
    s = catalog.builtin("oscillators")
    for c in [(0.5, 0.5), (0.2, 1.3)]:
        L = lattice_at_value(s, c)
        assert np.allclose(L.basis, TWO_PI * np.eye(2), atol=1e-8)


@given(st.floats(0.0, TWO_PI))
def test_lattice_invariant_along_circle_orbit(t):
    s = catalog.builtin("champagne")
    L0 = lattice_at_value(s, (0.1, 0.02))
    x = flow_joint(s, L0.anchor, (0.0, t))
    L1 = period_lattice(s, x)
    assert np.allclose(L1.basis, L0.basis, atol=1e-6)


def test_gauss_reduce_keeps_lattice():
    B = np.array([[1.0, 0.0], [7.0, 1.0]])
    R = _gauss_reduce(B)
    assert abs(abs(np.linalg.det(R)) - 1.0) < 1e-12
    assert np.allclose(sorted(np.linalg.norm(R, axis=1)), [1.0, 1.0])


def test_loop_path_helpers():
    loop = LoopPath.circle((0.0, 0.0), 0.1, 8)
    assert loop.closed and loop.values.shape == (9, 2)
    assert np.allclose(loop.reversed().values[0], loop.values[-1])
    r = loop.rotated(3)
    assert r.closed and np.allclose(r.values[0], loop.values[3])
    with pytest.raises(ValueError):
        LoopPath.circle((0, 0), -1.0)


def test_champagne_monodromy(champ_loop):
    _, _, M = champ_loop
    assert M.entries == ((1, 1), (0, 1))
    assert M.is_unipotent() and not M.is_identity()
    assert M.twist() == 1
    assert vanishing_cycle(M) == (1, 0)
    assert fixed_cycle(M) == (0, 1)
    assert M.final.basis[1].tolist() == [0.0, TWO_PI]
    assert M.stats.steps >= 48


def test_reversed_loop_inverts(champ_loop):
    s, loop, M = champ_loop
    R = monodromy_around(s, loop.reversed())
    assert np.array_equal(R.matrix @ M.matrix, np.eye(2, dtype=np.int64))


def test_basepoint_change_conjugates(champ_loop):
    s, loop, M = champ_loop
    R = monodromy_around(s, loop.rotated(17))
    assert gl2z_conjugate(R, M)
    assert R.trace == 2


def test_open_loop_rejected(champagne):
    with pytest.raises(ValueError):
        monodromy_around(champagne, LoopPath.from_values([[0.1, 0.0], [0.0, 0.1]]))


def test_monodromy_from_bases_guards():
    B = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(InconclusiveMonodromyError):
        monodromy_from_bases(B, np.array([[1.3, 0.0], [0.0, 1.0]]))
    with pytest.raises(InconclusiveMonodromyError):
        monodromy_from_bases(B, np.array([[2.0, 0.0], [0.0, 1.0]]))
    entries, res, _ = monodromy_from_bases(B, np.array([[1.0, 1.0 + 1e-6], [0.0, 1.0]]))
    assert entries == ((1, 1), (0, 1)) and res < 1e-5


def test_vanishing_cycle_cases():
    assert vanishing_cycle([[1, 3], [0, 1]]) == (1, 0)
    assert vanishing_cycle([[1, 0], [-2, 1]]) == (0, 1)
    with pytest.raises(AmbiguousCycleError):
        vanishing_cycle([[1, 0], [0, 1]])
    with pytest.raises(NotUnipotentError):
        vanishing_cycle([[2, 1], [1, 1]])


@given(st.integers(1, 20), st.integers(-5, 5), st.integers(-5, 5))
def test_normal_form_recovers_twist(n, p, q):
    P = np.array([[1, p], [0, 1]]) @ np.array([[1, 0], [q, 1]])
    Pinv = np.round(np.linalg.inv(P)).astype(np.int64)
    M = P @ np.array([[1, n], [0, 1]]) @ Pinv
    Q, k = unipotent_normal_form(M)
    assert k == n
    assert abs(round(np.linalg.det(Q))) == 1
    Qinv = np.round(np.linalg.inv(Q)).astype(np.int64)
    assert np.array_equal(Qinv @ M @ Q, [[1, n], [0, 1]])


def test_numerical_agrees_with_model(champ_loop):
    _, _, M = champ_loop
    assert gl2z_conjugate(M, model_monodromy(1))
    assert not gl2z_conjugate(M, model_monodromy(2))


def test_monodromy_matrix_json():
    M = MonodromyMatrix(((1, 2), (0, 1)), 1e-9)
    assert M.to_json() == {"matrix": [[1, 2], [0, 1]], "residual": 1e-9, "det": 1, "trace": 2}


def test_linear_focus_has_no_compact_lattice():
    # fibers of the linear focus-focus model are non-compact: no returns
    s = catalog.builtin("linear-focus")
    with pytest.raises(NumericalError):
        lattice_at_value(s, (0.1, 0.05), config=LatticeConfig(horizon=10.0, trajectory_samples=2000))


def test_spherical_pendulum_monodromy():
    # constrained system in R^6; loop around the top critical value (H, J) = (1, 0)
    s = catalog.builtin("spherical-pendulum")
    M = monodromy_around(s, LoopPath.circle((1.0, 0.0), 0.1, 64))
    assert M.trace == 2 and M.is_unipotent() and M.twist() == 1
    assert gl2z_conjugate(M, model_monodromy(1))
