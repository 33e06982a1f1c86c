import numpy as np
import pytest
from hypothesis import given, strategies as st

from monodromy_lab import catalog
from monodromy_lab.bifurcation import count_pinch_points, normalize_region, scan_bifurcation
from monodromy_lab.errors import NotFocusFocusValueError
from monodromy_lab.model import (
    ChartWord,
    DELTA,
    ModelAtlas,
    crossing_matrix,
    det,
    fixed_vector,
    matmul,
    model_affine_holonomy,
    model_monodromy,
)


@pytest.fixture(scope="module")
def champagne_scan():
    return scan_bifurcation(catalog.builtin("champagne"), (-1.5, 1.5), grid=5)


def test_champagne_scan(champagne_scan):
    eq = champagne_scan.equilibria()
    assert [cv.tag for cv in eq] == ["FocusFocus"]
    assert np.allclose(eq[0].value, (0.0, 0.0), atol=1e-10)
    # rank-1 values lie on the boundary of the image (the bottom circle r^2 = 1/2 at H = -1/4)
    assert champagne_scan.rank_one()
    assert min(cv.value[0] for cv in champagne_scan.rank_one()) == pytest.approx(-0.25, abs=1e-8)


def test_scan_json(champagne_scan):
    j = champagne_scan.to_json()
    assert {"critical_values", "region", "resolution"} <= set(j)
    assert all(set(cv) == {"value", "kind", "type", "point"} for cv in j["critical_values"])


@pytest.mark.parametrize("name, tag", [
    ("linear-hyperbolic", "HyperbolicHyperbolic"),
    ("oscillators", "EllipticElliptic"),
    ("linear-elliptic-hyperbolic", "EllipticHyperbolic"),
])
def test_scan_normal_forms(name, tag):
    d = scan_bifurcation(catalog.builtin(name), (-1, 1), grid=3)
    assert any(cv.tag == tag and np.allclose(cv.value, 0.0, atol=1e-10) for cv in d.equilibria())


def test_scan_values_deduplicated(champagne_scan):
    vals = np.array([cv.value for cv in champagne_scan.critical_values])
    d = np.linalg.norm(vals[:, None] - vals[None], axis=-1) + np.eye(len(vals))
    assert d.min() >= 1e-5


def test_region_validation():
    with pytest.raises(ValueError):
        normalize_region((1, -1), 4)
    with pytest.raises(ValueError):
        normalize_region([(0, 1)] * 3, 4)
    with pytest.raises(ValueError):
        scan_bifurcation(catalog.builtin("oscillators"), (-1, 1), grid=1)


def test_pinch_counts():
    assert count_pinch_points(catalog.builtin("champagne"), (0.0, 0.0)) == 1
    assert count_pinch_points(catalog.builtin("spherical-pendulum"), (1.0, 0.0)) == 1
    with pytest.raises(NotFocusFocusValueError):
        count_pinch_points(catalog.builtin("oscillators"), (0.0, 0.0))


# exact model


def test_crossing_matrix():
    C = crossing_matrix()
    assert C == ((0, -1), (1, 2))
    assert det(C) == 1 and C[0][0] + C[1][1] == 2
    K = ((C[0][0] - 1, C[0][1]), (C[1][0], C[1][1] - 1))
    assert matmul(K, K) == ((0, 0), (0, 0))


def test_crossing_examples():
    atlas = ModelAtlas(3)
    assert ChartWord(1, 0).cross(atlas).winding == (0, 1)
    assert ChartWord(0, 1).cross(atlas).winding == (-1, 2)
    assert ChartWord(*DELTA).cross(atlas).winding == DELTA


def test_atlas_is_cyclic():
    atlas = ModelAtlas(4)
    w = ChartWord(1, 0)
    for _ in range(4):
        w = w.cross(atlas)
    assert w.chart == 0 and w.crossings == 4


@pytest.mark.parametrize("n", [1, 2, 5])
def test_model_examples(n):
    assert model_monodromy(n).entries == ((1, n), (0, 1))


@given(st.integers(1, 64), st.integers(1, 64))
def test_model_composes_like_coverings(m, n):
    assert model_monodromy(m + n).entries == matmul(model_monodromy(m).entries, model_monodromy(n).entries)


@pytest.mark.parametrize("n", [1, 3])
def test_affine_holonomy(n):
    H = model_affine_holonomy(n)
    assert H == ((1, n), (0, 1)) == model_monodromy(n).entries
    assert fixed_vector(H) == (1, 0)


@pytest.mark.parametrize("bad", [0, -2, 1.5])
def test_model_domain(bad):
    with pytest.raises(ValueError):
        model_monodromy(bad)
    with pytest.raises(ValueError):
        model_affine_holonomy(bad)
