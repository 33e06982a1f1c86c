import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from monodromy_lab import catalog, expr
from monodromy_lab.errors import EvaluationError, ParseError, UnknownSystemError
from monodromy_lab.geometry import fd_gradient, gradients, moment_map

VARS = st.sampled_from(expr.VARIABLES).map(expr.Var)
NUMS = st.floats(-5, 5, allow_nan=False).map(lambda v: expr.Num(round(v, 3)))


def _trees(children):
    return st.one_of(
        st.builds(expr.BinOp, st.sampled_from("+-*"), children, children),
        st.builds(expr.Neg, children),
        st.builds(expr.Call, st.sampled_from(["sin", "cos"]), children),
        st.builds(lambda a: expr.BinOp("^", a, expr.Num(2.0)), children),
    )


TREES = st.recursive(st.one_of(VARS, NUMS), _trees, max_leaves=8)
POINTS = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=4, max_size=4)


def env_of(p):
    return dict(zip(expr.VARIABLES, p))


def test_precedence_and_associativity():
    f = expr.compile_function(expr.parse("2^3^2 - 8/4/2 - -x1"))
    assert f(1.0, 0, 0, 0) == 512 - 1 + 1


def test_unary_minus_binds_looser_than_power():
    assert expr.compile_function(expr.parse("-x1^2"))(3.0, 0, 0, 0) == -9.0


def test_functions_and_constants():
    f = expr.compile_function(expr.parse("sin(pi/2) + cos(0) + exp(0) + sqrt(4) + log(1)"))
    assert f(0, 0, 0, 0) == pytest.approx(5.0)


def test_domain_error_is_evaluation_error():
    with pytest.raises(EvaluationError):
        expr.compile_function(expr.parse("sqrt(x1)"))(-1.0, 0, 0, 0)
    with pytest.raises(EvaluationError):
        expr.compile_function(expr.parse("1/x1"))(0.0, 0, 0, 0)


def test_error_position_in_expression():
    with pytest.raises(ParseError) as ei:
        expr.parse("x1 + * y1", line=4, column=6)
    assert (ei.value.line, ei.value.column) == (4, 11)


@given(TREES)
def test_source_round_trip(tree):
    again = expr.parse(expr.to_source(tree))
    assert expr.to_source(again) == expr.to_source(tree)


@given(TREES, POINTS)
def test_compiled_matches_tree_walk(tree, p):
    try:
        want = expr.evaluate(tree, env_of(p))
    except (EvaluationError, OverflowError):
        return
    got = expr.compile_function(tree)(*p)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


@given(TREES, POINTS)
def test_symbolic_derivative_matches_fd(tree, p):
    f = expr.compile_function(tree)
    try:
        f(*p)
    except EvaluationError:
        return
    for i, name in enumerate(expr.VARIABLES):
        d = expr.compile_function(expr.diff(tree, name))(*p)
        h = 1e-6
        up, dn = list(p), list(p)
        up[i] += h
        dn[i] -= h
        fd = (f(*up) - f(*dn)) / (2 * h)
        assume(abs(d) < 1e6)
        assert d == pytest.approx(fd, rel=1e-5, abs=1e-5)


@pytest.mark.parametrize("name", [n for n in catalog.names() if catalog.entry(n).config])
def test_config_round_trip(name):
    text = catalog.builtin_config(name)
    ref = catalog.builtin(name)
    parsed = catalog.parse_system(text)
    assert parsed.name == name
    assert parsed.s1_index == ref.s1_index
    again = catalog.parse_definition(catalog.render_config(
        name, expr.to_source(catalog.parse_definition(text).f1),
        expr.to_source(catalog.parse_definition(text).f2), ref.s1_index))
    rng = np.random.default_rng(0)
    for x in rng.uniform(-2, 2, (50, 4)):
        assert np.allclose(moment_map(parsed, x), moment_map(ref, x), atol=1e-12)
        assert np.allclose(gradients(parsed, x), gradients(ref, x), atol=1e-10)
        f1 = expr.compile_function(again.f1)(*x)
        assert f1 == pytest.approx(moment_map(ref, x)[0], abs=1e-12)


def test_builtin_analytic_gradients_match_fd():
    rng = np.random.default_rng(1)
    for name in catalog.names():
        s = catalog.builtin(name)
        for x in rng.uniform(-1, 1, (10, s.dim)):
            assert np.allclose(fd_gradient(s, x), gradients(s, x), atol=1e-7)


def test_pendulum_has_no_text_form():
    assert catalog.entry("spherical-pendulum").config is None
    with pytest.raises(ValueError):
        catalog.builtin_config("spherical-pendulum")


def test_unknown_system_lists_catalog():
    with pytest.raises(UnknownSystemError) as ei:
        catalog.builtin("champagne-bottle")
    assert "champagne" in str(ei.value)
    assert isinstance(ei.value, KeyError)


def test_seeds_and_comments():
    text = "# a comment\n[system]\nname = t  # trailing\nF1 = x1*y1\nF2 = x2*y2\nseed = 0,0,0,0\nseed = 1,0,0,0\n"
    s = catalog.parse_system(text)
    assert len(s.known_equilibria) == 2
    assert s.fiber_seed == (0.0, 0.0, 0.0, 0.0)


def test_load_system_from_file(tmp_path):
    p = tmp_path / "sys.txt"
    p.write_text(catalog.builtin_config("champagne"))
    s = catalog.resolve(path=p)
    assert s.s1_index == 2
    assert moment_map(s, (1.0, 0.0, 0.0, 0.0))[0] == 0.0


@given(st.floats(0.2, 5.0))
def test_recombination_preserves_critical_points(a):
    s = catalog.builtin("champagne")
    r = catalog.recombine(s, [[a, 1.0], [0.0, 1.0]])
    x = np.array([0.3, -0.2, 0.5, 0.1])
    assert np.allclose(moment_map(r, x), [[a, 1.0], [0.0, 1.0]] @ moment_map(s, x))
    assert np.allclose(gradients(r, np.zeros(4)), 0.0)


def test_recombination_needs_invertible():
    with pytest.raises(ValueError):
        catalog.recombine(catalog.builtin("champagne"), [[1, 2], [2, 4]])


def test_expression_constants_exact():
    assert expr.evaluate(expr.parse("pi"), {}) == math.pi
