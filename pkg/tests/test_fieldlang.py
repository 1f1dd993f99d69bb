from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gfvc import fieldlang as fl
from gfvc.errors import DomainError, EvaluationError, FieldSyntaxError
from gfvc.fieldlang import Add, Call, Div, Mul, Neg, Num, Pow, Sub, Var

# {{{ strategies

variables = st.sampled_from([Var("x"), Var("y"), Var("z")])
numbers = st.floats(min_value=0.0, max_value=50.0, allow_nan=False).map(Num)
exponents = st.sampled_from([2.0, 3.0, 0.5, 1.5]).map(Num)


def _extend(children):
    binary = st.sampled_from([Add, Sub, Mul, Div])
    return st.one_of(
        st.builds(lambda op, a, b: op(a, b), binary, children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, exponents),
        st.builds(Call, st.sampled_from(["exp", "sin", "cos", "sqrt"]), children),
    )


expressions = st.recursive(st.one_of(variables, numbers), _extend, max_leaves=8)
smooth_expressions = st.recursive(
    st.one_of(variables, st.floats(min_value=0.5, max_value=3.0).map(Num)),
    lambda c: st.one_of(
        st.builds(lambda op, a, b: op(a, b), st.sampled_from([Add, Sub, Mul]), c, c),
        st.builds(Neg, c),
        st.builds(lambda a: Pow(Add(Mul(a, a), Num(1.0)), Num(0.5)), c),
        st.builds(Call, st.sampled_from(["sin", "cos"]), c),
        st.builds(lambda a: Div(Num(1.0), Add(Num(1.0), Mul(a, a))), c),
        st.builds(lambda a: Call("sqrt", Add(Num(2.0), Call("sin", a))), c),
    ),
    max_leaves=6,
)
points = st.tuples(*[st.floats(min_value=0.3, max_value=2.0)] * 3)

# }}}


def test_parse_examples():
    assert fl.parse("x*y + z^0.5") == Add(Mul(Var("x"), Var("y")), Pow(Var("z"), Num(0.5)))
    assert fl.parse("-x^2") == Neg(Pow(Var("x"), Num(2.0)))
    with pytest.raises(FieldSyntaxError) as info:
        fl.parse("x*(")
    assert info.value.offset == 3


def test_left_associativity_and_precedence():
    assert fl.parse("x - y - z") == Sub(Sub(Var("x"), Var("y")), Var("z"))
    assert fl.parse("x/y/z") == Div(Div(Var("x"), Var("y")), Var("z"))
    assert fl.parse("x + y*z") == Add(Var("x"), Mul(Var("y"), Var("z")))
    assert fl.parse("2*pi") == Mul(Num(2.0), Num(math.pi))


def test_eval_examples():
    assert fl.eval_at(fl.parse("x*y"), (2, 3, 0)) == 6.0
    assert fl.eval_at(fl.parse("x^0.5"), (4, 0, 0)) == 2.0
    with pytest.raises(EvaluationError):
        fl.eval_at(fl.parse("1/x"), (0, 1, 1))
    with pytest.raises(EvaluationError):
        fl.eval_at(fl.parse("(x - 2)^0.5"), (1, 0, 0))
    with pytest.raises(EvaluationError):
        fl.eval_at(fl.parse("sqrt(y - 2)"), (1, 0, 0))


def test_diff_examples():
    d = fl.diff(fl.parse("x^2"), "x")
    assert d == Mul(Num(2.0), Pow(Var("x"), Num(1.0)))
    assert fl.to_text(d) == "2*x^1"
    assert fl.diff(fl.parse("x*y"), "y") == Var("x")
    assert fl.eval_at(fl.diff(fl.parse("x^0.5"), "x"), (1, 1, 1)) == pytest.approx(0.5)


def test_endpoint_exponent_examples():
    assert fl.endpoint_exponent(fl.parse("x^(-0.5) + x"), "x") == -0.5
    assert fl.endpoint_exponent(fl.parse("3 + x*y"), "x") == 0.0
    with pytest.raises(DomainError):
        fl.endpoint_exponent(fl.parse("x^(-1.5)"), "x")


def test_endpoint_exponent_sees_through_elementary_functions():
    assert fl.endpoint_exponent(fl.parse("sin(x)^(-0.5)"), "x") == -0.5
    assert fl.endpoint_exponent(fl.parse("(x + x^2)^(-0.25)*exp(y)"), "x") == -0.25
    assert fl.endpoint_exponent(fl.parse("sqrt(x)^(-1)"), "x") == -0.5


@pytest.mark.parametrize("text", ["(x - sin(x))^(-0.5)", "(exp(x) - 1)^(-0.5)", "exp(1/x)"])
def test_endpoint_exponent_fallback_warns(text):
    with pytest.warns(fl.InferenceWarning):
        assert fl.endpoint_exponent(fl.parse(text), "x") == 0.0


def test_no_warning_for_plain_polynomials():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fl.endpoint_exponent(fl.parse("x*y - x*z + x^2"), "x")


@pytest.mark.parametrize("text", ["w + 1", "xx", "foo(x)", "r*phi"])
def test_unknown_identifiers_rejected(text):
    with pytest.raises(FieldSyntaxError):
        fl.parse(text)


def test_declared_variables_replace_defaults():
    node = fl.parse("r*sin(phi) + z", ("r", "phi", "z"))
    assert fl.free_variables(node) == {"r", "phi", "z"}
    with pytest.raises(FieldSyntaxError):
        fl.parse("x", ("r", "phi", "z"))


def test_parser_needs_three_variables():
    with pytest.raises(DomainError):
        fl.parse("x", ("x", "y"))


@pytest.mark.parametrize("text", ["", "x +", "(x", "x)", "2 3", "x^y", "sin x", "x**2"])
def test_syntax_errors(text):
    with pytest.raises(FieldSyntaxError):
        fl.parse(text)


@given(expressions)
def test_round_trip_is_structural(e):
    assert fl.parse(fl.to_text(e)) == e


@settings(max_examples=100)
@given(smooth_expressions, points, st.sampled_from(["x", "y", "z"]))
def test_diff_matches_finite_differences(e, p, var):
    k = "xyz".index(var)
    d = fl.eval_at(fl.diff(e, var), p)
    h = 1e-5

    def at(s):
        q = list(p)
        q[k] = s
        return fl.eval_at(e, q)

    # Richardson-extrapolated central difference
    d1 = (at(p[k] + h) - at(p[k] - h)) / (2 * h)
    d2 = (at(p[k] + 2 * h) - at(p[k] - 2 * h)) / (4 * h)
    fd = (4 * d1 - d2) / 3
    scale = max(1.0, abs(d), abs(fl.eval_at(e, p)))
    assert abs(d - fd) <= 1e-6 * scale


@given(expressions, points)
def test_evaluation_is_total_or_raises_cleanly(e, p):
    try:
        value = fl.eval_at(e, p)
    except EvaluationError:
        return
    assume(math.isfinite(value))
    assert isinstance(value, float)


def test_vectorized_evaluation_broadcasts():
    node = fl.parse("x*y + z")
    out = fl.evaluate(node, {"x": np.array([1.0, 2.0]), "y": 3.0, "z": np.array([0.5, 0.5])})
    assert np.allclose(out, [3.5, 6.5])


def test_constant_folding_helpers():
    assert fl.const_value(fl.parse("pi/2")) == pytest.approx(math.pi / 2)
    assert fl.const_value(fl.parse("x + 1")) is None
    assert fl.mul(fl.num(1.0), Var("x")) == Var("x")
    assert fl.add(fl.num(0.0), Var("y")) == Var("y")


def test_substitute():
    node = fl.substitute(fl.parse("x*y"), {"y": fl.parse("z + 1")})
    assert fl.eval_at(node, (2.0, 100.0, 3.0)) == 8.0


def test_syntax_error_offset_is_in_bytes():
    with pytest.raises(FieldSyntaxError) as info:
        fl.parse("x + é")
    assert info.value.offset == 4
