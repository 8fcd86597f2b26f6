import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import mp_eval
from optiquad.errors import DomainError, NondifferentiableError, ParseError, UnknownIdentifierError
from optiquad.expr import BinOp, Call, Const, Jet2, Neg, Var, component, eval_jet, jets, parse, to_source


def test_parse_example_integrand():
    ast = parse("cbrt(sin(t^2))")
    assert ast == Call("cbrt", (Call("sin", (BinOp("^", Var(), Const(2.0)),)),))


def test_parse_variable():
    assert parse("t") == Var()


def test_parse_error_offset_and_expected():
    with pytest.raises(ParseError) as exc:
        parse("2*+3")
    assert exc.value.position == 2
    assert "offset 2" in str(exc.value)
    assert {"number", "identifier", "(", "-"} <= set(exc.value.expected)


@pytest.mark.parametrize("src", ["", "   ", "sin(t", "t +", "(t))", "sin t", "pow(t)", "t ** 2", "3 $ t"])
def test_malformed_inputs(src):
    with pytest.raises(ParseError):
        parse(src)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse("foo(t)")
    assert exc.value.position == 0


def test_precedence_and_associativity():
    assert parse("-t^2") == Neg(BinOp("^", Var(), Const(2.0)))
    assert parse("2^3^2") == BinOp("^", Const(2.0), BinOp("^", Const(3.0), Const(2.0)))
    assert parse("1-2-3") == BinOp("-", BinOp("-", Const(1.0), Const(2.0)), Const(3.0))
    assert parse("t^-1") == BinOp("^", Var(), Neg(Const(1.0)))
    assert parse("pow(t, 2)") == Call("pow", (Var(), Const(2.0)))
    assert eval_jet(parse("2^3^2"), 0.0).v == 512.0


def test_constants():
    assert eval_jet(parse("pi + e"), 0.0).v == pytest.approx(math.pi + math.e)
    assert parse("1.5e-3") == Const(1.5e-3)


@pytest.mark.parametrize(
    "src, t, expected",
    [
        ("t^2", 3.0, (9.0, 6.0, 2.0)),
        ("sqrt(t)", 1.0, (1.0, 0.5, -0.25)),
        ("exp(2*t)", 0.0, (1.0, 2.0, 4.0)),
        ("log(t)", 2.0, (math.log(2), 0.5, -0.25)),
        ("1/t", 2.0, (0.5, -0.25, 0.25)),
        ("cbrt(t)", -8.0, (-2.0, 1 / 12, 1 / 144)),
        ("abs(t)", -3.0, (3.0, -1.0, 0.0)),
        ("t^t", 1.0, (1.0, 1.0, 2.0)),
        ("(-2)^3", 0.0, (-8.0, 0.0, 0.0)),
        ("tan(t)", 0.0, (0.0, 1.0, 0.0)),
    ],
)
def test_eval_jet_closed_forms(src, t, expected):
    j = eval_jet(parse(src), t)
    assert (j.v, j.d1, j.d2) == pytest.approx(expected, rel=1e-14, abs=1e-15)


def test_sqrt_against_finite_differences():
    f = lambda x: math.sqrt(x)  # noqa: E731
    h = 1e-5
    j = eval_jet(parse("sqrt(t)"), 1.0)
    assert j.d1 == pytest.approx((f(1 + h) - f(1 - h)) / (2 * h), abs=1e-6)
    h = 1e-4
    assert j.d2 == pytest.approx((f(1 + h) - 2 * f(1) + f(1 - h)) / h**2, abs=1e-6)


def test_derivative_singularity_near_zero():
    ast = parse("cbrt(sin(t^2))")
    d1 = [eval_jet(ast, t).d1 for t in (1e-3, 1e-6, 1e-9)]
    assert all(math.isfinite(d) for d in d1)
    assert d1[0] < d1[1] < d1[2]
    assert d1[2] > 1e2
    # the vectorized path reports the singular value without raising
    assert not np.isfinite(jets(ast, np.array([0.0])).d1[0])


@pytest.mark.parametrize(
    "src, t, exc",
    [
        ("log(t)", 0.0, DomainError),
        ("log(t)", -1.0, DomainError),
        ("sqrt(t)", -1e-3, DomainError),
        ("1/t", 0.0, DomainError),
        ("t^0.5", -1.0, DomainError),
        ("t^-2", 0.0, DomainError),
        ("t^t", -1.0, DomainError),
        ("abs(t)", 0.0, NondifferentiableError),
    ],
)
def test_eval_jet_domain_errors(src, t, exc):
    with pytest.raises(exc):
        eval_jet(parse(src), t)


def test_vectorized_jets_never_raise():
    t = np.array([-1.0, 0.0, 1.0])
    j = jets(parse("log(t) + sqrt(t) + 1/t"), t)
    assert np.isnan(j.v[0]) and np.isfinite(j.v[2])
    assert component(parse("t^0.5"), 0)(t)[0] != component(parse("t^0.5"), 0)(t)[0]  # NaN
    assert component(parse("t^3"), 0)(-2.0) == -8.0
    assert component(parse("7"), 2)(t).shape == t.shape


def test_component_order_checked():
    with pytest.raises(DomainError):
        component(parse("t"), 3)


@settings(max_examples=30)
@given(
    st.tuples(*[st.floats(-3, 3)] * 3),
    st.tuples(*[st.floats(-3, 3)] * 3),
)
def test_jet_product_rule(a, b):
    f, g = Jet2(*a), Jet2(*b)
    p = f * g
    assert p.v == pytest.approx(a[0] * b[0], abs=1e-13)
    assert p.d1 == pytest.approx(a[1] * b[0] + a[0] * b[1], abs=1e-13)
    assert p.d2 == pytest.approx(a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2], abs=1e-13)


# -- automatic differentiation on random expressions --------------------------

_UNARY = [
    "sin({})",
    "cos({})",
    "exp(sin({}))",
    "sqrt(1 + ({})^2)",
    "log(2 + cos({}))",
    "cbrt(3 + sin({}))",
    "({})^2",
    "({})^3",
    "-({})",
    "abs(2 + sin({}))",
    "tan(sin({})/2)",
]
_BINARY = ["({}) + ({})", "({}) - ({})", "({}) * ({})", "({}) / (2 + cos({}))", "pow(2 + sin({}), cos({}))"]


def random_expression(rng: random.Random, depth: int) -> str:
    if depth == 0 or rng.random() < 0.2:
        return "t" if rng.random() < 0.6 else f"{rng.uniform(0.5, 2.0):.3f}"
    if rng.random() < 0.55:
        return rng.choice(_UNARY).format(random_expression(rng, depth - 1))
    return rng.choice(_BINARY).format(random_expression(rng, depth - 1), random_expression(rng, depth - 1))


def _random_cases(count=100, seed=7):
    rng = random.Random(seed)
    return [(random_expression(rng, 5), rng.uniform(-1.5, 1.5)) for _ in range(count)]


@pytest.mark.parametrize("src, t", _random_cases())
def test_ad_matches_finite_differences(src, t):
    ast = parse(src)
    f = component(ast, 0)
    j = eval_jet(ast, t)
    h1, h2 = 1e-5, 1e-4
    fd1 = (f(t + h1) - f(t - h1)) / (2 * h1)
    fd2 = (f(t + h2) - 2 * f(t) + f(t - h2)) / h2**2
    scale = max(1.0, abs(j.v))
    assert j.d1 == pytest.approx(fd1, rel=1e-5, abs=1e-5 * scale)
    assert j.d2 == pytest.approx(fd2, rel=1e-5, abs=1e-5 * scale)


@pytest.mark.parametrize("src, t", _random_cases(30, seed=11))
def test_ad_matches_high_precision_differentiation(src, t):
    ast = parse(src)
    j = eval_jet(ast, t)
    with mpmath.workdps(40):
        d1 = float(mpmath.diff(lambda x: mp_eval(ast, x), mpmath.mpf(t), 1))
        d2 = float(mpmath.diff(lambda x: mp_eval(ast, x), mpmath.mpf(t), 2))
    scale = max(1.0, abs(d1), abs(d2))
    assert j.d1 == pytest.approx(d1, abs=1e-11 * scale)
    assert j.d2 == pytest.approx(d2, abs=1e-11 * scale)


# -- printing and re-parsing ----------------------------------------------------

_leaf = st.one_of(
    st.just(Var()),
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Const),
    st.sampled_from([Const(math.pi, "pi"), Const(math.e, "e")]),
)
_fnames = st.sampled_from(["sin", "cos", "tan", "exp", "log", "sqrt", "cbrt", "abs"])


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/^"), children, children),
        st.builds(lambda n, a: Call(n, (a,)), _fnames, children),
        st.builds(lambda a, b: Call("pow", (a, b)), children, children),
    )


@settings(max_examples=200)
@given(st.recursive(_leaf, _extend, max_leaves=20))
def test_print_parse_round_trip(ast):
    assert parse(to_source(ast)) == ast


@pytest.mark.parametrize("src", ["cbrt(sin(t^2))", "-t^2 + 3*t - 1/t", "pow(t, 2)^3", "2^-t"])
def test_round_trip_of_parsed_text(src):
    ast = parse(src)
    assert parse(to_source(ast)) == ast
