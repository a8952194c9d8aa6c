import numpy as np
import pytest

from subcurv import ArityError, DegenerateMetric, ParseError, UnknownSymbol, parse_metric_expression
from subcurv.expr import compile_expression, constant_value, parse_expression, tokenize


def ev(text, **env):
    names = list(env)
    return compile_expression(parse_expression(text), names)([env[n] for n in names])


@pytest.mark.parametrize("text,value", [
    ("1 + 2*3", 7.0),
    ("-2^2", -4.0),
    ("2^3^2", 512.0),
    ("(1 + 2)*3", 9.0),
    ("8/4/2", 1.0),
    ("1.5e1 - .5", 14.5),
    ("cos(pi)", -1.0),
    ("sqrt(16) + log(exp(2))", 6.0),
    ("--3", 3.0),
])
def test_expression_values(text, value):
    assert constant_value(parse_expression(text)) == pytest.approx(value)


def test_coordinates_and_unicode_identifiers():
    assert ev("sin(θ)^2 + u*v", θ=np.pi / 2, u=2.0, v=3.0) == pytest.approx(7.0)


def test_comments_and_newlines_in_brackets():
    m = parse_metric_expression("""
    # comment line
    dim = 2   # trailing comment
    coords = (u, v)
    g = [[1, 0],
         [0, exp(2*u)]]
    """)
    assert m.dim == 2 and m.coords == ("u", "v")
    assert np.allclose(m.metric(np.array([0.5, 0.0])), np.diag([1, np.e]))


def test_semicolon_separated_statements():
    m = parse_metric_expression("dim=2; coords=(u,v); g=[[1,0],[0,exp(2*u)]]")
    assert m.dim == 2


def test_parse_error_location_and_expected_set():
    with pytest.raises(ParseError) as info:
        parse_metric_expression("coords = (x, y)\ng = [[1, 0], [0, 1 + ]]")
    err = info.value
    assert (err.line, err.column) == (2, 22)
    assert "number" in err.expected and "identifier" in err.expected
    assert "line 2, column 22" in str(err)


def test_bad_character():
    with pytest.raises(ParseError) as info:
        tokenize("g = [[1 $ 2]]")
    assert info.value.column == 9


@pytest.mark.parametrize("text", [
    "g = [[1, 0], [0]]",
    "dim = 3\ng = [[1, 0], [0, 1]]",
    "coords = (x)\ng = [[1, 0], [0, 1]]",
    "coords = (x, x)\ng = [[1, 0], [0, 1]]",
    "coords = (x, y)\ng = [[1, x], [0, 1]]",
])
def test_arity_errors(text):
    with pytest.raises(ArityError):
        parse_metric_expression(text)


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_metric_expression("coords = (x, y)\ng = [[1, 0], [0, z]]")


def test_unknown_function():
    with pytest.raises((UnknownSymbol, ParseError)):
        parse_metric_expression("coords = (x, y)\ng = [[1, 0], [0, erf(x)]]")


def test_indefinite_metric_rejected():
    with pytest.raises(DegenerateMetric):
        parse_metric_expression("g=[[1,0],[0,-1]]")


def test_duplicate_statement():
    with pytest.raises(ParseError):
        parse_metric_expression("dim = 2\ndim = 2\ng = [[1,0],[0,1]]")
