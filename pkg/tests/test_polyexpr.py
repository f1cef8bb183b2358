import numpy as np
import pytest

from weierkern.errors import DimensionError, ParseError
from weierkern.polyexpr import MultiPoly, format_poly, parse, parse_scalar, resultant, sylvester_matrix

X1, X2, X3 = (MultiPoly.variable(3, v) for v in range(3))


def test_parse_builds_the_fixture_polynomial() -> None:
    f = parse("x3^3 + x1^3 + x2^3 + 1")

    assert f == X1 ** 3 + X2 ** 3 + X3 ** 3 + 1
    assert f.degree() == 3
    assert f.degree(1) == 3


def test_format_is_graded_lex_descending_and_parses_back() -> None:
    f = parse("x3^3 + x1^3 + x2^3 + 1")
    g = parse("x2*x3 - x1")

    assert format_poly(f) == "x1^3 + x2^3 + x3^3 + 1"
    assert format_poly(g) == "x2*x3 - x1"
    assert parse(format_poly(f)) == f


def test_format_complex_and_negative_coefficients() -> None:
    assert format_poly(parse("(1+2i)*x1 - 3")) == "(1+2i)*x1 - 3"
    assert format_poly(parse("-x1^2 + 0.5")) == "-x1^2 + 0.5"
    assert format_poly(MultiPoly.zero(3)) == "0"


def test_custom_variable_names() -> None:
    p = parse("y^2 - x", ["x", "y"])

    assert p.nvars == 2
    assert format_poly(p, ["x", "y"]) == "y^2 - x"


def test_implicit_multiplication_is_rejected() -> None:
    with pytest.raises(ParseError):
        parse("2x1")


def test_parse_error_reports_byte_offset() -> None:
    with pytest.raises(ParseError) as info:
        parse("x1+$")
    assert info.value.offset == 3

    with pytest.raises(ParseError) as info:
        parse("x1 + $")
    assert info.value.offset == 5


def test_unknown_variable_and_bad_exponent() -> None:
    with pytest.raises(ParseError) as info:
        parse("x4 + 1")
    assert info.value.offset == 0

    with pytest.raises(ParseError):
        parse("x1^x2")
    with pytest.raises(ParseError):
        parse("(x1 + 1")


def test_parse_scalar() -> None:
    assert parse_scalar("1-2i") == complex(1, -2)
    assert parse_scalar("(3)") == 3
    assert parse_scalar("-0.5") == -0.5
    with pytest.raises(ParseError):
        parse_scalar("x1")


def test_negative_exponent_is_a_dimension_error() -> None:
    with pytest.raises(DimensionError):
        MultiPoly(3, {(0, -1, 0): 1})


def test_evaluation_broadcasts_over_arrays() -> None:
    f = parse("x3^3 + x1^3 + x2^3 + 1")
    x1 = np.array([2.0, -1.0])
    values = f(x1, np.array([-2.0, -1.0]), np.array([-1.0, 1.0]))

    assert values.shape == (2,)
    assert values[0] == 0
    assert values[1] == 0


def test_divided_difference_matches_difference_quotient_and_derivative() -> None:
    p = X1 ** 3

    assert p.divided_difference_at(0, (2, 0, 0), 1) == 7
    assert p.divided_difference_at(0, (2, 0, 0), 2) == 12
    assert p.partial(0)(2, 0, 0) == 12

    symbolic = p.divided_difference(0)
    assert symbolic.nvars == 4
    assert symbolic(2, 0, 0, 1) == 7


def test_partial_and_substitute() -> None:
    f = parse("x1^2*x2 + x3")

    assert f.partial(0) == 2 * X1 * X2
    assert f.substitute(2, X1 * X2) == X1 ** 2 * X2 + X1 * X2


def test_partial_eval_and_univariate_coefficients() -> None:
    f = parse("x1^2*x2 + x3")

    assert f.partial_eval({0: 2}) == 4 * X2 + X3
    assert f.univariate_coeffs(0) == [X3, MultiPoly.zero(3), X2]


def test_homogenize_and_top_form() -> None:
    p = parse("x1^2 + x2 + 1")
    w = MultiPoly.variable(4, 3)
    y1, y2 = MultiPoly.variable(4, 0), MultiPoly.variable(4, 1)

    assert p.homogenize() == y1 ** 2 + y2 * w + w ** 2
    assert p.top_form() == X1 ** 2


def test_exact_division() -> None:
    assert (X1 ** 2 - X2 ** 2).exact_div(X1 - X2) == X1 + X2


def test_resultant_of_univariate_pair() -> None:
    # p(1) = -4; deg p * deg q is even, so the row order adds no sign
    p = parse("x2^2 - 5")
    q = parse("x2 - 1")

    assert resultant(p, q, 1) == MultiPoly.constant(3, -4)


def test_resultant_eliminates_x3() -> None:
    r = resultant(parse("x2*x3 - x1"), parse("x3 - 2"), 2)

    assert r == 2 * X2 - X1


def test_sylvester_matrix_shape() -> None:
    rows = sylvester_matrix(parse("x3^3 + x1"), parse("x2*x3 - x1"), 2)

    assert len(rows) == 4
    assert all(len(row) == 4 for row in rows)


def _random_poly(rng: np.random.Generator, nvars: int = 3, terms: int = 5) -> MultiPoly:
    exps = rng.integers(0, 3, size=(terms, nvars))
    coeffs = rng.integers(-3, 4, size=terms)
    return MultiPoly(nvars, [(tuple(exp), int(c)) for exp, c in zip(exps, coeffs)])


@pytest.mark.parametrize("seed", range(8))
def test_format_parses_back_for_random_polynomials(seed: int) -> None:
    p = _random_poly(np.random.default_rng(seed))

    assert parse(format_poly(p)) == p


@pytest.mark.parametrize("seed", range(8))
def test_partial_obeys_the_product_rule(seed: int) -> None:
    rng = np.random.default_rng(100 + seed)
    p, q = _random_poly(rng), _random_poly(rng)

    for var in range(3):
        assert (p * q).partial(var) == p.partial(var) * q + p * q.partial(var)


@pytest.mark.parametrize("seed", range(8))
def test_divided_difference_at_random_points(seed: int) -> None:
    rng = np.random.default_rng(200 + seed)
    p = _random_poly(rng, terms=6)
    point = [complex(*rng.normal(size=2)) for _ in range(3)]
    other = complex(*rng.normal(size=2))

    for var in range(3):
        moved = list(point)
        moved[var] = other
        quotient = (p(*point) - p(*moved)) / (point[var] - other)
        assert p.divided_difference_at(var, point, other) == pytest.approx(quotient, rel=1e-9, abs=1e-9)
        assert p.divided_difference(var)(*point, other) == pytest.approx(quotient, rel=1e-9, abs=1e-9)
        assert p.divided_difference_at(var, point, point[var]) == pytest.approx(p.partial(var)(*point))
