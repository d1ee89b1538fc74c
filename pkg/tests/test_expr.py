"""
Tests for expression parsing, evaluation, Laurent forms and Taylor truncation
"""

import numpy as np
import pytest

from algebra.expr import (Const, Func, Power, Var, eval_point, eval_points, evaluate_with_gradient,
                          parse_expression, split_top_level, transcendental_depth)
from algebra.laurent import LaurentPolynomial, random_laurent, to_laurent, try_laurent
from algebra.series import MAX_SERIES_DEPTH, truncate_series
from core.exceptions import (ExpressionSyntaxError, NegativePowerError, NegativePowerInEntireContextError,
                             NotPolynomialError, SeriesDepthError, UnknownIdentifierError,
                             VariableIndexError, ZeroCoordinateError)


@pytest.mark.parametrize("text, n", [
    ("1 + z1 + z2", 2),
    ("z1*z2 - 1", 2),
    ("-2*z1^3 + 0.5*z2^-1", 2),
    ("exp(z1) - sin(pi*z2)", 2),
    ("(1 + z1 + z2)*(2 + z1 + z2)", 2),
    ("cos(i*z1)^2", 1),
])
def test_printed_form_parses_back_to_same_tree(text, n):
    f = parse_expression(text, n)
    assert parse_expression(str(f), n) == f


def test_normal_form_of_the_line():
    assert str(parse_expression("1+z1+z2", 2)) == "1 + z1 + z2"


def test_t_is_the_first_parameter():
    f = parse_expression("t + t2", 2)
    assert f.root.terms == (Var(1), Var(2))


def test_constants_and_functions():
    f = parse_expression("exp(pi*i)", 1)
    assert isinstance(f.root, Func)
    assert eval_point(f, [1.0]).value == pytest.approx(-1.0)
    assert parse_expression("pi", 1).root == Const(complex(np.pi), "pi")


def test_negative_power_on_variable_is_allowed():
    f = parse_expression("z1^-2", 1)
    assert f.root == Power(Var(1), -2)
    assert f.has_negative_powers


def test_negative_power_on_sum_is_rejected():
    with pytest.raises(NegativePowerError):
        parse_expression("(1 + z1)^-1", 1)


def test_unknown_identifier_reports_byte_offset():
    with pytest.raises(UnknownIdentifierError) as e:
        parse_expression("1 + w", 2)
    assert e.value.offset == 4


def test_variable_outside_arity():
    with pytest.raises(VariableIndexError):
        parse_expression("z1 + z3", 2)


@pytest.mark.parametrize("text", ["1 + + z1", "exp", "z1 *", "(z1"])
def test_syntax_errors(text):
    with pytest.raises(ExpressionSyntaxError) as e:
        parse_expression(text, 1)
    assert e.value.offset >= 0


def test_split_top_level():
    assert split_top_level("(t, exp(t))") == ["t", "exp(t)"]
    assert split_top_level("t, sin(t), exp(t)") == ["t", "sin(t)", "exp(t)"]
    assert split_top_level("(t + 1)*(t - 1), t") == ["(t + 1)*(t - 1)", "t"]


def test_transcendental_depth():
    assert transcendental_depth(parse_expression("1 + z1", 1).root) == 0
    assert transcendental_depth(parse_expression("exp(sin(z1)) + z1", 1).root) == 2


def test_evaluation_at_a_point():
    f = parse_expression("1 + z1 + z2", 2)
    result = eval_point(f, [1.0, 2.0])
    assert result.value == pytest.approx(4.0)
    assert result.finite


def test_evaluation_rejects_zero_coordinates():
    with pytest.raises(ZeroCoordinateError):
        eval_point(parse_expression("z1", 1), [0.0])


def test_overflow_is_flagged_not_raised():
    values, finite = eval_points(parse_expression("exp(z1)", 1), [[1000.0], [1.0]])
    assert not finite[0]
    assert finite[1]
    assert values[1] == pytest.approx(np.e)


def test_gradient_of_a_product():
    f = parse_expression("z1*z2 + exp(z1)", 2)
    values, gradient = evaluate_with_gradient(f, [[2.0, 3.0]])
    assert values[0] == pytest.approx(6.0 + np.exp(2.0))
    assert gradient[0, 0] == pytest.approx(3.0 + np.exp(2.0))
    assert gradient[0, 1] == pytest.approx(2.0)


def test_laurent_form_of_a_square():
    p = to_laurent(parse_expression("(1 + z1)^2", 1))
    assert p.support() == ((0,), (1,), (2,))
    assert p.coefficient((1,)) == pytest.approx(2.0)


def test_laurent_cancellation_removes_terms():
    p = to_laurent(parse_expression("z1*z2 + 1 - z2*z1", 2))
    assert p.support() == ((0, 0),)


def test_transcendental_expression_is_not_a_polynomial():
    f = parse_expression("exp(z1) + z2", 2)
    assert not f.is_polynomial
    with pytest.raises(NotPolynomialError):
        to_laurent(f)
    assert try_laurent(f) is None


def test_newton_polytope_of_the_line():
    p = LaurentPolynomial.from_dict({(0, 0): 1, (1, 0): 1, (0, 1): 1}, 2)
    polytope = p.newton_polytope()
    assert polytope.dim == 2
    assert {tuple(int(x) for x in v) for v in polytope.vertices} == {(0, 0), (1, 0), (0, 1)}


def test_exp_series_coefficients():
    truncation = truncate_series(parse_expression("exp(z1)", 1), 3)
    assert truncation.support() == ((0,), (1,), (2,), (3,))
    assert truncation.payload.coefficient((3,)) == pytest.approx(1 / 6)
    assert truncation.tail_nonzero


def test_polynomial_series_has_no_tail():
    truncation = truncate_series(parse_expression("1 + z1*z2", 2), 4)
    assert set(truncation.support()) == {(0, 0), (1, 1)}
    assert not truncation.tail_nonzero


def test_sin_series_is_odd():
    truncation = truncate_series(parse_expression("sin(z1)", 1), 5)
    assert truncation.support() == ((1,), (3,), (5,))
    assert truncation.payload.coefficient((3,)) == pytest.approx(-1 / 6)


def test_series_rejects_negative_powers():
    with pytest.raises(NegativePowerInEntireContextError):
        truncate_series(parse_expression("z1^-1 + 1", 1), 3)


def test_series_depth_limit():
    text = "exp(" * (MAX_SERIES_DEPTH + 1) + "z1" + ")" * (MAX_SERIES_DEPTH + 1)
    with pytest.raises(SeriesDepthError):
        truncate_series(parse_expression(text, 1), 2)


def random_polynomial_text(rng: np.random.Generator, n: int) -> str:
    """1 + a product of powered sums of Laurent monomials"""
    factors = []
    for _ in range(int(rng.integers(1, 4))):
        terms = []
        for _ in range(int(rng.integers(1, 4))):
            powers = [f"z{j + 1}^{int(a)}" for j, a in enumerate(rng.choice([-2, -1, 1, 2], size=n))
                      if rng.random() < 0.7]
            terms.append("*".join([str(int(rng.integers(1, 6)))] + powers))
        factors.append(f"({' - '.join(terms)})^{int(rng.integers(1, 3))}")
    return "1 + " + "*".join(factors)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laurent_form_evaluates_like_the_expression(n):
    rng = np.random.default_rng(100 + n)
    Z = np.exp(1j * rng.uniform(0.0, 2 * np.pi, (50, n)))
    for _ in range(20):
        f = parse_expression(random_polynomial_text(rng, n), n)
        assert f.is_polynomial
        values, finite = eval_points(f, Z)
        assert finite.all()
        scale = 1.0 + np.abs(values).max()
        np.testing.assert_allclose(to_laurent(f).evaluate(Z), values, rtol=1e-10, atol=1e-10 * scale)


@pytest.mark.parametrize("text, n", [
    ("exp(z1 + z2)", 2),
    ("sin(z1)*exp(z2)", 2),
    ("cos(z1*z2) + z1^2", 2),
    ("exp(z1)*cos(z2) - z2*z3", 3),
])
def test_longer_truncation_restricts_to_the_shorter(text, n):
    f = parse_expression(text, n)
    short = truncate_series(f, 4)
    long = truncate_series(f, 7)
    restricted = {e: c for e, c in long.payload.terms if sum(e) <= 4}
    assert set(restricted) == set(short.support())
    for exponent, value in short.payload.terms:
        assert restricted[exponent] == pytest.approx(value, rel=1e-12, abs=1e-15)


def test_tail_flag_only_sees_the_next_degree():
    f = parse_expression("sin(pi*z1*z2)", 2)
    assert not truncate_series(f, 4).tail_nonzero
    assert truncate_series(f, 5).tail_nonzero
    assert truncate_series(f, 6).payload.coefficient((3, 3)) == pytest.approx(-np.pi ** 3 / 6)


def vertex_set(p: LaurentPolynomial):
    return {tuple(int(x) for x in v) for v in p.newton_polytope().vertices}


@pytest.mark.parametrize("arity", [1, 2, 3])
def test_newton_polytope_ignores_scaling(arity):
    rng = np.random.default_rng(arity)
    for _ in range(10):
        p = random_laurent(rng, arity)
        assert vertex_set(p.scale(2.5 - 1j)) == vertex_set(p)


@pytest.mark.parametrize("arity", [1, 2, 3])
def test_newton_polytope_follows_monomial_shifts(arity):
    rng = np.random.default_rng(10 + arity)
    for _ in range(10):
        p = random_laurent(rng, arity)
        beta = tuple(int(b) for b in rng.integers(-4, 5, size=arity))
        shifted = p * LaurentPolynomial.monomial(beta, arity)
        assert vertex_set(shifted) == {tuple(a + b for a, b in zip(v, beta)) for v in vertex_set(p)}
