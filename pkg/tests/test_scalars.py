import pytest

from hodgebench.scalars import (
    Chart,
    ExprSyntaxError,
    UnknownVariableError,
    const,
    parse_expr,
    var,
)


@pytest.fixture
def chart2():
    return Chart.real(2)


def test_parse_polynomial_and_evaluate(chart2):
    e = parse_expr("x1^2 + i*x2", chart2)
    assert e.eval([2, 3]) == 4 + 3j


def test_parse_conjugation_pushes_to_coefficients(chart2):
    e = parse_expr("conj(x1 + i*x2)", chart2)
    expected = parse_expr("x1 - i*x2", chart2)
    assert e == expected


def test_parse_syntax_error_carries_offset(chart2):
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("x1 +* 2", chart2)
    assert err.value.position == 4


def test_parse_unknown_variable(chart2):
    with pytest.raises(UnknownVariableError):
        parse_expr("x1 + nope", chart2)


def test_parse_complex_aliases():
    chart = Chart.complex_chart(1)
    z = parse_expr("z1", chart)
    assert z == parse_expr("x1 + i*x2", chart)
    zb = parse_expr("zb1", chart)
    assert zb == z.conj()


def test_decimal_literals_are_exact(chart2):
    e = parse_expr("0.5*x1", chart2)
    assert e.eval([3, 0]) == 1.5


def test_differentiate_power(chart2):
    e = parse_expr("x1^2", chart2)
    assert e.diff(0) == parse_expr("2*x1", chart2)


def test_differentiate_commutes_with_conj(chart2):
    e = parse_expr("conj(x1 + i*x2)", chart2)
    assert e.diff(0) == const(chart2, 1)
    assert e.diff(1) == const(chart2, -1j)


def test_quotient_rule(chart2):
    e = parse_expr("x1/x2", chart2)
    assert e.diff(1) == parse_expr("-x1/x2^2", chart2)


def test_rational_normalization_reduces_exact_multiples(chart2):
    x1, x2 = var(chart2, 0), var(chart2, 1)
    e = (x1 * x2 + x2) / x2
    assert e.is_polynomial
    assert e == x1 + 1


def test_rational_equality_by_cross_multiplication(chart2):
    x1, x2 = var(chart2, 0), var(chart2, 1)
    a = x1 / x2
    b = (x1 * x1) / (x1 * x2)
    assert a == b


def test_zero_division_raises(chart2):
    with pytest.raises(ZeroDivisionError):
        var(chart2, 0) / const(chart2, 0)


def test_negative_powers(chart2):
    x2 = var(chart2, 1)
    e = x2 ** (-2)
    assert e.eval([0, 2.0]) == 0.25


def test_print_parse_roundtrip(chart2):
    cases = [
        "x1^2 + i*x2",
        "3/7*x1*x2 - x2^3",
        "(x1 + i*x2)/(x2^2 + 1)",
        "conj(x1^2 - i*x1*x2) + 2.25",
    ]
    for text in cases:
        e = parse_expr(text, chart2)
        again = parse_expr(str(e), chart2)
        assert again == e, text


def test_eval_matches_central_differences(chart2):
    # independent derivative oracle: 2nd-order central finite differences
    import random

    rng = random.Random(20240811)
    for _ in range(20):
        coeffs = [
            (
                (rng.randrange(0, 3), rng.randrange(0, 3)),
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            )
            for _ in range(4)
        ]
        e = const(chart2, 0)
        for (a, b), c in coeffs:
            e = e + const(chart2, c) * var(chart2, 0) ** a * var(chart2, 1) ** b
        p = [rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)]
        h = 1e-6
        for i in range(2):
            sym = e.diff(i).eval(p)
            hi = list(p)
            lo = list(p)
            hi[i] += h
            lo[i] -= h
            fd = (e.eval(hi) - e.eval(lo)) / (2 * h)
            scale = max(1.0, abs(sym))
            assert abs(sym - fd) / scale <= 1e-6


def test_eval_grad_agrees_with_symbolic(chart2):
    e = parse_expr("(x1^2 + i*x1*x2)/(x2 + 3)", chart2)
    p = [1.25, -0.5]
    val, grad = e.eval_grad(p)
    assert val == pytest.approx(e.eval(p), rel=1e-14)
    for i in range(2):
        assert grad[i] == pytest.approx(e.diff(i).eval(p), rel=1e-13)


def test_chart_invariants():
    with pytest.raises(ValueError):
        Chart(0)
    with pytest.raises(ValueError):
        Chart(3, complex_pairs=((0, 1),))
    with pytest.raises(ValueError):
        Chart(2, complex_pairs=((0, 0),))
    chart = Chart.complex_chart(2)
    assert chart.dim == 4
    assert chart.n_complex == 2
