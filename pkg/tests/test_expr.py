import numpy as np
import pytest

from polyflow.expr import (Add, Const, Coord, Div, EvaluationError, Exp,
                           ExprParseError, FracLin, Mul, Pow, Sub,
                           linear_combination, parse_expr, shift_coords)


def test_basic_arithmetic_nodes():
    z, w = Coord(0), Coord(1)
    tree = Div(Mul(Const(2.0 + 0j), Mul(z, w)), Add(z, w))  # 2zw/(z+w)
    assert tree.ev((1j, 2j)) == pytest.approx(4j / 3)


def test_vectorized_evaluation_matches_scalar():
    tree = parse_expr("(z^2 - w)/(z + 2*w) + exp(i*z)", 2)
    zs = np.array([1j, 0.5 + 1j, -2 + 0.3j])
    ws = np.array([2j, 1 + 1j, 0.1 + 0.9j])
    vec = tree.ev((zs, ws))
    for k in range(3):
        assert vec[k] == pytest.approx(complex(tree.ev((zs[k], ws[k]))))


def test_division_by_zero_reports_subexpression():
    tree = Div(Const(1.0 + 0j), Sub(Coord(0), Coord(1)))
    with pytest.raises(EvaluationError) as err:
        tree.ev((1j, 1j))
    assert "z1 - z2" in str(err.value)


def test_exact_derivative_against_finite_difference():
    tree = parse_expr("(z*w + z^3)/(w + 2i) + exp(z*w)", 2)
    z0, w0 = 0.4 + 0.7j, -0.3 + 1.1j
    h = 1e-6
    for j, var in ((0, "z"), (1, "w")):
        d = tree.diff(j).ev((z0, w0))
        plus = [z0, w0]
        minus = [z0, w0]
        plus[j] += h
        minus[j] -= h
        fd = (tree.ev(tuple(plus)) - tree.ev(tuple(minus))) / (2 * h)
        assert d == pytest.approx(fd, rel=1e-8), var


def test_fraclin_derivative_and_composition():
    child = Coord(0)
    m1 = FracLin(2.0, 1.0, 0.5, 1.0, child)
    m2 = FracLin(1.0, -1.0, 0.0, 2.0, child)
    composed = m1.compose(m2)
    z = 0.3 + 0.8j
    inner = m2.ev((z,))
    direct = (2.0 * inner + 1.0) / (0.5 * inner + 1.0)
    assert composed.ev((z,)) == pytest.approx(direct)
    h = 1e-6
    fd = (m1.ev((z + h,)) - m1.ev((z - h,))) / (2 * h)
    assert m1.diff(0).ev((z,)) == pytest.approx(fd, rel=1e-8)


def test_fraclin_rejects_degenerate_coefficients():
    with pytest.raises(ValueError):
        FracLin(1.0, 2.0, 2.0, 4.0, Coord(0))


def test_pow_requires_positive_integer():
    with pytest.raises(ValueError):
        Pow(Coord(0), 0)
    with pytest.raises(ValueError):
        Pow(Coord(0), -2)


def test_shift_coords_and_linear_combination():
    tree = linear_combination([0.25, 0.75])
    assert tree.ev((4.0 + 0j, 8.0 + 0j)) == pytest.approx(7.0)
    shifted = shift_coords(tree, 2, 2.0)
    assert shifted.ev((4.0 + 0j, 8.0 + 0j)) == pytest.approx(5.0)


def test_division_free_flag():
    assert not parse_expr("z^2 + exp(w)", 2).has_division()
    assert parse_expr("z/(w+2i)", 2).has_division()


class TestParser:
    def test_complex_literals(self):
        assert parse_expr("1+2i", 1).ev((0j,)) == 1 + 2j
        assert parse_expr("3i", 1).ev((0j,)) == 3j
        assert parse_expr("-i", 1).ev((0j,)) == -1j

    def test_aliases_and_indexed_coordinates(self):
        assert parse_expr("z + w", 2).ev((1.0 + 0j, 2.0 + 0j)) == 3.0
        assert parse_expr("z1 + 2*z3", 3).ev((1.0 + 0j, 0j, 4.0 + 0j)) == 9.0

    def test_precedence_and_unary_minus(self):
        assert parse_expr("-z^2", 1).ev((2.0 + 0j,)) == -4.0
        assert parse_expr("1 - 2*3", 1).ev((0j,)) == -5.0

    def test_error_carries_column(self):
        with pytest.raises(ExprParseError, match="column"):
            parse_expr("z + $", 1)
        with pytest.raises(ExprParseError, match="out of range"):
            parse_expr("z5", 2)
        with pytest.raises(ExprParseError, match="exponent"):
            parse_expr("z^w", 2)
        with pytest.raises(ExprParseError, match="trailing"):
            parse_expr("z z", 1)
