"""Tests for truncated power series over the Gaussian rationals."""

import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from sympy.polys.domains import QQ

from errors import DegenerateInput, ExpansionFailure
from exact import gaussian, rational
from series import (
    GAMMA,
    SeriesMatrix,
    TruncatedSeries,
    compose,
    divide,
    elementary_series,
    implicit_root,
    lift,
    series_arith,
    series_det,
)

ORDER = 8


def t_series(order=ORDER):
    return TruncatedSeries.variable(order)


class TestTruncatedSeries(unittest.TestCase):
    def test_product_and_truncation(self):
        t = t_series()
        product = (1 + t) * (1 - t)
        self.assertEqual(product, 1 - t * t)
        self.assertEqual((t ** 5 * t ** 5).valuation(), None)
        self.assertEqual((t ** 3).with_order(2).order, 2)

    def test_coefficient_beyond_order(self):
        with self.assertRaises(DegenerateInput):
            t_series(3).coefficient(4)

    def test_geometric_series(self):
        t = t_series()
        inverse = divide(TruncatedSeries.constant(1, ORDER), 1 - t)
        for n in range(ORDER + 1):
            self.assertEqual(inverse.coefficient(n), lift(1))

    def test_division_with_valuations(self):
        t = t_series()
        quotient = divide(t ** 3 + t ** 4, t ** 2)
        self.assertEqual(quotient.valuation(), 1)
        self.assertEqual(quotient.coefficient(2), lift(1))
        # the denominator's valuation costs precision
        self.assertEqual(quotient.order, ORDER - 2)
        with self.assertRaises(DegenerateInput):
            divide(t, t ** 2)
        with self.assertRaises(DegenerateInput):
            divide(t, TruncatedSeries.zero(ORDER))

    def test_pythagorean_identity(self):
        s = elementary_series("sin", 1, ORDER)
        c = elementary_series("cos", 1, ORDER)
        self.assertEqual(s ** 2 + c ** 2, TruncatedSeries.constant(1, ORDER))

    def test_exponentials(self):
        e_plus = elementary_series("exp_i", 1, ORDER)
        e_minus = elementary_series("exp_i", -1, ORDER)
        self.assertEqual(e_plus * e_minus, TruncatedSeries.constant(1, ORDER))
        self.assertEqual(e_plus.conjugate(), e_minus)
        self.assertEqual(e_plus.coefficient(1), lift(gaussian(0, 1)))
        with self.assertRaises(DegenerateInput):
            elementary_series("tan", 1, 3)

    def test_compose(self):
        doubled = compose(elementary_series("exp_i", 1, ORDER), t_series() * 2)
        self.assertEqual(doubled, elementary_series("exp_i", 2, ORDER))
        with self.assertRaises(DegenerateInput):
            compose(t_series(), 1 + t_series())

    def test_series_arith_dispatch(self):
        t = t_series()
        self.assertEqual(series_arith(t, t, "add"), t * 2)
        self.assertEqual(series_arith(t, t, "sub"), TruncatedSeries.zero(ORDER))
        with self.assertRaises(DegenerateInput):
            series_arith(t, t, "pow")

    def test_formal_gamma(self):
        t = t_series()
        s = t * GAMMA + t ** 2
        self.assertTrue(s.depends_on_gamma())
        self.assertEqual(s.substitute_gamma(rational(1, 2)), t * rational(1, 2) + t ** 2)
        self.assertFalse(s.substitute_gamma(QQ(0)).depends_on_gamma())

    def test_gamma_zero_keeps_gamma_free_terms(self):
        t = t_series()
        s = t * GAMMA * 3 + t ** 2 + 1
        self.assertEqual(s.substitute_gamma(0), t ** 2 + 1)
        self.assertEqual(s.substitute_gamma(QQ(0)), t ** 2 + 1)

    def test_is_real(self):
        self.assertTrue(elementary_series("cos", rational(1, 2), ORDER).is_real())
        self.assertFalse(elementary_series("exp_i", 1, ORDER).is_real())


class TestSeriesMatrix(unittest.TestCase):
    def test_det_two_by_two(self):
        t = t_series()
        one = TruncatedSeries.constant(1, ORDER)
        matrix = SeriesMatrix([[one, t], [t, one]])
        self.assertEqual(series_det(matrix), 1 - t * t)

    def test_det_matches_cofactor_expansion(self):
        t = t_series()
        one = TruncatedSeries.constant(1, ORDER)
        rows = [[one, t, t * t], [t, one * 2, t], [t * t, t, one * 3]]
        matrix = SeriesMatrix(rows)
        expansion = TruncatedSeries.zero(ORDER)
        for j in range(3):
            minor = series_det(matrix.minor(0, j))
            term = rows[0][j] * minor
            expansion = expansion - term if j % 2 else expansion + term
        self.assertEqual(matrix.det(), expansion)

    def test_hermitian_and_kron(self):
        u = elementary_series("exp_i", -1, ORDER)
        one = TruncatedSeries.constant(1, ORDER)
        matrix = SeriesMatrix([[one * 2, u], [u.conjugate(), one * 2]])
        self.assertTrue(matrix.is_hermitian())
        kron = matrix.kron(matrix)
        self.assertEqual(kron.dim, 4)
        self.assertTrue(kron.is_hermitian())
        # det(A x B) = det(A)^2 det(B)^2 for 2x2 blocks
        self.assertEqual(kron.det(), matrix.det() ** 4)

    def test_non_square_rejected(self):
        t = t_series()
        with self.assertRaises(DegenerateInput):
            SeriesMatrix([[t, t]])


class TestImplicitRoot(unittest.TestCase):
    def test_square_root_expansion(self):
        """t_h^2 = t^2 + t^4 gives t_h = t (1 + t^2/2 - t^4/8 + ...)."""
        order = 8
        t = t_series(order)

        def build_F(delta):
            t_h = t + delta
            return t_h * t_h - t * t - t ** 4

        delta = implicit_root(build_F, 3, 5, order=order)
        self.assertEqual(delta.coefficient(3), lift(rational(1, 2)))
        self.assertEqual(delta.coefficient(4), lift(0))
        self.assertEqual(delta.coefficient(5), lift(rational(-1, 8)))

    def test_valuation_hypothesis(self):
        t = t_series()

        def build_F(delta):
            return delta * delta - t ** 4

        with self.assertRaises(ExpansionFailure):
            implicit_root(build_F, 2, 4)


if __name__ == '__main__':
    unittest.main()
