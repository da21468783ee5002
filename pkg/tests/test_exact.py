"""Tests for the exact rational and Gaussian-rational primitives."""

import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from sympy.polys.domains import QQ, QQ_I

from errors import DegenerateInput
from exact import (
    binomial,
    conj,
    double_factorial,
    factorial,
    gaussian,
    gaussian_arith,
    is_real,
    rational,
    to_complex,
    to_float,
)


class TestRational(unittest.TestCase):
    def test_lowest_terms(self):
        self.assertEqual(rational(6, 8), QQ(3, 4))
        self.assertEqual(rational(-2, 4), rational(1, -2))

    def test_zero_denominator(self):
        with self.assertRaises(DegenerateInput):
            rational(1, 0)

    def test_floats_rejected(self):
        with self.assertRaises(DegenerateInput):
            rational(0.5)

    def test_to_float(self):
        self.assertEqual(to_float(rational(-1, 12)), -1.0 / 12)
        self.assertEqual(to_float(gaussian(rational(1, 4))), 0.25)


class TestGaussian(unittest.TestCase):
    def test_field_operations(self):
        a = gaussian(1, 2)
        b = gaussian(rational(1, 2), -1)
        self.assertEqual(gaussian_arith(a, b, "add"), gaussian(rational(3, 2), 1))
        self.assertEqual(gaussian_arith(a, b, "sub"), gaussian(rational(1, 2), 3))
        self.assertEqual(gaussian_arith(a, b, "mul"), gaussian(rational(5, 2), 0))
        self.assertEqual(gaussian_arith(gaussian_arith(a, b, "div"), b, "mul"), a)
        self.assertEqual(gaussian_arith(a, None, "conj"), gaussian(1, -2))

    def test_division_by_zero(self):
        with self.assertRaises(DegenerateInput):
            gaussian_arith(gaussian(1, 1), gaussian(0, 0), "div")

    def test_unknown_operation(self):
        with self.assertRaises(DegenerateInput):
            gaussian_arith(1, 2, "pow")

    def test_conj_and_is_real(self):
        z = gaussian(3, 4)
        self.assertEqual(z * conj(z), QQ_I(25, 0))
        self.assertTrue(is_real(z * conj(z)))
        self.assertFalse(is_real(z))
        self.assertTrue(is_real(rational(2, 3)))

    def test_to_complex(self):
        self.assertEqual(to_complex(gaussian(rational(1, 2), -2)), complex(0.5, -2.0))


class TestCombinatorics(unittest.TestCase):
    def test_factorial_and_binomial(self):
        self.assertEqual(factorial(0), 1)
        self.assertEqual(factorial(10), 3628800)
        self.assertEqual(binomial(5, 2), 10)
        self.assertEqual(binomial(5, 6), 0)
        self.assertEqual(binomial(5, -1), 0)

    def test_double_factorial(self):
        self.assertEqual(double_factorial(-1), 1)
        self.assertEqual(double_factorial(0), 1)
        self.assertEqual(double_factorial(5), 15)
        self.assertEqual(double_factorial(8), 384)
        with self.assertRaises(DegenerateInput):
            double_factorial(-3)


if __name__ == '__main__':
    unittest.main()
