"""Tests for the Bloch symbol matrices, condensation and the closed-form condensed basis."""

import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
from sympy.polys.domains import QQ

from errors import DegenerateInput, EigenvalueCollision
from exact import rational, to_float
from series import GAMMA, TruncatedSeries, lift
from symbol import (
    FORMAL,
    comb_identity_N,
    condensation_coeffs,
    condensation_series,
    direction_cosines,
    lagrange_check,
    kron_cofactor,
    lu_det,
    mass_symbol,
    phi_even_odd,
    phi_even_odd_legendre,
    symbol_1d,
    symbol_nd,
)


class TestNumericSymbol(unittest.TestCase):
    def test_linear_symbol_closed_form(self):
        t, t_h, gamma = 0.7, 0.6, 0.1
        s = np.sin(t_h / 2)
        expected = 4 * s ** 2 - t ** 2 * (1 - 2.0 / 3 * s ** 2) + 16 * gamma * s ** 4
        value = symbol_1d(1, t, t_h, gamma).entries[0, 0]
        self.assertAlmostEqual(value.real, expected, places=14)
        self.assertAlmostEqual(value.imag, 0.0, places=14)

    def test_symbols_are_hermitian(self):
        for p in (2, 3, 4):
            self.assertLess(symbol_1d(p, 0.9, 0.85, -0.003).hermitian_defect(), 1e-13)
            self.assertLess(symbol_nd(2, p, 0.9, 0.85, direction=0.3, gamma=-0.003).hermitian_defect(), 1e-13)

    def test_mass_symbol_at_zero_phase(self):
        self.assertAlmostEqual(mass_symbol(1, 0.0).entries[0, 0].real, 1.0, places=14)

    def test_symbol_nd_reduces_to_1d(self):
        np.testing.assert_allclose(symbol_nd(1, 3, 0.5, 0.45).entries, symbol_1d(3, 0.5, 0.45).entries)

    def test_2d_determinant_symmetric_under_axis_swap(self):
        for p in (1, 2):
            theta = 0.3
            a = symbol_nd(2, p, 0.8, 0.75, direction=theta).det()
            b = symbol_nd(2, p, 0.8, 0.75, direction=np.pi / 2 - theta).det()
            self.assertAlmostEqual(abs(a - b) / max(abs(a), 1e-300), 0.0, places=10)

    def test_dimension_checked(self):
        with self.assertRaises(DegenerateInput):
            symbol_nd(4, 1, 0.5, 0.5)

    def test_direction_cosines(self):
        self.assertEqual(direction_cosines(1, None), (1.0,))
        c = direction_cosines(2, np.pi / 3)
        self.assertAlmostEqual(c[0], 0.5)
        c3 = direction_cosines(3, (0.4, 1.1))
        self.assertAlmostEqual(sum(x * x for x in c3), 1.0, places=14)

    def test_lu_det(self):
        matrix = np.array([[2.0, 1.0j, 0.0], [-1.0j, 3.0, 1.0], [0.0, 1.0, 4.0]])
        self.assertAlmostEqual(lu_det(matrix), np.linalg.det(matrix), places=12)


class TestExactSymbol(unittest.TestCase):
    def test_linear_dispersion_function(self):
        """det D^{t,t} = (1/12 + gamma) t^4 + O(t^6) for p = 1."""
        t = TruncatedSeries.variable(6)
        det = symbol_1d(1, t, t, FORMAL).det()
        self.assertEqual(det.valuation(), 4)
        self.assertEqual(det.coefficient(4), lift(rational(1, 12)) + GAMMA)

    def test_exact_symbol_is_hermitian(self):
        t = TruncatedSeries.variable(5)
        symbol = symbol_1d(2, t, t * rational(9, 10), FORMAL)
        self.assertTrue(symbol.entries.is_hermitian())

    def test_rational_cosines_checked(self):
        t = TruncatedSeries.variable(4)
        with self.assertRaises(DegenerateInput):
            symbol_nd(2, 1, t, t, cosines=(QQ(1, 2), QQ(1, 2)))
        symbol = symbol_nd(2, 1, t, t, cosines=(QQ(3, 5), QQ(4, 5)))
        self.assertEqual(symbol.dim, 1)

    def test_float_gamma_rejected(self):
        t = TruncatedSeries.variable(4)
        with self.assertRaises(DegenerateInput):
            symbol_1d(1, t, t, 0.1)


class TestCondensation(unittest.TestCase):
    def test_a2_relation(self):
        for p in (2, 3, 4, 5):
            coeffs = condensation_coeffs(p, 0.5)
            self.assertAlmostEqual(coeffs.A2, (-1) ** p * coeffs.A1, places=12)

    def test_linear_has_no_interior(self):
        coeffs = condensation_coeffs(1, 0.5)
        self.assertEqual((coeffs.c, coeffs.d), ((), ()))

    def test_interior_eigenvalue_collision(self):
        # p = 2: the interior block 16/3 - t^2 * 8/15 vanishes at t^2 = 10
        with self.assertRaises(EigenvalueCollision):
            condensation_coeffs(2, np.sqrt(10.0))

    def test_series_matches_numeric(self):
        order = 8
        p = 3
        series = condensation_series(p, order)
        t = 0.05
        numeric = condensation_coeffs(p, t)
        for exact, value in zip(series.c, numeric.c):
            approx = sum(to_float(exact.coefficient(n).LC) * t ** n
                         for n in range(order + 1) if exact.coefficient(n))
            self.assertAlmostEqual(approx, value, places=10)


class TestClosedForms(unittest.TestCase):
    def test_rational_and_legendre_forms_agree(self):
        x = np.linspace(0.0, 1.0, 9)
        for p in (1, 2, 3):
            even, odd = phi_even_odd(p, 0.7, x)
            even_l, odd_l = phi_even_odd_legendre(p, 0.7, x)
            np.testing.assert_allclose(even, even_l, atol=1e-10)
            np.testing.assert_allclose(odd, odd_l, atol=1e-10)

    def test_boundary_values(self):
        x = np.array([0.0, 1.0])
        even, odd = phi_even_odd(2, 0.4, x)
        np.testing.assert_allclose(even, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(odd, [-1.0, 1.0], atol=1e-12)

    def test_zero_t_rejected(self):
        with self.assertRaises(DegenerateInput):
            phi_even_odd(2, 0.0, np.array([0.5]))


class TestIdentities(unittest.TestCase):
    def test_comb_identity(self):
        for p in range(1, 9):
            for j in range(1, p // 2 + 2):
                brute, closed = comb_identity_N(p, j)
                self.assertEqual(brute, closed)
        with self.assertRaises(DegenerateInput):
            comb_identity_N(4, 4)

    def test_cofactor_nonzero(self):
        self.assertEqual(kron_cofactor(1), QQ(1))
        for p in (2, 3):
            self.assertNotEqual(kron_cofactor(p), QQ(0))

    def test_lagrange_check(self):
        self.assertTrue(lagrange_check(4))


if __name__ == '__main__':
    unittest.main()
