"""Tests for the Lagrange basis, element matrices and Legendre derivatives."""

import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
from sympy.polys.domains import QQ

from basis import (
    Polynomial,
    alpha0,
    basis_integrals,
    check_order,
    element_matrices,
    gauss_points,
    interior_stiffness,
    lagrange_basis,
    lagrange_values,
    legendre_derivative,
    legendre_endpoint_value,
    pth_derivative_values,
)
from errors import UnsupportedOrder


class TestPolynomial(unittest.TestCase):
    def test_evaluate_derivative_integrate(self):
        # 1 - 2x + 3x^2
        poly = Polynomial.from_coefficients([1, -2, 3])
        self.assertEqual(poly.degree, 2)
        self.assertEqual(poly.evaluate(QQ(1, 2)), QQ(3, 4))
        self.assertEqual(poly.derivative().coefficients, (QQ(-2), QQ(6)))
        self.assertEqual(poly.integrate(), QQ(1))

    def test_trailing_zeros_trimmed(self):
        self.assertEqual(Polynomial.from_coefficients([2, 0, 0]).degree, 0)
        self.assertTrue(Polynomial.from_coefficients([0]).is_zero())


class TestLagrangeBasis(unittest.TestCase):
    def test_check_order(self):
        self.assertEqual(check_order(3), 3)
        for p in (0, 14, 2.5, True):
            with self.assertRaises(UnsupportedOrder):
                check_order(p)

    def test_nodal_property(self):
        for p in (1, 2, 5):
            basis = lagrange_basis(p)
            for i, poly in enumerate(basis):
                for j in range(p + 1):
                    self.assertEqual(poly.evaluate(QQ(j, p)), QQ(1) if i == j else QQ(0))

    def test_linear_element_matrices(self):
        em = element_matrices(1)
        self.assertEqual(em.stiffness, ((QQ(1), QQ(-1)), (QQ(-1), QQ(1))))
        self.assertEqual(em.mass, ((QQ(1, 3), QQ(1, 6)), (QQ(1, 6), QQ(1, 3))))

    def test_matrices_are_symmetric_and_consistent(self):
        for p in (2, 3, 4):
            em = element_matrices(p)
            stiff = em.stiffness_array()
            mass = em.mass_array()
            np.testing.assert_allclose(stiff, stiff.T)
            # constants are in the kernel of the stiffness, the mass integrates to 1
            np.testing.assert_allclose(stiff.sum(axis=1), 0.0, atol=1e-12)
            self.assertAlmostEqual(mass.sum(), 1.0, places=12)

    def test_b_form(self):
        em = element_matrices(1)
        b = em.b_form(QQ(6))
        self.assertEqual(b[0][0], QQ(-1))
        self.assertEqual(b[0][1], QQ(-2))

    def test_basis_integrals(self):
        self.assertEqual(basis_integrals(2), (QQ(1, 6), QQ(2, 3), QQ(1, 6)))
        for p in (3, 6):
            self.assertEqual(sum(basis_integrals(p), QQ(0)), QQ(1))

    def test_pth_derivative_values(self):
        self.assertEqual(pth_derivative_values(1), (QQ(-1), QQ(1)))
        self.assertEqual(pth_derivative_values(2), (QQ(4), QQ(-8), QQ(4)))
        for p in (2, 3, 4):
            values = pth_derivative_values(p)
            for i, poly in enumerate(lagrange_basis(p)):
                self.assertEqual(poly.derivative(p).coefficients, (values[i],))

    def test_interior_stiffness_is_positive(self):
        self.assertEqual(interior_stiffness(1), ())
        self.assertEqual(interior_stiffness(2), ((QQ(16, 3),),))
        self.assertEqual(alpha0(1), QQ(1))
        self.assertEqual(alpha0(2), QQ(16, 3))
        for p in range(3, 7):
            self.assertGreater(alpha0(p), 0)


class TestLegendre(unittest.TestCase):
    def test_low_degree_derivatives(self):
        # P2 = (3 s^2 - 1)/2, P3 = (5 s^3 - 3 s)/2
        self.assertEqual(legendre_derivative(2, 1).coefficients, (QQ(0), QQ(3)))
        self.assertEqual(legendre_derivative(3, 2).coefficients, (QQ(0), QQ(15)))
        self.assertEqual(legendre_derivative(3, 0).coefficients, (QQ(0), QQ(-3, 2), QQ(0), QQ(5, 2)))
        self.assertTrue(legendre_derivative(2, 3).is_zero())

    def test_endpoint_values(self):
        for n in range(1, 8):
            for d in range(0, n + 1):
                self.assertEqual(legendre_derivative(n, d).evaluate(1), legendre_endpoint_value(n, d))
        self.assertEqual(legendre_endpoint_value(2, 3), QQ(0))


class TestFloatTables(unittest.TestCase):
    def test_partition_of_unity(self):
        points = np.linspace(0.0, 1.0, 11)
        for p in (1, 3, 6):
            values, derivs = lagrange_values(p, points)
            self.assertEqual(values.shape, (p + 1, points.size))
            np.testing.assert_allclose(values.sum(axis=0), 1.0, atol=1e-10)
            np.testing.assert_allclose(derivs.sum(axis=0), 0.0, atol=1e-8)

    def test_gauss_points(self):
        points, weights = gauss_points(3)
        self.assertAlmostEqual(weights.sum(), 1.0, places=14)
        self.assertTrue(np.all((points > 0) & (points < 1)))
        self.assertAlmostEqual(np.dot(weights, points ** 5), 1.0 / 6, places=14)


if __name__ == '__main__':
    unittest.main()
