"""
Polynomial algebra on the reference interval [0, 1].

Lagrange nodal basis, Legendre derivatives and the exact element matrices
that feed both the Bloch symbol and the finite element assembler. All
coefficients are exact rationals; floats appear only in the *_array helpers.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy
from sympy.polys.domains import QQ

from errors import UnsupportedOrder
from exact import binomial, factorial, rational
from logger import get_logger
from settings import get_setting

logger = get_logger()

X = sympy.Symbol("x")


@dataclass(frozen=True)
class Polynomial:
    """Monomial-basis polynomial with exact rational coefficients (ascending powers, trimmed)."""
    coefficients: tuple

    @classmethod
    def from_poly(cls, poly):
        coeffs = [QQ.from_sympy(c) for c in reversed(poly.all_coeffs())]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        return cls(tuple(coeffs))

    @classmethod
    def from_coefficients(cls, coeffs):
        coeffs = [QQ.convert(c) for c in coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        return cls(tuple(coeffs))

    def to_poly(self):
        if not self.coefficients:
            return sympy.Poly(0, X, domain=QQ)
        return sympy.Poly.from_list(list(reversed(self.coefficients)), X, domain=QQ)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def is_zero(self):
        return not self.coefficients

    def evaluate(self, x):
        """Exact Horner evaluation at a rational point."""
        x = QQ.convert(x)
        value = QQ(0)
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def derivative(self, order=1):
        return Polynomial.from_poly(self.to_poly().diff((X, order)))

    def __mul__(self, other):
        return Polynomial.from_poly(self.to_poly() * other.to_poly())

    def __add__(self, other):
        return Polynomial.from_poly(self.to_poly() + other.to_poly())

    def integrate(self, lower=0, upper=1):
        antiderivative = Polynomial.from_poly(self.to_poly().integrate())
        return antiderivative.evaluate(upper) - antiderivative.evaluate(lower)

    def as_float_array(self):
        return np.array([float(c.numerator) / float(c.denominator) for c in self.coefficients] or [0.0])


@dataclass(frozen=True)
class ElementMatrices:
    p: int
    stiffness: tuple
    mass: tuple

    def stiffness_array(self):
        return _to_float_matrix(self.stiffness)

    def mass_array(self):
        return _to_float_matrix(self.mass)

    def b_form(self, t_squared):
        """Entries of B_t(lambda_i, lambda_j) = S_ij - t^2 M_ij for a rational t^2."""
        t_squared = QQ.convert(t_squared)
        size = self.p + 1
        return tuple(tuple(self.stiffness[i][j] - t_squared * self.mass[i][j] for j in range(size))
                     for i in range(size))


def _to_float_matrix(rows):
    return np.array([[int(v.numerator) / int(v.denominator) for v in row] for row in rows], dtype=float)


def check_order(p, p_max=None):
    p_max = p_max if p_max is not None else get_setting("P_MAX")
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or not 1 <= p <= p_max:
        raise UnsupportedOrder("polynomial order out of range", {"p": p, "p_max": p_max})
    return int(p)


@lru_cache(maxsize=None)
def lagrange_basis(p):
    """lambda_0..lambda_p on the equispaced nodes j/p, with lambda_i(j/p) = delta_ij."""
    p = check_order(p)
    nodes = [rational(j, p) for j in range(p + 1)]
    basis = []
    for i in range(p + 1):
        poly = sympy.Poly(1, X, domain=QQ)
        for j in range(p + 1):
            if j != i:
                poly = poly * sympy.Poly([1, -nodes[j]], X, domain=QQ) * QQ.to_sympy(1 / (nodes[i] - nodes[j]))
        basis.append(Polynomial.from_poly(poly))
    return tuple(basis)


@lru_cache(maxsize=None)
def element_matrices(p):
    basis = lagrange_basis(p)
    derivs = [b.derivative() for b in basis]
    size = p + 1
    stiffness = [[None] * size for _ in range(size)]
    mass = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            stiffness[i][j] = stiffness[j][i] = (derivs[i] * derivs[j]).integrate()
            mass[i][j] = mass[j][i] = (basis[i] * basis[j]).integrate()
    logger.debug(f"Built exact element matrices for p={p}")
    return ElementMatrices(p, tuple(map(tuple, stiffness)), tuple(map(tuple, mass)))


@lru_cache(maxsize=None)
def basis_integrals(p):
    """int_0^1 lambda_i dx for i = 0..p."""
    return tuple(b.integrate() for b in lagrange_basis(p))


@lru_cache(maxsize=None)
def pth_derivative_values(p):
    """lambda_i^(p), constant on [0,1]: (-1)^(p-i) C(p,i) p^p."""
    p = check_order(p)
    return tuple(QQ((-1) ** (p - i) * binomial(p, i) * p ** p) for i in range(p + 1))


@lru_cache(maxsize=None)
def interior_stiffness(p):
    """D_0 = (int lambda_i' lambda_j')_{1<=i,j<=p-1}."""
    s = element_matrices(p).stiffness
    return tuple(tuple(s[i][j] for j in range(1, p)) for i in range(1, p))


def alpha0(p):
    """det D_0; positive for every order (1 by convention at p = 1)."""
    d0 = interior_stiffness(p)
    if not d0:
        return QQ(1)
    matrix = sympy.Matrix([[QQ.to_sympy(v) for v in row] for row in d0])
    return QQ.from_sympy(matrix.det(method="bareiss"))


@lru_cache(maxsize=None)
def legendre_derivative(n, d):
    """
    d-th derivative of the Legendre polynomial of degree n on [-1, 1]:

        n!/(2^n (n-d)!) sum_m C(n+d, m+d) C(n-d, m) (s+1)^(n-m-d) (s-1)^m
    """
    if d > n:
        return Polynomial(())
    s_plus = sympy.Poly([1, 1], X, domain=QQ)
    s_minus = sympy.Poly([1, -1], X, domain=QQ)
    total = sympy.Poly(0, X, domain=QQ)
    for m in range(n - d + 1):
        weight = binomial(n + d, m + d) * binomial(n - d, m)
        total += s_plus ** (n - m - d) * s_minus ** m * weight
    scale = rational(factorial(n), 2 ** n * factorial(n - d))
    return Polynomial.from_poly(total * QQ.to_sympy(scale))


def legendre_endpoint_value(n, d):
    """(n+d)! / (2^d d! (n-d)!), the value of the d-th Legendre derivative at s = 1."""
    if d > n:
        return QQ(0)
    return rational(factorial(n + d), 2 ** d * factorial(d) * factorial(n - d))


@lru_cache(maxsize=None)
def _float_basis(p):
    basis = lagrange_basis(p)
    coeffs = [b.as_float_array() for b in basis]
    dcoeffs = [np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1) for c in coeffs]
    return coeffs, dcoeffs


def lagrange_values(p, points):
    """
    Float tables of the basis and its first derivative at reference points.

    Returns (values, derivatives), each of shape (p+1, len(points)).
    """
    points = np.asarray(points, dtype=float)
    coeffs, dcoeffs = _float_basis(p)
    values = np.array([np.polynomial.polynomial.polyval(points, c) for c in coeffs])
    derivatives = np.array([np.polynomial.polynomial.polyval(points, c) for c in dcoeffs])
    return values, derivatives


def gauss_points(count):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(count)
    return 0.5 * (nodes + 1.0), 0.5 * weights
