"""
Bloch symbol matrices of the CIP-FEM on tensor-product meshes.

Every constructor has two backends selected by the argument types:

  * numeric: t and t_h are floats, entries are complex doubles (numpy)
  * exact:   t and t_h are TruncatedSeries, entries are TruncatedSeries and
             gamma may be the formal symbol from series.GAMMA

The generating set is {x_0, ..., x_{p-1}} in 1D and the lexicographic grid
x_{i,j} -> i*p + j (x index slowest) in 2D and 3D.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from basis import (
    basis_integrals,
    check_order,
    element_matrices,
    interior_stiffness,
    lagrange_basis,
    legendre_derivative,
    Polynomial,
)
from errors import DegenerateInput, EigenvalueCollision, IdentityViolation
from exact import binomial, factorial, rational
from logger import get_logger
from series import (
    GAMMA,
    SeriesMatrix,
    TruncatedSeries,
    divide,
    elementary_series,
    lift,
    series_det,
)
from settings import get_setting

logger = get_logger()

FORMAL = "formal"


@dataclass(frozen=True)
class SymbolMatrix:
    entries: object  # complex ndarray or SeriesMatrix
    d: int
    p: int
    params: dict = field(default_factory=dict)

    @property
    def exact(self):
        return isinstance(self.entries, SeriesMatrix)

    @property
    def dim(self):
        return self.entries.dim if self.exact else self.entries.shape[0]

    def det(self):
        if self.exact:
            return series_det(self.entries)
        return lu_det(self.entries)

    def hermitian_defect(self):
        """max |D - D^H| relative to max |D| (numeric backend)."""
        a = self.entries
        scale = max(np.abs(a).max(), np.finfo(float).tiny)
        return float(np.abs(a - a.conj().T).max() / scale)

    def cofactor(self, i, j):
        if self.exact:
            minor = self.entries.minor(i, j)
            value = series_det(minor)
            return -value if (i + j) % 2 else value
        minor = np.delete(np.delete(self.entries, i, axis=0), j, axis=1)
        return (-1) ** (i + j) * lu_det(minor)


@dataclass(frozen=True)
class CondensationCoeffs:
    p: int
    t: object
    c: tuple
    d: tuple
    A1: object
    A2: object


def lu_det(matrix):
    """Determinant through a partially pivoted LU factorization."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] == 0:
        return 1.0 + 0.0j
    lu, piv = scipy.linalg.lu_factor(matrix, check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return (-1) ** swaps * np.prod(np.diag(lu))


def _is_series(value):
    return isinstance(value, TruncatedSeries)


@lru_cache(maxsize=None)
def _float_data(p):
    em = element_matrices(p)
    signs = np.array([(-1) ** j * binomial(p, j) for j in range(p + 1)], dtype=float)
    return em.stiffness_array(), em.mass_array(), signs, float(p) ** (2 * p)


def _stencil_numeric(e, p, beta):
    """Fold a (p+1)x(p+1) element matrix into the p x p Bloch stencil at phase beta."""
    out = np.zeros((p, p), dtype=complex)
    out[0, 0] = 2.0 * (e[0, 0] + e[0, p]) - 4.0 * np.sin(beta / 2) ** 2 * e[0, p]
    if p > 1:
        u = np.exp(-1j * beta)
        out[0, 1:] = e[1:p, 0] + u * e[1:p, p]
        out[1:, 0] = np.conj(out[0, 1:])
        out[1:, 1:] = e[1:p, 1:p]
    return out


def _penalty_numeric(p, beta):
    """Penalty stencil without the gamma * p^(2p) factor, in cancellation-free form."""
    _, _, b, _ = _float_data(p)
    half = np.sin(beta / 2)
    out = np.zeros((p, p), dtype=complex)
    if p % 2 == 0:
        out[0, 0] = 4.0 * np.sin(beta) ** 2
    else:
        out[0, 0] = 16.0 * half ** 4
    if p > 1:
        u = np.exp(-1j * beta)
        um1 = -2j * half * np.exp(-0.5j * beta)  # u - 1
        if p % 2 == 0:
            factor = -um1 ** 2 * (u + 1) / u
        else:
            factor = um1 ** 3 / u
        out[0, 1:] = b[1:p] * factor
        out[1:, 0] = np.conj(out[0, 1:])
        out[1:, 1:] = 4.0 * half ** 2 * np.outer(b[1:p], b[1:p])
    return out


class _Phases:
    """Trigonometric series of a phase series beta(t), computed once per symbol."""

    def __init__(self, beta):
        self.beta = beta
        self.cos = elementary_series("cos", 1, beta.order).compose(beta)
        self.cos2 = elementary_series("cos", 2, beta.order).compose(beta)
        self.u = elementary_series("exp_i", -1, beta.order).compose(beta)
        self.ubar = elementary_series("exp_i", 1, beta.order).compose(beta)
        self.u2 = elementary_series("exp_i", -2, beta.order).compose(beta)


def _stencil_series(e, p, phases):
    order = phases.beta.order
    rows = [[None] * p for _ in range(p)]
    rows[0][0] = phases.cos * (2 * e[0][p]) + 2 * e[0][0]
    for j in range(1, p):
        rows[0][j] = phases.u * e[j][p] + e[j][0]
        rows[j][0] = phases.ubar * e[p][j] + e[0][j]
        for i in range(1, p):
            rows[i][j] = TruncatedSeries.constant(e[i][j], order)
    return rows


def _penalty_series(p, phases):
    order = phases.beta.order
    s = (-1) ** p
    one = TruncatedSeries.constant(1, order)
    rows = [[None] * p for _ in range(p)]
    rows[0][0] = one * (2 + (1 - s) ** 2) - phases.cos * (2 * (1 - s) ** 2) - phases.cos2 * (2 * s)
    first = one * (2 - s) + phases.u * (2 * s - 1) - phases.ubar - phases.u2 * s
    for j in range(1, p):
        bj = (-1) ** j * binomial(p, j)
        rows[0][j] = first * bj
        rows[j][0] = rows[0][j].conjugate()
        for i in range(1, p):
            bi = (-1) ** i * binomial(p, i)
            rows[i][j] = (one - phases.cos) * (2 * bi * bj)
    return rows


def _gamma_scalar(gamma):
    """Gamma for the exact backend: the formal symbol, or an exact rational."""
    if isinstance(gamma, str):
        if gamma == FORMAL:
            return GAMMA
        raise DegenerateInput("unknown gamma mode", {"gamma": gamma})
    if isinstance(gamma, float):
        raise DegenerateInput("exact backend needs an exact gamma", {"gamma": gamma})
    return lift(gamma)


def symbol_1d(p, t, t_h, gamma=0):
    """
    The p x p CIP-FEM symbol D^{t,t_h}:

        D = S(t_h) - t^2 M(t_h) + gamma p^(2p) P(t_h)

    where S and M fold the element stiffness and mass into the Bloch stencil
    and P is the parity-dependent jump penalty stencil.
    """
    p = check_order(p)
    params = {"t": t, "t_h": t_h, "gamma": gamma}
    if _is_series(t) or _is_series(t_h):
        return SymbolMatrix(SeriesMatrix(_symbol_1d_series(p, t, t_h, gamma)), 1, p, params)
    stiff, mass, _, scale = _float_data(p)
    t = float(t)
    t_h = float(t_h)
    entries = (_stencil_numeric(stiff, p, t_h)
               - t * t * _stencil_numeric(mass, p, t_h)
               + float(gamma) * scale * _penalty_numeric(p, t_h))
    return SymbolMatrix(entries, 1, p, params)


def _symbol_1d_series(p, t, t_h, gamma, phases=None):
    em = element_matrices(p)
    phases = phases or _Phases(t_h)
    t_sq = t * t
    stiff = _stencil_series(em.stiffness, p, phases)
    mass = _stencil_series(em.mass, p, phases)
    gamma = _gamma_scalar(gamma)
    penalty = _penalty_series(p, phases) if gamma else None
    weight = gamma * p ** (2 * p)
    rows = []
    for i in range(p):
        row = []
        for j in range(p):
            entry = stiff[i][j] - t_sq * mass[i][j]
            if penalty is not None:
                entry = entry + penalty[i][j] * weight
            row.append(entry)
        rows.append(row)
    return rows


def mass_symbol(p, beta):
    """Bloch stencil of the element mass matrix at phase beta."""
    p = check_order(p)
    if _is_series(beta):
        em = element_matrices(p)
        return SymbolMatrix(SeriesMatrix(_stencil_series(em.mass, p, _Phases(beta))), 1, p, {"beta": beta})
    _, mass, _, _ = _float_data(p)
    return SymbolMatrix(_stencil_numeric(mass, p, float(beta)), 1, p, {"beta": beta})


def direction_cosines(d, direction):
    """Spherical direction cosines; direction is theta (2D) or (theta1, theta2) (3D)."""
    if d == 1:
        return (1.0,)
    angles = np.atleast_1d(np.asarray(direction if direction is not None else 0.0, dtype=float))
    if d == 2:
        theta = angles[0]
        return (np.cos(theta), np.sin(theta))
    if d == 3:
        theta1 = angles[0]
        theta2 = angles[1] if len(angles) > 1 else 0.0
        return (np.cos(theta1), np.sin(theta1) * np.cos(theta2), np.sin(theta1) * np.sin(theta2))
    raise DegenerateInput("dimension must be 1, 2 or 3", {"d": d})


def _check_rational_cosines(d, cosines):
    if cosines is None:
        return tuple(QQ(1) if i == 0 else QQ(0) for i in range(d))
    cosines = tuple(QQ.convert(c) for c in cosines)
    if len(cosines) != d or sum(c * c for c in cosines) != QQ(1):
        raise DegenerateInput("exact direction cosines must be d rationals on the unit sphere",
                              {"cosines": [str(c) for c in cosines]})
    return cosines


def symbol_nd(d, p, t, t_h, direction=None, gamma=0, cosines=None):
    """
    Kronecker-sum symbol sum_i M^{th_1} x .. x D^{t_i, th_i} x .. x M^{th_d} of size p^d.

    The numeric backend takes angles (direction); the exact backend takes
    rational direction cosines (cosines) and defaults to the x axis.
    """
    p = check_order(p)
    if d not in (1, 2, 3):
        raise DegenerateInput("dimension must be 1, 2 or 3", {"d": d})
    exact = _is_series(t) or _is_series(t_h)
    if exact:
        cosines = _check_rational_cosines(d, cosines)
    elif cosines is None:
        cosines = direction_cosines(d, direction)
    if d == 1 and not exact:
        return symbol_1d(p, t, t_h, gamma)

    blocks = []
    for c in cosines:
        if exact:
            ti, thi = t * c, t_h * c
            phases = _Phases(thi)
            dblock = SeriesMatrix(_symbol_1d_series(p, ti, thi, gamma, phases))
            mblock = SeriesMatrix(_stencil_series(element_matrices(p).mass, p, phases))
        else:
            dblock = symbol_1d(p, t * c, t_h * c, gamma).entries
            mblock = mass_symbol(p, t_h * c).entries
        blocks.append((dblock, mblock))

    total = None
    for i in range(d):
        term = None
        for j in range(d):
            factor = blocks[j][0] if j == i else blocks[j][1]
            if term is None:
                term = factor
            elif exact:
                term = term.kron(factor)
            else:
                term = np.kron(term, factor)
        total = term if total is None else total + term
    params = {"t": t, "t_h": t_h, "gamma": gamma, "cosines": cosines}
    return SymbolMatrix(total, d, p, params)


def condensation_coeffs(p, t):
    """
    c_i, d_i from B_t(lambda_0 + sum c_i lambda_i, lambda_j) = 0 and
    B_t(lambda_p + sum d_i lambda_i, lambda_j) = 0 for 1 <= j <= p-1,
    plus A1 = sum (-1)^i c_i C(p,i) and A2 likewise with d.
    """
    p = check_order(p)
    if _is_series(t):
        return condensation_series(p, t.order)
    if p == 1:
        return CondensationCoeffs(p, t, (), (), 0.0, 0.0)
    stiff, mass, signs, _ = _float_data(p)
    b = stiff - t * t * mass
    interior = b[1:p, 1:p]
    sv = scipy.linalg.svdvals(interior)
    guard = get_setting("CONDITION_GUARD")
    scale = max(sv.max(), np.abs(stiff[1:p, 1:p]).max())
    if sv.min() < guard * scale:
        raise EigenvalueCollision("interior block is numerically singular",
                                  {"p": p, "t": t, "sigma_min": float(sv.min()), "sigma_max": float(sv.max())})
    rhs = -np.column_stack([b[1:p, 0], b[1:p, p]])
    sol = scipy.linalg.solve(interior, rhs, assume_a="sym")
    c, d = sol[:, 0], sol[:, 1]
    a1 = float(np.dot(signs[1:p], c))
    a2 = float(np.dot(signs[1:p], d))
    return CondensationCoeffs(p, t, tuple(c), tuple(d), a1, a2)


def condensation_series(p, order):
    """Exact series c_i(t), d_i(t) through t^order by Cramer's rule on the interior block."""
    p = check_order(p)
    zero = TruncatedSeries.zero(order)
    if p == 1:
        return CondensationCoeffs(p, TruncatedSeries.variable(order), (), (), zero, zero)
    em = element_matrices(p)
    t = TruncatedSeries.variable(order)
    t_sq = t * t

    def b_entry(i, j):
        return TruncatedSeries.constant(em.stiffness[i][j], order) - t_sq * em.mass[i][j]

    interior = [[b_entry(i, j) for j in range(1, p)] for i in range(1, p)]
    denominator = series_det(SeriesMatrix(interior))

    def solve(column):
        rhs = [-b_entry(i, column) for i in range(1, p)]
        out = []
        for k in range(p - 1):
            replaced = [[rhs[r] if col == k else interior[r][col] for col in range(p - 1)] for r in range(p - 1)]
            out.append(divide(series_det(SeriesMatrix(replaced)), denominator))
        return out

    c = solve(0)
    d = solve(p)
    a1 = zero
    a2 = zero
    for i in range(1, p):
        weight = (-1) ** i * binomial(p, i)
        a1 = a1 + c[i - 1] * weight
        a2 = a2 + d[i - 1] * weight
    return CondensationCoeffs(p, t, tuple(c), tuple(d), a1, a2)


def q_transform(p, beta, coeffs):
    """Unit upper triangular Q^beta with first row (1, c_i + e^{-i beta} d_i)."""
    p = check_order(p)
    if _is_series(beta):
        order = beta.order
        u = elementary_series("exp_i", -1, order).compose(beta)
        one = TruncatedSeries.constant(1, order)
        zero = TruncatedSeries.zero(order)
        rows = [[one if i == j else zero for j in range(p)] for i in range(p)]
        for j in range(1, p):
            rows[0][j] = coeffs.c[j - 1] + u * coeffs.d[j - 1]
        return SymbolMatrix(SeriesMatrix(rows), 1, p, {"beta": beta})
    q = np.eye(p, dtype=complex)
    if p > 1:
        q[0, 1:] = np.asarray(coeffs.c) + np.exp(-1j * float(beta)) * np.asarray(coeffs.d)
    return SymbolMatrix(q, 1, p, {"beta": beta})


def congruence(q, matrix):
    """Q D Q^H"""
    if matrix.exact:
        entries = q.entries.matmul(matrix.entries).matmul(q.entries.conjugate_transpose())
    else:
        entries = q.entries @ matrix.entries @ q.entries.conj().T
    return SymbolMatrix(entries, matrix.d, matrix.p, dict(matrix.params, transformed=True))


# closed forms of the condensed basis


def _phi_terms(p, kind):
    """(signed power j, numerator weight a_j, polynomial P_j, denominator weight b_j) per j."""
    if kind == "even":
        n = p // 2
        terms = []
        for j in range(1, n + 2):
            top = 2 * n + 2 - 2 * j
            a = rational(2 * factorial(2 * n + 1), factorial(top))
            poly = _phi_polynomial(2 * n + 2 * j, top, j)
            b = rational(2 * factorial(2 * n + 2 * j), factorial(top) * factorial(2 * j - 1))
            terms.append((j, a, poly, b))
        return terms
    if kind == "odd":
        n = (p + 1) // 2
        terms = []
        for j in range(1, n + 1):
            top = 2 * n + 1 - 2 * j
            a = rational(2 * factorial(2 * n), factorial(top))
            poly = _phi_polynomial(2 * n - 1 + 2 * j, top, j)
            b = rational(2 * factorial(2 * n - 1 + 2 * j), factorial(top) * factorial(2 * j - 1))
            terms.append((j, a, poly, b))
        return terms
    raise DegenerateInput("kind must be even or odd", {"kind": kind})


@lru_cache(maxsize=None)
def _phi_polynomial(upper, top, j):
    """sum_m C(upper, m-1+2j) C(top, m) x^(top-m) (x-1)^m"""
    x = Polynomial.from_coefficients([0, 1])
    xm1 = Polynomial.from_coefficients([-1, 1])
    total = Polynomial(())
    for m in range(top + 1):
        weight = binomial(upper, m - 1 + 2 * j) * binomial(top, m)
        if not weight:
            continue
        term = Polynomial.from_coefficients([weight])
        for _ in range(top - m):
            term = term * x
        for _ in range(m):
            term = term * xm1
        total = total + term
    return total


def _phi_value(p, kind, t, x):
    terms = _phi_terms(p, kind)
    num = 0.0
    den = 0.0
    largest = 0.0
    for j, a, poly, b in terms:
        weight = (-1) ** j * t ** (-2 * j)
        bf = float(b.numerator) / float(b.denominator)
        af = float(a.numerator) / float(a.denominator)
        px = np.polynomial.polynomial.polyval(x, poly.as_float_array())
        num += weight * af * px
        den += weight * bf
        largest = max(largest, abs(weight * bf))
    if abs(den) < get_setting("CONDITION_GUARD") * largest:
        raise EigenvalueCollision("closed-form denominator vanishes", {"p": p, "t": t, "kind": kind})
    return num / den


def phi_even_odd(p, t, x):
    """(Phi_e(x), Phi_o(x)) from the explicit rational-in-t^2 closed forms."""
    p = check_order(p)
    if t == 0:
        raise DegenerateInput("closed forms need t != 0", {"t": t})
    return _phi_value(p, "even", t, x), _phi_value(p, "odd", t, x)


def phi_even_odd_legendre(p, t, x):
    """Same functions through Legendre derivatives on [-1, 1] with tau = t/2, s = 2x - 1."""
    p = check_order(p)
    if t == 0:
        raise DegenerateInput("closed forms need t != 0", {"t": t})
    tau = t / 2.0
    s = 2.0 * np.asarray(x, dtype=float) - 1.0
    out = []
    for degree, count in ((2 * (p // 2) + 1, p // 2 + 1), (2 * ((p + 1) // 2), (p + 1) // 2)):
        num = 0.0
        den = 0.0
        for j in range(1, count + 1):
            poly = legendre_derivative(degree, 2 * j - 1)
            weight = (-1) ** j * tau ** (-2 * j)
            num = num + weight * np.polynomial.polynomial.polyval(s, poly.as_float_array())
            den += weight * np.polynomial.polynomial.polyval(1.0, poly.as_float_array())
        out.append(num / den)
    return out[0], out[1]


def phi_b_form_series(p, kind, order):
    """Exact series of B_t(Phi, Phi) for Phi = Phi_e or Phi_o."""
    terms = _phi_terms(p, kind)
    top_j = terms[-1][0]
    t = TruncatedSeries.variable(order)
    t_sq = t * t
    # scale numerator and denominator by t^(2 top_j) so both are polynomials in t
    powers = [t_sq ** (top_j - j) for j, _, _, _ in terms]
    den = TruncatedSeries.zero(order)
    for (j, _, _, b), power in zip(terms, powers):
        den = den + power * ((-1) ** j * b)
    grad = TruncatedSeries.zero(order)
    value = TruncatedSeries.zero(order)
    for (j, a, pj, _), pow_j in zip(terms, powers):
        for (k, ak, pk, _), pow_k in zip(terms, powers):
            weight = (-1) ** (j + k) * a * ak
            grad = grad + pow_j * pow_k * (weight * (pj.derivative() * pk.derivative()).integrate())
            value = value + pow_j * pow_k * (weight * (pj * pk).integrate())
    numerator = grad - t_sq * value
    return divide(numerator, den * den)


def comb_identity_N(p, j):
    """
    Two evaluations of

        N = sum_{i=1}^{p-1} (-1)^i C(p,i) sum_m C(p+2j, m-1+2j) C(p+2-2j, m) i^(p+2-2j-m) (i-p)^m

    (brute force and closed form); raises IdentityViolation when they differ.
    """
    if not 1 <= j <= p // 2 + 1:
        raise DegenerateInput("index j out of range", {"p": p, "j": j})
    top = p + 2 - 2 * j
    brute = 0
    for i in range(1, p):
        inner = 0
        for m in range(top + 1):
            inner += binomial(p + 2 * j, m - 1 + 2 * j) * binomial(top, m) * i ** (top - m) * (i - p) ** m
        brute += (-1) ** i * binomial(p, i) * inner
    if j == 1:
        closed = 2 * (-1) ** p * (factorial(2 * p + 1) // factorial(p + 1) - (p + 2) * p ** p)
    else:
        closed = 2 * (-1) ** (p + 1) * binomial(p + 2 * j, 2 * j - 1) * p ** top
    if brute != closed:
        raise IdentityViolation("combinatorial identity mismatch", {"p": p, "j": j, "brute": brute, "closed": closed})
    return brute, closed


def kron_cofactor(p):
    """
    (1,1)-cofactor of D1 x M1 + M1 x D1, where D1 = diag(0, D_0) and M1 has
    first row (1, int lambda_j) and the interior mass block below.
    """
    p = check_order(p)
    em = element_matrices(p)
    integrals = basis_integrals(p)
    d0 = interior_stiffness(p)
    d1 = [[QQ(0)] * p for _ in range(p)]
    m1 = [[QQ(0)] * p for _ in range(p)]
    m1[0][0] = QQ(1)
    for i in range(1, p):
        m1[0][i] = m1[i][0] = integrals[i]
        for j in range(1, p):
            d1[i][j] = d0[i - 1][j - 1]
            m1[i][j] = em.mass[i][j]
    dd = DomainMatrix(d1, (p, p), QQ)
    mm = DomainMatrix(m1, (p, p), QQ)
    hat = _domain_kron(dd, mm) + _domain_kron(mm, dd)
    size = p * p
    if size == 1:
        return QQ(1)
    rows = hat.to_Matrix().tolist()
    minor = [[QQ.from_sympy(rows[i][j]) for j in range(1, size)] for i in range(1, size)]
    return DomainMatrix(minor, (size - 1, size - 1), QQ).det()


def _domain_kron(a, b):
    ra = a.to_Matrix().tolist()
    rb = b.to_Matrix().tolist()
    n, m = len(ra), len(rb)
    rows = [[QQ.from_sympy(ra[i // m][j // m] * rb[i % m][j % m]) for j in range(n * m)] for i in range(n * m)]
    return DomainMatrix(rows, (n * m, n * m), QQ)


def lagrange_check(p):
    """Nodal property of the basis at every node (used by the identity suite)."""
    basis = lagrange_basis(p)
    return all(basis[i].evaluate(rational(j, p)) == (QQ(1) if i == j else QQ(0))
               for i in range(p + 1) for j in range(p + 1))
