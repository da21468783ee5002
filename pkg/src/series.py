"""
Truncated power series in t with Gaussian-rational coefficients.

A series is stored as an element of the sparse ring QQ_I[t, gamma] together
with its truncation order N: every term t^n gamma^g with n <= N is exact and
nothing is claimed beyond N. The formal gamma lets one expansion carry the
penalty parameter symbolically; for a numeric gamma the ring elements are
simply constant in gamma.
"""

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import ring

from errors import DegenerateInput, ExpansionFailure
from exact import factorial, gaussian
from logger import get_logger

logger = get_logger()

RING, T, GAMMA = ring("t,gamma", QQ_I)

ELEMENTARY_KINDS = ("exp_i", "cos", "sin")


def lift(value):
    """Scalar (int, QQ, QQ_I or gamma-polynomial) as a ring element."""
    if isinstance(value, TruncatedSeries):
        raise TypeError("lift expects a scalar, not a series")
    if hasattr(value, "ring") and value.ring == RING:
        return value
    if QQ_I.of_type(value):
        return RING(value)
    return RING(gaussian(value, 0))


def _conj_ring(poly):
    return RING.from_dict({monom: QQ_I(c.x, -c.y) for monom, c in poly.items()})


def _truncate_poly(poly, order):
    if all(monom[0] <= order for monom in poly.keys()):
        return poly
    return RING.from_dict({monom: c for monom, c in poly.items() if monom[0] <= order})


def _shift_down(poly, amount):
    return RING.from_dict({(monom[0] - amount, monom[1]): c for monom, c in poly.items()})


def _shift_up(poly, amount):
    return RING.from_dict({(monom[0] + amount, monom[1]): c for monom, c in poly.items()})


class TruncatedSeries:
    __slots__ = ("poly", "order")

    def __init__(self, poly, order):
        if order < 0:
            raise DegenerateInput("negative truncation order", {"order": order})
        self.order = int(order)
        self.poly = _truncate_poly(poly, self.order)

    # construction

    @classmethod
    def zero(cls, order):
        return cls(RING.zero, order)

    @classmethod
    def constant(cls, value, order):
        return cls(lift(value), order)

    @classmethod
    def variable(cls, order, scale=1):
        """scale * t"""
        return cls(T * lift(scale), order)

    @classmethod
    def from_coefficients(cls, coefficients, order=None):
        order = len(coefficients) - 1 if order is None else order
        poly = RING.zero
        for n, c in enumerate(coefficients):
            if n > order:
                break
            poly += lift(c) * T ** n
        return cls(poly, order)

    # inspection

    def coefficient(self, n):
        """Coefficient of t^n as a ring element free of t (a polynomial in gamma)."""
        if n > self.order:
            raise DegenerateInput("coefficient beyond truncation order", {"n": n, "order": self.order})
        return RING.from_dict({(0, monom[1]): c for monom, c in self.poly.items() if monom[0] == n})

    def coefficients(self):
        return [self.coefficient(n) for n in range(self.order + 1)]

    def valuation(self):
        """Lowest power with a nonzero coefficient, None for the zero series."""
        if not self.poly:
            return None
        return min(monom[0] for monom in self.poly.keys())

    def leading_coefficient(self):
        v = self.valuation()
        return None if v is None else self.coefficient(v)

    def is_zero(self):
        return not self.poly

    def is_real(self):
        return all(not c.y for c in self.poly.values())

    def depends_on_gamma(self):
        return any(monom[1] for monom in self.poly.keys())

    def __repr__(self):
        return f"TruncatedSeries({self.poly.as_expr()} + O(t^{self.order + 1}))"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        order = min(self.order, other.order)
        return _truncate_poly(self.poly - other.poly, order) == RING.zero

    __hash__ = None

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries(lift(other), self.order)

    def __neg__(self):
        return TruncatedSeries(-self.poly, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.poly + other.poly, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.poly - other.poly, min(self.order, other.order))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.poly * lift(other), self.order)
        order = min(self.order, other.order)
        return TruncatedSeries(_mul_truncated(self.poly, other.poly, order), order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return divide(self, self._coerce(other))

    def __pow__(self, n):
        if n < 0:
            raise DegenerateInput("negative power of a series", {"n": n})
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def truncate(self, order):
        return TruncatedSeries(self.poly, min(order, self.order))

    def with_order(self, order):
        """Re-declare the truncation order of an exactly known series (a polynomial)."""
        return TruncatedSeries(self.poly, order)

    def conjugate(self):
        """Complex conjugate; gamma is real."""
        return TruncatedSeries(_conj_ring(self.poly), self.order)

    def substitute_gamma(self, value):
        """Evaluate the formal gamma at a rational or Gaussian rational value."""
        value = lift(value)
        poly = RING.zero
        for monom, c in self.poly.items():
            # ring elements refuse 0**0
            weight = value ** monom[1] if monom[1] else RING.one
            poly += RING({(monom[0], 0): c}) * weight
        return TruncatedSeries(poly, self.order)

    def compose(self, inner):
        """self(inner(t)); inner must have zero constant term."""
        return compose(self, inner)


def _mul_truncated(a, b, order):
    if not a or not b:
        return RING.zero
    if len(a) * len(b) < 64:
        return _truncate_poly(a * b, order)
    items_b = sorted(b.items())
    result = {}
    for (na, ga), ca in a.items():
        limit = order - na
        if limit < 0:
            continue
        for (nb, gb), cb in items_b:
            if nb > limit:
                break
            key = (na + nb, ga + gb)
            value = result.get(key)
            result[key] = ca * cb if value is None else value + ca * cb
    return RING.from_dict({k: v for k, v in result.items() if v})


def _unit_inverse(series):
    """Inverse of a series whose constant term is a nonzero constant."""
    c0 = series.coefficient(0)
    if not c0 or not c0.is_ground:
        raise DegenerateInput("leading coefficient is not invertible", {"leading": str(c0.as_expr())})
    inv0 = lift(gaussian(1) / c0.LC)
    coeffs = [series.coefficient(n) for n in range(series.order + 1)]
    inv = [inv0]
    for n in range(1, series.order + 1):
        acc = RING.zero
        for k in range(1, n + 1):
            if coeffs[k]:
                acc += coeffs[k] * inv[n - k]
        inv.append(-acc * inv0)
    poly = RING.zero
    for n, c in enumerate(inv):
        if c:
            poly += c * T ** n
    return TruncatedSeries(poly, series.order)


def divide(a, b):
    vb = b.valuation()
    if vb is None:
        raise DegenerateInput("division by the zero series")
    va = a.valuation()
    if va is None:
        return TruncatedSeries.zero(max(0, min(a.order, b.order) - vb))
    if va < vb:
        raise DegenerateInput("quotient is not a power series", {"valuation_num": va, "valuation_den": vb})
    a_unit = TruncatedSeries(_shift_down(a.poly, va), a.order - va)
    b_unit = TruncatedSeries(_shift_down(b.poly, vb), b.order - vb)
    inner_order = min(a_unit.order, b_unit.order)
    quotient = a_unit.truncate(inner_order) * _unit_inverse(b_unit.truncate(inner_order))
    order = min(inner_order + va - vb, a.order, b.order)
    return TruncatedSeries(_shift_up(quotient.poly, va - vb), order)


def compose(outer, inner):
    if inner.coefficient(0):
        raise DegenerateInput("composition needs an inner series without constant term")
    order = min(outer.order, inner.order)
    inner = inner.truncate(order)
    result = TruncatedSeries.zero(order)
    for n in range(outer.order, -1, -1):  # Horner
        result = result * inner + TruncatedSeries(outer.coefficient(n), order)
    return result


def series_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose":
        return compose(a, b)
    raise DegenerateInput("unknown series operation", {"op": op})


def elementary_series(kind, scale, order):
    """Maclaurin series of exp(i*scale*t), cos(scale*t) or sin(scale*t)."""
    if kind not in ELEMENTARY_KINDS:
        raise DegenerateInput("unknown elementary series", {"kind": kind})
    scale = QQ.convert(scale)
    coeffs = []
    for n in range(order + 1):
        magnitude = scale ** n / factorial(n)
        if kind == "exp_i":
            # i^n cycles 1, i, -1, -i
            re, im = [(1, 0), (0, 1), (-1, 0), (0, -1)][n % 4]
            coeffs.append(gaussian(re * magnitude, im * magnitude))
        elif kind == "cos":
            coeffs.append(gaussian((-1) ** (n // 2) * magnitude if n % 2 == 0 else 0))
        else:
            coeffs.append(gaussian((-1) ** (n // 2) * magnitude if n % 2 == 1 else 0))
    return TruncatedSeries.from_coefficients(coeffs, order)


# matrices of series


class SeriesMatrix:
    """Square array of TruncatedSeries sharing one truncation order."""

    def __init__(self, rows):
        rows = [list(row) for row in rows]
        size = len(rows)
        if any(len(row) != size for row in rows):
            raise DegenerateInput("series matrix must be square", {"rows": size})
        order = min(entry.order for row in rows for entry in row) if size else 0
        self.rows = [[entry.truncate(order) for entry in row] for row in rows]
        self.dim = size
        self.order = order

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def conjugate_transpose(self):
        return SeriesMatrix([[self.rows[j][i].conjugate() for j in range(self.dim)] for i in range(self.dim)])

    def matmul(self, other):
        size = self.dim
        out = []
        for i in range(size):
            row = []
            for j in range(size):
                acc = TruncatedSeries.zero(min(self.order, other.order))
                for k in range(size):
                    if not self.rows[i][k].is_zero() and not other.rows[k][j].is_zero():
                        acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return SeriesMatrix(out)

    def kron(self, other):
        size = self.dim * other.dim
        out = [[None] * size for _ in range(size)]
        for i in range(self.dim):
            for j in range(self.dim):
                a = self.rows[i][j]
                for k in range(other.dim):
                    for m in range(other.dim):
                        out[i * other.dim + k][j * other.dim + m] = a * other.rows[k][m]
        return SeriesMatrix(out)

    def __add__(self, other):
        return SeriesMatrix([[self.rows[i][j] + other.rows[i][j] for j in range(self.dim)]
                             for i in range(self.dim)])

    def minor(self, drop_row, drop_col):
        return SeriesMatrix([[entry for j, entry in enumerate(row) if j != drop_col]
                             for i, row in enumerate(self.rows) if i != drop_row])

    def is_hermitian(self):
        return all(self.rows[i][j] == self.rows[j][i].conjugate()
                   for i in range(self.dim) for j in range(i, self.dim))

    def det(self):
        return series_det(self)


def series_det(matrix):
    """
    Division-free determinant by Laplace expansion over column subsets.

    dets[mask] holds the minor built from the first popcount(mask) rows and
    the columns in mask; m * 2^(m-1) series products in total.
    """
    size = matrix.dim
    order = matrix.order
    if size == 0:
        return TruncatedSeries.constant(1, order)
    dets = {0: TruncatedSeries.constant(1, order)}
    for r in range(size):
        row = matrix.rows[r]
        nxt = {}
        for mask, minor in dets.items():
            if minor.is_zero():
                continue
            for c in range(size):
                if mask >> c & 1 or row[c].is_zero():
                    continue
                term = row[c] * minor
                if bin(mask >> (c + 1)).count("1") % 2:
                    term = -term
                key = mask | 1 << c
                nxt[key] = nxt[key] + term if key in nxt else term
        dets = nxt
    full = (1 << size) - 1
    return dets.get(full, TruncatedSeries.zero(order))


def implicit_root(build_F, start_order, target_order, order=None):
    """
    Solve F(t + delta(t), t) = 0 for the correction series delta, order by order.

    build_F maps a correction series delta (valuation >= start_order) to the
    series F. With sigma1 the valuation of F at delta = 0 and sigma2 that of
    dF/dt_h on t_h = t, the hypothesis sigma1 > 2*sigma2 >= 0 must hold and
    the leading coefficient of dF/dt_h must be a nonzero constant; each new
    coefficient of delta then solves a linear equation.
    """
    order = target_order + 3 if order is None else order
    zero = TruncatedSeries.zero(order)
    f0 = build_F(zero)
    sigma1 = f0.valuation()
    if f0.order < target_order + 1:
        raise ExpansionFailure("F is truncated below the target order", {"order": f0.order, "target_order": target_order})

    probe = TruncatedSeries(T ** start_order, order)
    diff = build_F(probe) - f0
    v_diff = diff.valuation()
    if v_diff is None:
        raise ExpansionFailure("F does not depend on t_h to the working order",
                               {"start_order": start_order, "order": order})
    sigma2 = v_diff - start_order
    slope = diff.coefficient(v_diff)
    details = {"sigma1": sigma1, "sigma2": sigma2, "start_order": start_order}
    if sigma2 < 0 or (sigma1 is not None and sigma1 <= 2 * sigma2):
        raise ExpansionFailure("valuation hypothesis sigma1 > 2*sigma2 >= 0 violated", details)
    if sigma1 is not None and sigma1 - sigma2 < start_order:
        raise ExpansionFailure("first correction power lies below start_order", details)
    if not slope.is_ground:
        raise ExpansionFailure("leading t_h-derivative coefficient depends on gamma", details)
    if target_order + sigma2 > order:
        raise ExpansionFailure("working order too small for the target", dict(details, order=order))
    slope_inv = lift(gaussian(1) / slope.LC)
    logger.debug(f"implicit_root: sigma1={sigma1}, sigma2={sigma2}, start={start_order}, target={target_order}")

    delta = zero
    residual = f0
    for n in range(start_order, target_order + 1):
        r = residual.coefficient(n + sigma2)
        if r:
            delta = delta + TruncatedSeries(-r * slope_inv * T ** n, order)
            residual = build_F(delta)

    for n in range(target_order + sigma2 + 1):
        if residual.coefficient(n):
            raise ExpansionFailure("residual does not vanish after the solve",
                                   dict(details, failing_power=n))
    return delta.truncate(target_order)
