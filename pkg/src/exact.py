"""
Exact arithmetic primitives.

Rationals are elements of sympy's QQ domain and Gaussian rationals are
elements of QQ_I. Both are immutable and normalized by the domain on every
operation, so equality is structural.
"""

from functools import lru_cache

import sympy
from sympy.polys.domains import QQ, QQ_I

from errors import DegenerateInput


def rational(numerator, denominator=1):
    """Exact rational numerator/denominator in lowest terms."""
    if denominator == 0:
        raise DegenerateInput("zero denominator", {"numerator": numerator})
    if isinstance(numerator, float) or isinstance(denominator, float):
        raise DegenerateInput("floats are not exact rationals", {"value": numerator})
    return QQ.convert(numerator) / QQ.convert(denominator)


def gaussian(re, im=0):
    """Gaussian rational re + i*im from ints or rationals."""
    return QQ_I(QQ.convert(re), QQ.convert(im))


def as_gaussian(value):
    if QQ_I.of_type(value):
        return value
    return gaussian(value, 0)


def conj(value):
    value = as_gaussian(value)
    return QQ_I(value.x, -value.y)


def gaussian_arith(a, b, op):
    """Field arithmetic on Gaussian rationals; op is add, sub, mul, div or conj (unary, b ignored)."""
    a = as_gaussian(a)
    if op == "conj":
        return conj(a)
    b = as_gaussian(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        try:
            return a / b
        except ZeroDivisionError:
            raise DegenerateInput("division by zero Gaussian rational", {"numerator": str(a)})
    raise DegenerateInput("unknown Gaussian operation", {"op": op})


def is_real(value):
    return not as_gaussian(value).y


@lru_cache(maxsize=None)
def binomial(n, k):
    if n < 0:
        raise DegenerateInput("binomial needs n >= 0", {"n": n})
    if k < 0 or k > n:
        return 0
    return int(sympy.binomial(n, k))


@lru_cache(maxsize=None)
def factorial(n):
    return int(sympy.factorial(n))


def double_factorial(n):
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n < -1:
        raise DegenerateInput("double factorial needs n >= -1", {"n": n})
    if n <= 0:
        return 1
    return int(sympy.factorial2(n))


def to_float(value):
    """Rational (or real Gaussian rational) to the nearest double."""
    if QQ_I.of_type(value):
        value = value.x
    value = QQ.convert(value)
    return int(value.numerator) / int(value.denominator)


def to_complex(value):
    value = as_gaussian(value)
    return complex(to_float(value.x), to_float(value.y))
