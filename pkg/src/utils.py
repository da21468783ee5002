import os
import re
import sys
from fractions import Fraction

from errors import DegenerateInput


def resource_path(relative_path):
    """Get absolute path to a file shipped with the project (config templates, version.json)."""
    if hasattr(sys, '_MEIPASS'):
        base_path = sys._MEIPASS
    else:
        base_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(base_path, relative_path)


def is_valid_order(p, p_max=13):
    """Polynomial order inside 1..p_max."""
    return isinstance(p, int) and not isinstance(p, bool) and 1 <= p <= p_max


def is_valid_gamma_rule(rule):
    """fem, gamma0, gamma-opt, or a literal real number."""
    if rule in ("fem", "gamma0", "gamma-opt"):
        return True
    try:
        float(rule)
    except (TypeError, ValueError):
        return False
    return True


def is_valid_epsilon(eps):
    """Relative error tolerance strictly inside (0, 1)."""
    try:
        value = float(eps)
    except (TypeError, ValueError):
        return False
    return 0.0 < value < 1.0


def parse_int_range(text):
    """
    Parse "3", "1..4" or "1,2,5" into a list of ints.
    Raises DegenerateInput for empty or backwards ranges.
    """
    text = str(text).strip()
    if not text:
        raise DegenerateInput("empty integer range")
    match = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        if hi < lo:
            raise DegenerateInput("backwards integer range", {"range": text})
        return list(range(lo, hi + 1))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DegenerateInput("not an integer list", {"range": text})


def parse_float_list(text):
    """
    Parse "100", "0.1,0.2", or a geometric ladder "100*2^0..4"
    (= 100, 200, 400, 800, 1600) into a list of floats.
    """
    text = str(text).strip()
    if not text:
        raise DegenerateInput("empty value list")
    match = re.fullmatch(r"([0-9.eE+-]+)\*2\^(-?\d+)\.\.(-?\d+)", text)
    if match:
        base = float(match.group(1))
        lo, hi = int(match.group(2)), int(match.group(3))
        if hi < lo:
            raise DegenerateInput("backwards ladder", {"range": text})
        return [base * 2.0 ** j for j in range(lo, hi + 1)]
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DegenerateInput("not a number list", {"values": text})


def format_float(value):
    """17 significant digits, the CSV convention."""
    return format(float(value), ".17g")


def format_rational(value):
    """Render an exact rational as "num/den" (or "num" when integral)."""
    frac = Fraction(int(value.numerator), int(value.denominator))
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"
