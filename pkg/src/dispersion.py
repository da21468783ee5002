"""
Dispersion analysis: discrete wave numbers, phase differences and penalty choices.

The discrete wave number is the root t_h = k_h h of det D^{t,t_h} = 0 closest
to t = kh. Everything numeric runs on the float backend of symbol.py; the
exact expansions run on the series backend with the formal gamma.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.optimize
from sympy.polys.domains import QQ, QQ_I

from basis import check_order
from errors import DegenerateInput, ExpansionFailure, HermitianityLoss, RootNotFound, UnsupportedOrder
from exact import double_factorial, factorial, gaussian, rational, to_float
from logger import get_logger
from series import GAMMA, RING, TruncatedSeries, implicit_root, lift
from settings import get_setting
from symbol import FORMAL, direction_cosines, symbol_1d, symbol_nd

logger = get_logger()

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class DispersionRecord:
    d: int
    p: int
    k: float
    h: float
    t: float
    gamma: float
    direction: tuple
    k_h: float
    phase_diff: float

    def as_row(self):
        angles = tuple(self.direction) + (0.0, 0.0)
        return {
            "d": self.d, "p": self.p, "k": self.k, "h": self.h, "t": self.t, "gamma": self.gamma,
            "theta": angles[0], "theta2": angles[1], "k_h": self.k_h, "phase_diff": self.phase_diff,
        }


@dataclass(frozen=True)
class PhaseExpansion:
    """
    Exact series of t_h - t. Coefficients are ring elements free of t: plain
    Gaussian rationals for a fixed gamma, polynomials in gamma for the formal one.
    """
    p: int
    gamma_mode: str
    order: int
    coefficients: dict = field(default_factory=dict)

    def coefficient(self, n):
        if n > self.order:
            raise DegenerateInput("coefficient beyond expansion order", {"n": n, "order": self.order})
        return self.coefficients.get(n, RING.zero)

    def lag_coefficient(self, n):
        """Coefficient of t - t_h, the phase lag; positive at the leading power."""
        return -self.coefficient(n)

    def leading_power(self):
        powers = [n for n, c in self.coefficients.items() if c]
        return min(powers) if powers else None

    def is_real(self):
        return all(not c.y for poly in self.coefficients.values() for c in poly.values())

    def value(self, n):
        """Gaussian rational coefficient for a fixed gamma."""
        poly = self.coefficient(n)
        if any(monom[1] for monom in poly.keys()):
            raise DegenerateInput("coefficient depends on the formal gamma", {"n": n})
        return dict(poly).get((0, 0), QQ_I(0, 0))


# penalty parameters


def gamma0(p):
    """-(1/(2p+1)) (p!/(2p)!)^2, the penalty that cancels the leading dispersion term."""
    p = check_order(p)
    return -leading_constant(p)


def leading_constant(p):
    """(1/(2p+1)) (p!/(2p)!)^2, the FEM dispersion constant."""
    ratio = rational(factorial(p), factorial(2 * p))
    return ratio * ratio / (2 * p + 1)


def c_p_formula(p):
    """(|gamma_0|/24) |r_p/(2p+3)!! - 1| with r_1 = 9 and r_p = 24 (2p-3)!! otherwise."""
    p = check_order(p)
    r_p = 9 if p == 1 else 24 * double_factorial(2 * p - 3)
    value = rational(r_p, double_factorial(2 * p + 3)) - 1
    return abs(gamma0(p)) / 24 * abs(value)


_CLOSED_FORMS = {
    1: ([(-6, 2), (6, 1)], []),
    2: ([(-240, 104, -3), (240, 16, 1)],
        [(5760, -1920), (-11520, 960), (5760, 960)]),
    3: ([(-25200, 11520, -540, 4), (25200, 1080, 30, 1)],
        [(36288000, -15724800, 453600), (-72576000, 13305600, -604800), (36288000, 2419200, 151200)]),
    4: ([(-5080320, 2378880, -134064, 1800, -5), (5080320, 161280, 3024, 48, 1)],
        [(1024192512000, -468202291200, 21946982400, -162570240),
         (-2048385024000, 424308326400, -23166259200, 121927680),
         (1024192512000, 43893964800, 1219276800, 40642560)]),
}


def gamma_opt_closed_form(p, t, dps=50):
    """
    Explicit pollution-free gamma for p = 1..4, evaluated in mpmath.

    Numerator and denominator are polynomials in cos(t) whose coefficients
    are even polynomials in t; the p = 1 denominator is 12 (1 - cos t)^2.
    """
    if p not in _CLOSED_FORMS:
        raise UnsupportedOrder("closed form known for p = 1..4 only", {"p": p})
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        c = mpmath.cos(t)
        numerator_terms, denominator_terms = _CLOSED_FORMS[p]

        def combine(terms):
            total = mpmath.mpf(0)
            for power, coeffs in enumerate(terms):
                total += c ** power * sum(mpmath.mpf(a) * t ** (2 * n) for n, a in enumerate(coeffs))
            return total

        numerator = combine(numerator_terms)
        denominator = 12 * (1 - c) ** 2 if p == 1 else combine(denominator_terms)
        if denominator == 0:
            raise DegenerateInput("t is a multiple of 2 pi", {"t": float(t)})
        return float(numerator / denominator)


def gamma_opt(p, t):
    """
    Root in gamma of det D^{t,t}(gamma) nearest to gamma_0: the penalty that
    makes the 1D scheme free of phase error at this t.
    """
    p = check_order(p)
    t = float(t)
    g0 = to_float(gamma0(p))

    def g(gamma):
        return _real_det(symbol_1d(p, t, t, gamma), {"p": p, "t": t, "gamma": gamma})

    window = get_setting("GAMMA_OPT_WINDOW") * abs(g0)
    f0 = g(g0)
    if f0 == 0.0:
        return g0
    # geometric offsets outward from gamma_0, both sides in step
    offsets = abs(g0) * 1e-6 * 2.0 ** np.arange(0, 64)
    offsets = offsets[offsets <= window]
    previous = {+1: (g0, f0), -1: (g0, f0)}
    for offset in offsets:
        for side in (+1, -1):
            gamma = g0 + side * offset
            value = g(gamma)
            last_gamma, last_value = previous[side]
            if value == 0.0:
                return gamma
            if np.sign(value) != np.sign(last_value):
                lo, hi = sorted((last_gamma, gamma))
                root = scipy.optimize.brentq(g, lo, hi, xtol=1e-15 * abs(g0), rtol=4 * EPS)
                logger.debug(f"gamma_opt(p={p}, t={t}) = {root!r}")
                return root
            previous[side] = (gamma, value)
    raise RootNotFound("no sign change of the determinant in gamma", {"p": p, "t": t, "window": window})


def resolve_gamma(rule, p, t=None):
    """Numeric gamma for a rule name (fem, gamma0, gamma-opt) or a literal value."""
    if rule in (None, "fem"):
        return 0.0
    if rule == "gamma0":
        return to_float(gamma0(p))
    if rule == "gamma-opt":
        if t is None:
            raise DegenerateInput("gamma-opt needs t = kh")
        return gamma_opt(p, t)
    try:
        return float(rule)
    except (TypeError, ValueError):
        raise DegenerateInput("unknown gamma rule", {"gamma": rule})


# discrete wave number


def _real_det(symbol, details):
    """Re det after checking the imaginary part against a Hadamard-bound scale."""
    value = symbol.det()
    scale = float(np.prod(np.linalg.norm(symbol.entries, axis=1)))
    if abs(value.imag) > get_setting("HERMITIAN_TOL") * max(scale, np.finfo(float).tiny):
        raise HermitianityLoss("determinant has a significant imaginary part",
                               dict(details, imag=float(value.imag), scale=scale))
    return float(value.real)


def _check_wavenumber_input(p, k, h):
    if not k > 0 or not h > 0:
        raise DegenerateInput("k and h must be positive", {"k": k, "h": h})
    t = k * h
    limit = get_setting("PREASYMPTOTIC_LIMIT")
    if t / p > limit:
        raise DegenerateInput("kh/p outside the preasymptotic window", {"p": p, "t": t, "limit": limit})
    return t


def discrete_wavenumber(d, p, k, h, gamma=0.0, direction=None):
    """
    k_h for a plane wave of number k on a mesh of size h.

    Brackets the root of Re det symbol_nd(d, p, t, t_h) symmetrically around t,
    starting from the predicted gap scale and doubling up to the cap, then
    refines it with Brent's method.
    """
    p = check_order(p)
    k = float(k)
    h = float(h)
    gamma = float(gamma)
    t = _check_wavenumber_input(p, k, h)
    details = {"d": d, "p": p, "t": t, "gamma": gamma}
    if direction is not None:
        details["direction"] = direction

    def g(t_h):
        return _real_det(symbol_nd(d, p, t, t_h, direction=direction, gamma=gamma), details)

    center = g(t)
    if center == 0.0:
        return k
    width = max(get_setting("BRACKET_START") * t ** (2 * p + 1), 8 * EPS * t)
    cap = get_setting("BRACKET_CAP") * t
    while width <= cap:
        brackets = [tuple(sorted((t, end))) for end in (t - width, t + width)
                    if np.sign(g(end)) != np.sign(center)]
        if not brackets:
            width *= 2.0
            continue
        roots = [scipy.optimize.brentq(g, lo, hi, xtol=get_setting("ROOT_RTOL") * t, rtol=4 * EPS)
                 for lo, hi in brackets]
        root = min(roots, key=lambda r: abs(r - t))
        logger.debug(f"discrete_wavenumber: t={t!r} bracket width={width:.3e} t_h={root!r}")
        return root / h
    raise RootNotFound("no sign change of Re det within the bracket cap", dict(details, cap=cap))


def direction_grid(d, steps=None):
    """Uniform sweep of [0, pi/2] (2D) or its square (3D); trivial in 1D."""
    if d == 1:
        return [None]
    if d == 2:
        steps = steps or get_setting("THETA_STEPS_2D")
        return [float(theta) for theta in np.linspace(0.0, np.pi / 2, steps)]
    if d == 3:
        steps = steps or get_setting("THETA_STEPS_3D")
        angles = np.linspace(0.0, np.pi / 2, steps)
        return [(float(a), float(b)) for a in angles for b in angles]
    raise DegenerateInput("dimension must be 1, 2 or 3", {"d": d})


def _ordered_map(func, items):
    """map() that fans out over WORKERS threads and keeps input order."""
    workers = int(get_setting("WORKERS") or 1)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def phase_difference(d, p, k, h, gamma=0.0, direction_sweep=None):
    """(max over directions of |k - k_h|, the direction attaining it)."""
    sweep = direction_sweep if direction_sweep is not None else direction_grid(d)

    def one(direction):
        try:
            return abs(k - discrete_wavenumber(d, p, k, h, gamma, direction))
        except RootNotFound as e:
            e.details.setdefault("direction", direction)
            raise

    values = _ordered_map(one, list(sweep))
    index = int(np.argmax(values))
    return values[index], sweep[index]


def direction_factor(p, direction=0.0, d=2):
    """sum_i c_i^(2p+2) over the direction cosines; cos^(2p+2) + sin^(2p+2) in 2D."""
    cosines = direction_cosines(d, direction)
    return float(sum(abs(c) ** (2 * p + 2) for c in cosines))


def predicted_phase_difference(p, k, h, gamma=0.0, direction=0.0, d=1):
    """Leading term (1/2)(C_p + gamma) * direction factor * k^(2p+1) h^(2p)."""
    factor = 1.0 if d == 1 else direction_factor(p, direction, d)
    return 0.5 * (to_float(leading_constant(p)) + gamma) * factor * k ** (2 * p + 1) * h ** (2 * p)


def _record(d, p, k, h, gamma_rule, direction):
    gamma = resolve_gamma(gamma_rule, p, k * h)
    if d == 1:
        k_h = discrete_wavenumber(d, p, k, h, gamma)
        diff = abs(k - k_h)
        direction = None
    elif direction is not None:
        k_h = discrete_wavenumber(d, p, k, h, gamma, direction)
        diff = abs(k - k_h)
    else:
        diff, direction = phase_difference(d, p, k, h, gamma)
        k_h = discrete_wavenumber(d, p, k, h, gamma, direction)
    angles = () if direction is None else tuple(np.atleast_1d(direction).tolist())
    return DispersionRecord(d, p, float(k), float(h), float(k * h), gamma, angles, float(k_h), float(diff))


def phase_sweep_h(p, k, h_values, gamma="fem", d=1, direction=None):
    """DispersionRecords over a list of mesh sizes at fixed k."""
    return _ordered_map(lambda h: _record(d, p, k, h, gamma, direction), list(h_values))


def phase_sweep_k(p, k_values, t, gamma="fem", d=1, direction=None):
    """DispersionRecords over a list of wave numbers at fixed t = kh."""
    return _ordered_map(lambda k: _record(d, p, k, t / k, gamma, direction), list(k_values))


# exact expansion


def _exact_gamma(gamma_mode, p):
    if gamma_mode in (FORMAL, None):
        return FORMAL, "formal"
    if gamma_mode == "gamma0":
        return gamma0(p), "gamma0"
    if gamma_mode in ("fem", 0):
        return QQ(0), "fem"
    if isinstance(gamma_mode, float):
        raise DegenerateInput("exact expansion needs an exact gamma", {"gamma": gamma_mode})
    if isinstance(gamma_mode, str):
        try:
            num, _, den = gamma_mode.partition("/")
            value = rational(int(num), int(den or 1))
        except ValueError:
            raise DegenerateInput("unknown gamma mode", {"gamma": gamma_mode})
        return value, gamma_mode
    return QQ.convert(gamma_mode), str(gamma_mode)


def phase_expansion(p, gamma_mode=FORMAL, target_order=None, d=1, cosines=None):
    """
    Exact series of t_h - t through t^target_order (default 2p+3).

    gamma_mode is "formal", "gamma0", "fem" or an exact rational; d > 1
    needs rational direction cosines (default: the x axis).
    """
    p = check_order(p)
    cap = get_setting("EXPANSION_P_MAX")
    if p > cap:
        raise UnsupportedOrder("expansion order above EXPANSION_P_MAX", {"p": p, "cap": cap})
    gamma, label = _exact_gamma(gamma_mode, p)
    start = 2 * p + 1
    target = 2 * p + 3 if target_order is None else int(target_order)
    if target < start:
        raise DegenerateInput("target order below the first correction", {"target": target, "start": start})
    order = target + 3
    t = TruncatedSeries.variable(order)

    def build_F(delta):
        symbol = symbol_nd(d, p, t, t + delta, gamma=gamma, cosines=cosines)
        return symbol.det()

    logger.info(f"Expanding t_h - t for p={p}, gamma={label}, d={d} through t^{target}")
    try:
        delta = implicit_root(build_F, start, target, order=order)
    except ExpansionFailure as e:
        e.details.update({"p": p, "gamma": label, "d": d})
        raise
    coefficients = {n: delta.coefficient(n) for n in range(target + 1) if delta.coefficient(n)}
    return PhaseExpansion(p, label, target, coefficients)


def leading_lag_coefficient(p, cosines=None):
    """(1/2)(C_p + gamma) * sum c_i^(2p+2) as a ring element in the formal gamma."""
    factor = QQ(1)
    if cosines is not None:
        factor = sum((QQ.convert(c) ** (2 * p + 2) for c in cosines), QQ(0))
    half = rational(1, 2) * factor
    return lift(gaussian(half * leading_constant(p))) + lift(gaussian(half)) * GAMMA


# convergence orders


def order_fit(samples):
    """Least-squares slope of log(err) against log(x)."""
    samples = list(samples)
    if len(samples) < 3:
        raise DegenerateInput("order_fit needs at least three samples", {"count": len(samples)})
    x = np.array([s[0] for s in samples], dtype=float)
    err = np.array([s[1] for s in samples], dtype=float)
    if np.any(x <= 0) or np.any(err <= 0):
        raise DegenerateInput("order_fit needs positive samples", {"x": x.tolist(), "err": err.tolist()})
    slope, _ = np.polyfit(np.log(x), np.log(err), 1)
    return float(slope)
