"""
Identity suites: proven relations between the pieces of the dispersion
analysis, each checked either exactly or against an independent numerical
route. A failing check raises IdentityViolation with the offending case.
"""

import time
from dataclasses import dataclass

import numpy as np
from sympy.polys.domains import QQ

from basis import basis_integrals, interior_stiffness
from dispersion import leading_constant
from errors import CipwaveError, IdentityViolation
from exact import factorial, gaussian, rational
from fem import TensorMesh, assemble, bloch_symbol_from_matrix, interpolate, penalty_matrix
from logger import get_logger
from series import GAMMA, TruncatedSeries, divide, elementary_series, lift
from symbol import (
    FORMAL,
    comb_identity_N,
    condensation_coeffs,
    condensation_series,
    congruence,
    lagrange_check,
    kron_cofactor,
    mass_symbol,
    phi_b_form_series,
    phi_even_odd,
    phi_even_odd_legendre,
    q_transform,
    symbol_1d,
    symbol_nd,
)

logger = get_logger()


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    detail: str
    seconds: float

    def as_row(self):
        return {"suite": self.name, "passed": self.passed, "cases": self.cases,
                "detail": self.detail}


def check_a2_relation(orders=range(1, 7), ts=(0.1, 0.5, 1.0), tol=1e-12):
    """A2 = (-1)^p A1 for the condensation coefficients."""
    cases = 0
    for p in orders:
        for t in ts:
            coeffs = condensation_coeffs(p, t)
            defect = abs(coeffs.A2 - (-1) ** p * coeffs.A1)
            if defect > tol * max(1.0, abs(coeffs.A1)):
                raise IdentityViolation("A2 != (-1)^p A1", {"p": p, "t": t, "A1": coeffs.A1, "A2": coeffs.A2})
            cases += 1
    return cases


def check_comb_identity(p_max=12):
    """Brute-force double sum against its closed form, every valid j."""
    cases = 0
    for p in range(1, p_max + 1):
        for j in range(1, p // 2 + 2):
            comb_identity_N(p, j)
            cases += 1
    return cases


def _condensed_symbol(p, order, gamma=FORMAL):
    t = TruncatedSeries.variable(order)
    coeffs = condensation_series(p, order)
    q = q_transform(p, t, coeffs)
    return q, congruence(q, symbol_1d(p, t, t, gamma))


def check_decay_rates(orders=range(1, 5)):
    """
    Valuations of Q D^{t,t} Q^H: the corner is (C_p + gamma) t^(2p+2) + ...,
    the first row and column vanish to order p+2 and the interior block
    tends to D_0.
    """
    cases = 0
    for p in orders:
        order = 2 * p + 3
        _, condensed = _condensed_symbol(p, order)
        entries = condensed.entries
        corner = entries[0, 0]
        expected = lift(gaussian(leading_constant(p))) + GAMMA
        if corner.valuation() != 2 * p + 2 or corner.coefficient(2 * p + 2) != expected:
            raise IdentityViolation("corner entry has the wrong leading term",
                                    {"p": p, "valuation": corner.valuation(), "corner": repr(corner)})
        d0 = interior_stiffness(p)
        for i in range(1, p):
            for edge in (entries[0, i], entries[i, 0]):
                v = edge.valuation()
                if v is not None and v < p + 2:
                    raise IdentityViolation("first row decays too slowly", {"p": p, "j": i, "valuation": v})
            for j in range(1, p):
                if entries[i, j].coefficient(0) != lift(d0[i - 1][j - 1]):
                    raise IdentityViolation("interior block does not reduce to D_0", {"p": p, "i": i, "j": j})
        cases += 1
    return cases


def check_mass_transform(orders=range(1, 5)):
    """Q M Q^H at t -> 0 has corner 1 and first row int lambda_j."""
    cases = 0
    for p in orders:
        order = 2
        t = TruncatedSeries.variable(order)
        q = q_transform(p, t, condensation_series(p, order))
        mass = congruence(q, mass_symbol(p, t)).entries
        if mass[0, 0].coefficient(0) != lift(1):
            raise IdentityViolation("transformed mass corner is not 1", {"p": p})
        integrals = basis_integrals(p)
        for j in range(1, p):
            if mass[0, j].coefficient(0) != lift(integrals[j]):
                raise IdentityViolation("transformed mass row is not int lambda_j", {"p": p, "j": j})
        cases += 1
    return cases


def check_condensed_energies(orders=range(1, 5)):
    """
    B_t(Phi_e, Phi_e) + 2t tan(t/2) and B_t(Phi_o, Phi_o) - 2t cot(t/2) start
    at t^(4Ne+4) and t^(4No) with their closed-form coefficients.
    """
    cases = 0
    for p in orders:
        ne, no = p // 2, (p + 1) // 2
        for kind, power, coefficient in (
            ("even", 4 * ne + 4, rational(factorial(2 * ne + 1), factorial(4 * ne + 2)) ** 2 / (4 * ne + 3)),
            ("odd", 4 * no, 4 * rational(factorial(2 * no), factorial(4 * no)) ** 2 / (4 * no + 1)),
        ):
            order = power + 2
            energy = phi_b_form_series(p, kind, order + 2)
            t = TruncatedSeries.variable(order + 2)
            sin_half = elementary_series("sin", rational(1, 2), order + 2)
            cos_half = elementary_series("cos", rational(1, 2), order + 2)
            if kind == "even":
                reference = -(t * 2) * divide(sin_half, cos_half)
            else:
                reference = divide(t * cos_half * 2, sin_half)
            defect = energy - reference
            if defect.valuation() != power or defect.coefficient(power) != lift(coefficient):
                raise IdentityViolation("condensed basis energy mismatch",
                                        {"p": p, "kind": kind, "valuation": defect.valuation()})
            cases += 1
    return cases


def check_closed_forms(orders=range(1, 5), ts=(0.5, 1.0), tol=1e-9):
    """Phi_e, Phi_o: rational closed form against the Legendre-derivative form, plus the nodal basis."""
    cases = 0
    x = np.linspace(0.0, 1.0, 7)
    for p in orders:
        if not lagrange_check(p):
            raise IdentityViolation("Lagrange basis is not nodal", {"p": p})
        for t in ts:
            even, odd = phi_even_odd(p, t, x)
            even_l, odd_l = phi_even_odd_legendre(p, t, x)
            defect = max(np.max(np.abs(even - even_l)), np.max(np.abs(odd - odd_l)))
            if defect > tol:
                raise IdentityViolation("closed forms disagree", {"p": p, "t": t, "defect": float(defect)})
            cases += 1
    return cases


def check_kronecker_stencil(orders=(1, 2), tol=1e-12):
    """Symbols read off assembled 1D/2D matrices equal the Kronecker-sum symbols."""
    cases = 0
    for p in orders:
        for d, example in ((1, "ex1"), (2, "ex2")):
            n = 8
            k = 0.4 * p * n
            gamma = -0.01
            system = assemble(TensorMesh(d, n), p, k, gamma, example)
            for direction in ((None,) if d == 1 else (0.0, np.pi / 7, np.pi / 4)):
                t_h = 0.9 * k / n
                read = bloch_symbol_from_matrix(system, t_h, direction)
                built = symbol_nd(d, p, k / n, t_h, direction=direction, gamma=gamma).entries
                scale = max(1.0, np.abs(built).max())
                defect = float(np.abs(read - built).max() / scale)
                if defect > tol:
                    raise IdentityViolation("Bloch stencil differs from the Kronecker symbol",
                                            {"p": p, "d": d, "direction": direction, "defect": defect})
                cases += 1
    return cases


def check_cofactor(orders=range(1, 5)):
    """(1,1)-cofactor of D1 x M1 + M1 x D1 is nonzero."""
    for p in orders:
        value = kron_cofactor(p)
        if value == QQ(0):
            raise IdentityViolation("cofactor vanishes", {"p": p})
    return len(list(orders))


def check_penalty_consistency(orders=range(1, 4), tol=1e-12):
    """The jump penalty annihilates interpolants of global polynomials of degree <= p."""
    cases = 0
    for d in (1, 2):
        for p in orders:
            mesh = TensorMesh(d, 5)
            jump = penalty_matrix(mesh, p, 1.0)
            norm = abs(jump).max()
            for a in range(p + 1):
                if d == 1:
                    values = interpolate(mesh, p, lambda x, a=a: x ** a)
                else:
                    values = interpolate(mesh, p, lambda x, y, a=a: x ** a * y ** (p - a) + y ** a)
                form = abs(np.vdot(values, jump @ values))
                if form > tol * norm * max(1.0, np.vdot(values, values).real):
                    raise IdentityViolation("penalty does not vanish on a global polynomial",
                                            {"d": d, "p": p, "degree": a, "value": float(form)})
                cases += 1
    return cases


SUITES = {
    "a2_relation": check_a2_relation,
    "combinatorial_identity": check_comb_identity,
    "decay_rates": check_decay_rates,
    "mass_transform": check_mass_transform,
    "condensed_energies": check_condensed_energies,
    "closed_forms": check_closed_forms,
    "kronecker_stencil": check_kronecker_stencil,
    "cofactor": check_cofactor,
    "penalty_consistency": check_penalty_consistency,
}


def run_suites(names=None):
    """Run the named suites (all by default); failures are reported, not raised."""
    results = []
    for name in names or SUITES:
        if name not in SUITES:
            results.append(SuiteResult(name, False, 0, "unknown suite", 0.0))
            continue
        start = time.perf_counter()
        try:
            cases = SUITES[name]()
            result = SuiteResult(name, True, cases, "ok", time.perf_counter() - start)
            logger.info(f"verify {name}: {cases} cases ok ({result.seconds:.2f}s)")
        except CipwaveError as e:
            result = SuiteResult(name, False, 0, str(e), time.perf_counter() - start)
            logger.error(f"verify {name} failed: {e}")
        results.append(result)
    return results
