"""
Error hierarchy for cipwave.

Every failure raised by the library derives from CipwaveError and carries a
``details`` dict with the parameters needed to reproduce it. Input problems
additionally derive from ValueError; the command line maps them to exit
code 2 and everything else to exit code 3.
"""


class CipwaveError(RuntimeError):
    """Base class of every error raised by cipwave."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = dict(details or {})

    def __str__(self):
        base = super().__str__()
        if not self.details:
            return base
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{base} ({extra})"


class DegenerateInput(CipwaveError, ValueError):
    """Division by zero, non-positive samples, malformed ranges and the like."""


class UnsupportedOrder(CipwaveError, ValueError):
    """Polynomial order outside the configured range."""


class ExpansionFailure(CipwaveError):
    """Valuation hypotheses of the implicit series solve do not hold."""


class EigenvalueCollision(CipwaveError):
    """t sits on (or too close to) a discrete Dirichlet eigenvalue of one element."""


class RootNotFound(CipwaveError):
    """No sign change of the dispersion function inside the admissible bracket."""


class HermitianityLoss(CipwaveError):
    """Imaginary part of a Hermitian determinant exceeds the tolerance."""


class SolverFailure(CipwaveError):
    """Sparse or banded factorization broke down or missed the residual target."""


class ResourceExhausted(CipwaveError):
    """A mesh ladder ran out of refinement levels."""


class IdentityViolation(CipwaveError):
    """Two evaluations of a proven identity disagree."""


INPUT_ERRORS = (DegenerateInput, UnsupportedOrder)
