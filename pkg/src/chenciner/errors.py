"""Exception hierarchy shared by all analysis modules."""


class ChencinerError(Exception):
    """Base class for every error raised by the package."""


class ModelError(ChencinerError, ValueError):
    """A normal-form model violates one of its construction invariants."""


class OutOfValidityRadius(ChencinerError):
    """A parameter point lies outside the model's validity disk."""


class SignInversion(ChencinerError):
    """L2 changed sign inside the validity disk (radius chosen too large)."""


class NegativeRadius(ChencinerError):
    """The rho-map produced a negative radius: the orbit left the neighbourhood."""


class DegenerateQuadratic(ChencinerError):
    """The circle equation has a vanishing leading coefficient."""


class InfeasibleProfile(ChencinerError):
    """A sign profile cannot occur for Delta = beta2^2 - 4 beta1 L2."""


class IftViolation(ChencinerError):
    """The implicit-function hypothesis (a01 != 0 or b01 != 0) fails."""


class NotDegenerate(ChencinerError):
    """The model does not satisfy a10*b01 - a01*b10 = 0."""

    def __init__(self, determinant: float):
        super().__init__(f"model is not degenerate: a10*b01 - a01*b10 = {determinant!r}")
        self.determinant = determinant


class InvalidStart(ChencinerError, ValueError):
    """An orbit was requested from a negative starting radius."""


class NotOnCurve(ChencinerError):
    """The parameter point is not on Delta = 0 (or carries no semistable circle)."""


class PreconditionViolated(ChencinerError):
    """A documented precondition of a numerical probe does not hold."""


class DiagramError(ChencinerError, ValueError):
    """Invalid diagram request (window outside the disk, resolution too small)."""
