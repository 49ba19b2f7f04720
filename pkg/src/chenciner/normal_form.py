"""Truncated Chenciner normal form.

The radial map is

    rho -> rho * (1 + beta1(alpha) + beta2(alpha) rho^2 + L2(alpha) rho^4)

and the angular map is a rigid rotation by ``theta0``.  The parameter
functions are sparse bivariate polynomials in ``alpha = (alpha1, alpha2)``.
Coefficients may be ``fractions.Fraction`` (exact mode) or floats; every
numerical evaluation is carried out in floating point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping, Union

from .errors import ModelError, NegativeRadius, OutOfValidityRadius, SignInversion

__all__ = [
    "ParameterPoint",
    "TaylorSeries2D",
    "NormalFormModel",
    "ModelEvaluation",
    "Degeneracy",
    "as_point",
    "eval_series",
    "evaluate",
    "check_degeneracy",
    "rho_map",
    "rho_step",
    "phi_step",
]

TWO_PI = 2.0 * math.pi

Coefficient = Union[Fraction, float, int]


@dataclass(frozen=True)
class ParameterPoint:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha1) and math.isfinite(self.alpha2)):
            raise ValueError(f"parameter point must be finite, got ({self.alpha1}, {self.alpha2})")

    @property
    def norm(self) -> float:
        return math.hypot(self.alpha1, self.alpha2)

    def __iter__(self):
        yield self.alpha1
        yield self.alpha2


PointLike = Union[ParameterPoint, "tuple[float, float]"]


def as_point(p: PointLike) -> ParameterPoint:
    if isinstance(p, ParameterPoint):
        return p
    a1, a2 = p
    return ParameterPoint(float(a1), float(a2))


class TaylorSeries2D:
    """Sparse bivariate polynomial ``sum c_ij alpha1^i alpha2^j``.

    Zero coefficients are dropped on construction, so two series compare
    equal iff they hold the same nonzero terms.  Supports ``+``, ``-``,
    ``*`` (polynomial product) and scaling, which is all the curve analysis
    needs to assemble ``Delta = beta2^2 - 4 beta1 L2`` symbolically.
    """

    __slots__ = ("_coeffs", "_float_terms")

    def __init__(self, coefficients: Mapping[tuple[int, int], Coefficient] | None = None):
        coeffs: dict[tuple[int, int], Coefficient] = {}
        for key, value in (coefficients or {}).items():
            i, j = int(key[0]), int(key[1])
            if i < 0 or j < 0:
                raise ModelError(f"negative exponent pair ({i}, {j})")
            if not isinstance(value, Real):
                raise ModelError(f"coefficient at ({i}, {j}) is not a real number: {value!r}")
            if isinstance(value, float) and not math.isfinite(value):
                raise ModelError(f"coefficient at ({i}, {j}) is not finite")
            if isinstance(value, int):
                value = Fraction(value)
            if value != 0:
                coeffs[(i, j)] = coeffs.get((i, j), 0) + value
                if coeffs[(i, j)] == 0:
                    del coeffs[(i, j)]
        self._coeffs = dict(sorted(coeffs.items()))
        self._float_terms = tuple((i, j, float(c)) for (i, j), c in self._coeffs.items())

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int, Coefficient]]) -> "TaylorSeries2D":
        acc: dict[tuple[int, int], Coefficient] = {}
        for i, j, c in terms:
            acc[(i, j)] = acc.get((i, j), 0) + c
        return cls(acc)

    @property
    def coefficients(self) -> dict[tuple[int, int], Coefficient]:
        return dict(self._coeffs)

    @property
    def max_order(self) -> int:
        return max((i + j for i, j in self._coeffs), default=0)

    def coeff(self, i: int, j: int) -> Coefficient:
        return self._coeffs.get((i, j), 0)

    def __getitem__(self, key: tuple[int, int]) -> Coefficient:
        return self._coeffs.get(key, 0)

    def __call__(self, alpha1, alpha2):
        # Works for scalars and numpy arrays alike.
        total = 0.0
        for i, j, c in self._float_terms:
            total = total + c * alpha1**i * alpha2**j
        return total

    def __iter__(self):
        return iter(self._coeffs.items())

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TaylorSeries2D):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"TaylorSeries2D({self._coeffs!r})"

    def __add__(self, other: "TaylorSeries2D") -> "TaylorSeries2D":
        acc = dict(self._coeffs)
        for k, v in other._coeffs.items():
            acc[k] = acc.get(k, 0) + v
        return TaylorSeries2D(acc)

    def __neg__(self) -> "TaylorSeries2D":
        return TaylorSeries2D({k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other: "TaylorSeries2D") -> "TaylorSeries2D":
        return self + (-other)

    def scale(self, factor: Coefficient) -> "TaylorSeries2D":
        return TaylorSeries2D({k: factor * v for k, v in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Real):
            return self.scale(other)
        acc: dict[tuple[int, int], Coefficient] = {}
        for (i1, j1), c1 in self._coeffs.items():
            for (i2, j2), c2 in other._coeffs.items():
                key = (i1 + i2, j1 + j2)
                acc[key] = acc.get(key, 0) + c1 * c2
        return TaylorSeries2D(acc)

    __rmul__ = __mul__

    def truncated(self, order: int) -> "TaylorSeries2D":
        return TaylorSeries2D({(i, j): c for (i, j), c in self._coeffs.items() if i + j <= order})

    def without_constant(self) -> "TaylorSeries2D":
        return TaylorSeries2D({k: v for k, v in self._coeffs.items() if k != (0, 0)})

    def is_exact(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for c in self._coeffs.values())


def eval_series(s: TaylorSeries2D, p: PointLike) -> float:
    p = as_point(p)
    return float(s(p.alpha1, p.alpha2))


@dataclass(frozen=True)
class NormalFormModel:
    """Taylor data of beta1, beta2, L2 together with L0, theta0 and the validity radius.

    ``l2`` always carries ``L0`` as its constant term; passing a series
    without a constant is allowed and ``L0`` is inserted.
    """

    beta1: TaylorSeries2D
    beta2: TaylorSeries2D
    l2: TaylorSeries2D
    L0: Coefficient
    theta0: Coefficient = 0.1
    validity_radius: Coefficient = 0.1

    def __post_init__(self):
        if isinstance(self.L0, int):
            object.__setattr__(self, "L0", Fraction(self.L0))
        if self.L0 == 0:
            raise ModelError("L0 must be nonzero (Chenciner condition)")
        if not (0 < self.theta0 < math.pi):
            raise ModelError(f"theta0 must lie in (0, pi), got {self.theta0}")
        if not self.validity_radius > 0:
            raise ModelError(f"validity_radius must be positive, got {self.validity_radius}")
        for name in ("beta1", "beta2"):
            if getattr(self, name).coeff(0, 0) != 0:
                raise ModelError(f"{name} must vanish at alpha = 0 (constant term given)")
        const = self.l2.coeff(0, 0)
        if const == 0:
            object.__setattr__(self, "l2", self.l2 + TaylorSeries2D({(0, 0): self.L0}))
        elif const != self.L0:
            raise ModelError(f"constant term of l2 ({const}) differs from L0 ({self.L0})")

    # Shorthand accessors for the linear Taylor coefficients.
    @property
    def a10(self) -> Coefficient:
        return self.beta1.coeff(1, 0)

    @property
    def a01(self) -> Coefficient:
        return self.beta1.coeff(0, 1)

    @property
    def b10(self) -> Coefficient:
        return self.beta2.coeff(1, 0)

    @property
    def b01(self) -> Coefficient:
        return self.beta2.coeff(0, 1)

    @property
    def determinant(self) -> Coefficient:
        return self.a10 * self.b01 - self.a01 * self.b10

    @property
    def epsilon(self) -> float:
        return float(self.validity_radius)

    def is_exact(self) -> bool:
        scalars = (self.L0,)
        return (
            self.beta1.is_exact()
            and self.beta2.is_exact()
            and self.l2.is_exact()
            and all(isinstance(c, (Fraction, int)) for c in scalars)
        )

    def delta_series(self) -> TaylorSeries2D:
        """Delta = beta2^2 - 4 beta1 L2 as an exact polynomial."""
        return self.beta2 * self.beta2 - (self.beta1 * self.l2).scale(4)

    def with_radius(self, radius: Coefficient) -> "NormalFormModel":
        return NormalFormModel(self.beta1, self.beta2, self.l2, self.L0, self.theta0, radius)


@dataclass(frozen=True)
class ModelEvaluation:
    beta1: float
    beta2: float
    l2: float
    at: ParameterPoint = field(default_factory=lambda: ParameterPoint(0.0, 0.0))
    delta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "delta", self.beta2 * self.beta2 - 4.0 * self.beta1 * self.l2)


def evaluate(m: NormalFormModel, p: PointLike) -> ModelEvaluation:
    p = as_point(p)
    if p.norm >= m.epsilon:
        raise OutOfValidityRadius(f"|alpha| = {p.norm:.6g} is not below epsilon = {m.epsilon:.6g}")
    b1 = float(m.beta1(p.alpha1, p.alpha2))
    b2 = float(m.beta2(p.alpha1, p.alpha2))
    l2 = float(m.l2(p.alpha1, p.alpha2))
    if l2 == 0 or (l2 > 0) != (m.L0 > 0):
        raise SignInversion(
            f"L2(alpha) = {l2:.6g} has lost the sign of L0 = {float(m.L0):.6g}; epsilon is too large"
        )
    return ModelEvaluation(b1, b2, l2, p)


class Degeneracy(enum.Enum):
    DEGENERATE = "degenerate"
    NON_DEGENERATE = "non_degenerate"


def check_degeneracy(m: NormalFormModel, tol: float = 1e-12) -> Degeneracy:
    left = m.a10 * m.b01
    right = m.a01 * m.b10
    scale = max(1.0, abs(float(left)), abs(float(right)))
    if abs(float(left - right)) <= tol * scale:
        return Degeneracy.DEGENERATE
    return Degeneracy.NON_DEGENERATE


def rho_map(ev: ModelEvaluation, rho):
    """Raw radial map, no sign check.  Accepts scalars or arrays."""
    r2 = rho * rho
    return rho * (1.0 + ev.beta1 + ev.beta2 * r2 + ev.l2 * r2 * r2)


def rho_step(m: NormalFormModel, p: PointLike, rho: float) -> float:
    if rho < 0:
        raise ValueError(f"rho must be non-negative, got {rho}")
    ev = evaluate(m, p)
    out = rho_map(ev, rho)
    if out < 0:
        raise NegativeRadius(f"rho-map sends {rho!r} to {out!r}")
    return out


def phi_step(m: NormalFormModel, phi: float) -> float:
    out = math.fmod(phi + float(m.theta0), TWO_PI)
    if out < 0:
        out += TWO_PI
    if out >= TWO_PI:
        out -= TWO_PI
    return out
