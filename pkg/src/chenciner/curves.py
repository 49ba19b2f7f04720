"""Bifurcation curves B1 (beta1 = 0), B2 (beta2 = 0) and C (Delta = 0).

Under the degeneracy a10*b01 = a01*b10 all three curves are graphs
``alpha2 = k1 alpha1 + k2 alpha1^2 + k3 alpha1^3 + k4 alpha1^4 + ...`` sharing
the slope ``k1 = c1 = -a10/a01``.  Two independent routes are provided:

* closed-form coefficient formulas (:func:`expand_B1`, :func:`expand_B2`,
  :func:`expand_C`), and
* generic order-by-order series composition on an arbitrary polynomial
  (:func:`implicit_series`), applied to beta1, beta2 or the full Delta
  polynomial.

With :class:`fractions.Fraction` coefficients both routes are exact, so
identities such as ``m2 == c2`` can be checked with ``==``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from scipy.optimize import brentq

from .errors import IftViolation, NotDegenerate, OutOfValidityRadius
from .normal_form import (
    Coefficient,
    Degeneracy,
    NormalFormModel,
    ParameterPoint,
    TaylorSeries2D,
    check_degeneracy,
)

__all__ = [
    "CurveKind",
    "CurveExpansion",
    "CurveTrace",
    "ExpansionCheck",
    "expand_B1",
    "expand_B2",
    "expand_C",
    "expand",
    "implicit_series",
    "series_expansion",
    "target_function",
    "trace_curve",
    "verify_expansion",
    "coefficient_table",
]


class CurveKind(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    C = "C"


@dataclass(frozen=True)
class CurveExpansion:
    kind: CurveKind
    coeffs: tuple[Coefficient, Coefficient, Coefficient, Coefficient]
    gamma: Coefficient | None = None
    sigma1: Coefficient | None = None
    sigma2: Coefficient | None = None

    def value(self, alpha1: float, order: int = 4) -> float:
        return sum(float(k) * alpha1 ** (n + 1) for n, k in enumerate(self.coeffs[:order]))


def _require_nonzero(value: Coefficient, name: str, tol: float) -> None:
    if abs(float(value)) <= tol:
        raise IftViolation(f"{name} = {value} vanishes; the implicit function theorem does not apply")


def _require_degenerate(m: NormalFormModel, tol: float) -> None:
    if check_degeneracy(m, tol) is not Degeneracy.DEGENERATE:
        raise NotDegenerate(float(m.determinant))


def _ift_coefficients(s: TaylorSeries2D, k1: Coefficient) -> tuple:
    """Closed-form k2, k3, k4 (and sigma1, sigma2) for ``s = 0`` given the slope ``k1``."""
    a = s.coeff
    lead = a(0, 1)
    k2 = -(a(2, 0) + k1**2 * a(0, 2) + k1 * a(1, 1)) / lead
    k3 = -(
        a(3, 0) + k1**2 * a(1, 2) + k1**3 * a(0, 3) + k1 * a(2, 1) + k2 * a(1, 1) + 2 * k1 * k2 * a(0, 2)
    ) / lead
    sigma1 = a(3, 1) + 2 * k2 * a(1, 2) + 2 * k3 * a(0, 2)
    sigma2 = a(0, 2) * k2**2 + a(2, 1) * k2 + a(4, 0) + k3 * a(1, 1)
    k4 = -(
        a(0, 4) * k1**4 + a(1, 3) * k1**3 + (a(2, 2) + 3 * k2 * a(0, 3)) * k1**2 + sigma1 * k1 + sigma2
    ) / lead
    return k2, k3, k4, sigma1, sigma2


def expand_B1(m: NormalFormModel, tol: float = 1e-12) -> CurveExpansion:
    _require_nonzero(m.a01, "a01", tol)
    c1 = -m.a10 / m.a01
    c2, c3, c4, sigma1, sigma2 = _ift_coefficients(m.beta1, c1)
    return CurveExpansion(CurveKind.B1, (c1, c2, c3, c4), sigma1=sigma1, sigma2=sigma2)


def expand_B2(m: NormalFormModel, tol: float = 1e-12) -> CurveExpansion:
    _require_nonzero(m.b01, "b01", tol)
    _require_degenerate(m, tol)
    _require_nonzero(m.a01, "a01", tol)
    c1 = -m.a10 / m.a01
    d2, d3, d4, sigma1, sigma2 = _ift_coefficients(m.beta2, c1)
    return CurveExpansion(CurveKind.B2, (c1, d2, d3, d4), sigma1=sigma1, sigma2=sigma2)


def expand_C(m: NormalFormModel, tol: float = 1e-12) -> CurveExpansion:
    _require_degenerate(m, tol)
    _require_nonzero(m.a01, "a01", tol)
    _require_nonzero(m.b01, "b01", tol)
    b1 = expand_B1(m, tol)
    c1, c2, c3, c4 = b1.coeffs
    b = m.beta2.coeff
    gamma = b(0, 2) * c1**2 + b(1, 1) * c1 + b(2, 0) + c2 * b(0, 1)
    m4 = c4 + gamma**2 / (4 * m.L0 * m.a01)
    return CurveExpansion(CurveKind.C, (c1, c2, c3, m4), gamma=gamma)


def expand(m: NormalFormModel, kind: CurveKind | str, tol: float = 1e-12) -> CurveExpansion:
    kind = CurveKind(kind)
    return {CurveKind.B1: expand_B1, CurveKind.B2: expand_B2, CurveKind.C: expand_C}[kind](m, tol)


def _poly_mul(p: list, q: list, order: int) -> list:
    out = [0] * (order + 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j in range(0, order + 1 - i):
            if j < len(q) and q[j] != 0:
                out[i + j] += pi * q[j]
    return out


def _compose_coefficient(f: TaylorSeries2D, curve: list, n: int) -> Coefficient:
    """Coefficient of ``t^n`` in ``f(t, curve(t))`` with ``curve = sum curve[k] t^k``."""
    powers = [[1] + [0] * n]
    max_j = max((j for (_, j) in f.coefficients), default=0)
    for _ in range(max_j):
        powers.append(_poly_mul(powers[-1], curve, n))
    total = 0
    for (i, j), c in f:
        if i <= n:
            total += c * powers[j][n - i]
    return total


def implicit_series(f: TaylorSeries2D, order: int = 4) -> list[Coefficient]:
    """Taylor coefficients ``[k1, ..., k_order]`` of the curve ``f(alpha1, alpha2(alpha1)) = 0``.

    Solves order by order: the ``t^n`` coefficient of ``f(t, sum k_i t^i)`` is
    affine in ``k_n`` with slope ``f_01``.  Needs ``f(0, 0) = 0`` and
    ``f_01 != 0``.
    """
    lead = f.coeff(0, 1)
    if lead == 0:
        raise IftViolation("d f / d alpha2 vanishes at the origin")
    if f.coeff(0, 0) != 0:
        raise ValueError("the curve must pass through the origin")
    curve = [0] * (order + 1)
    for n in range(1, order + 1):
        residual = _compose_coefficient(f, curve, n)
        curve[n] = -residual / lead
    return curve[1:]


def series_expansion(m: NormalFormModel, kind: CurveKind | str, order: int = 4) -> list[Coefficient]:
    """Curve coefficients by direct series composition (independent of the closed forms)."""
    kind = CurveKind(kind)
    if kind is CurveKind.B1:
        f = m.beta1
    elif kind is CurveKind.B2:
        f = m.beta2
    else:
        f = m.delta_series()
    return implicit_series(f.truncated(order), order)


def target_function(m: NormalFormModel, kind: CurveKind | str):
    """Scalar function of ``(alpha1, alpha2)`` whose zero set is the curve."""
    kind = CurveKind(kind)
    if kind is CurveKind.B1:
        return lambda a1, a2: float(m.beta1(a1, a2))
    if kind is CurveKind.B2:
        return lambda a1, a2: float(m.beta2(a1, a2))

    def delta(a1, a2):
        b2 = m.beta2(a1, a2)
        return float(b2 * b2 - 4.0 * m.beta1(a1, a2) * m.l2(a1, a2))

    return delta


@dataclass
class CurveTrace:
    kind: CurveKind
    points: list[ParameterPoint] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    @property
    def alpha1(self) -> list[float]:
        return [p.alpha1 for p in self.points]

    @property
    def alpha2(self) -> list[float]:
        return [p.alpha2 for p in self.points]

    def at(self, alpha1: float) -> float | None:
        for p in self.points:
            if p.alpha1 == alpha1:
                return p.alpha2
        return None


def trace_curve(
    m: NormalFormModel,
    kind: CurveKind | str,
    alpha1_grid: Sequence[float],
    trace_tol: float = 1e-12,
    expansion: CurveExpansion | None = None,
) -> CurveTrace:
    """Solve the curve equation for ``alpha2`` at every ``alpha1`` of the grid.

    Each solve is a Brent bracket search around the order-4 Taylor
    prediction with half-width ``10 alpha1^2 + 1e-8``; if that bracket holds
    no sign change it is widened geometrically up to the vertical chord of
    the validity disk before the point is given up.
    """
    kind = CurveKind(kind)
    eps = m.epsilon
    if expansion is None:
        expansion = expand(m, kind)
    f = target_function(m, kind)
    trace = CurveTrace(kind)
    for a1 in sorted(float(x) for x in alpha1_grid):
        if abs(a1) >= eps:
            raise OutOfValidityRadius(f"alpha1 = {a1} lies outside the validity disk")
        chord = math.sqrt(eps * eps - a1 * a1)
        pred = expansion.value(a1)
        width = 10.0 * a1 * a1 + 1e-8

        def g(a2, a1=a1):
            return f(a1, a2)

        if g(pred) == 0.0:
            root = pred
        else:
            root = None
            while True:
                lo, hi = max(pred - width, -chord), min(pred + width, chord)
                if lo < hi and g(lo) * g(hi) < 0:
                    root = brentq(g, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
                    break
                if lo <= -chord and hi >= chord:
                    break
                width *= 4.0
            if root is None:
                trace.failures.append((a1, "no sign change inside the validity disk"))
                continue
        res = abs(g(root))
        if res > trace_tol:
            trace.failures.append((a1, f"residual {res:.3e} above tolerance"))
            continue
        if math.hypot(a1, root) >= eps:
            trace.failures.append((a1, "root lies outside the validity disk"))
            continue
        trace.points.append(ParameterPoint(a1, root))
        trace.residuals.append(res)
    return trace


@dataclass(frozen=True)
class ExpansionCheck:
    max_residual: float
    bound: float
    passed: bool


def verify_expansion(
    m: NormalFormModel,
    kind: CurveKind | str,
    trace: CurveTrace,
    order: int = 4,
    resid_const: float = 100.0,
) -> ExpansionCheck:
    """Compare a numeric trace with the truncated Taylor curve.

    Passes iff ``max |alpha2_traced - alpha2_taylor| <= resid_const * max |alpha1|^5``.
    """
    if not trace.points:
        raise ValueError("cannot verify an empty trace")
    exp = expand(m, kind)
    worst = max(abs(p.alpha2 - exp.value(p.alpha1, order)) for p in trace.points)
    bound = resid_const * max(abs(p.alpha1) for p in trace.points) ** 5
    return ExpansionCheck(worst, bound, worst <= bound)


def coefficient_table(m: NormalFormModel, tol: float = 1e-12) -> dict[str, Coefficient]:
    """All expansion coefficients reported by the ``curves`` command.

    ``m2, m3, m4`` come from series composition on the Delta polynomial;
    ``m4_formula`` is the closed form ``c4 + gamma^2 / (4 L0 a01)``.
    """
    b1 = expand_B1(m, tol)
    b2 = expand_B2(m, tol)
    c = expand_C(m, tol)
    c1, c2, c3, c4 = b1.coeffs
    _, d2, d3, d4 = b2.coeffs
    _, m2, m3, m4 = series_expansion(m, CurveKind.C)
    return {
        "c1": c1, "c2": c2, "c3": c3, "c4": c4,
        "d2": d2, "d3": d3, "d4": d4,
        "m2": m2, "m3": m3, "m4": m4, "m4_formula": c.coeffs[3],
        "gamma": c.gamma, "sigma1": b1.sigma1, "sigma2": b1.sigma2,
        "m4_minus_c4": m4 - c4,
    }
