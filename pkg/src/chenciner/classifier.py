"""Fixed points of the rho-map, invariant circles and the eight-region table.

Regions are the generic phase portraits indexed by the signs of
``(Delta, L0, beta1, beta2)``:

====  ==============================================
id    portrait
====  ==============================================
1     origin stable, one unstable circle
2     origin unstable, no circle
3     origin unstable, one stable circle
4     origin stable, no circle
5     origin stable, one semistable circle (outer side attracts)
6     origin unstable, one semistable circle (inner side attracts)
7     origin stable, unstable inner circle, stable outer circle
8     origin unstable, stable inner circle, unstable outer circle
====  ==============================================
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuadratic, InfeasibleProfile
from .normal_form import ModelEvaluation, NormalFormModel, PointLike, evaluate, rho_map

__all__ = [
    "Stability",
    "OriginMode",
    "ZeroBand",
    "CircleRecord",
    "CircleInventory",
    "SignProfile",
    "REGION_TABLE",
    "solve_circle_equation",
    "circle_multiplier",
    "origin_stability",
    "sign_profile",
    "region_of",
    "classify",
    "classify_point",
    "brute_force_circle_count",
    "default_rho_max",
]


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SEMISTABLE_OUTER_STABLE = "semistable_outer_stable"
    SEMISTABLE_INNER_STABLE = "semistable_inner_stable"


class OriginMode(str, enum.Enum):
    LINEAR = "linear"
    NONLINEAR_BETA2 = "nonlinear_beta2"
    NONLINEAR_L0 = "nonlinear_L0"


@dataclass(frozen=True)
class ZeroBand:
    """Tolerances deciding when a numerically small quantity counts as zero."""

    delta_rel: float = 1e-9
    beta_rel: float = 1e-12
    root_abs: float = 1e-12

    def delta_band(self, ev: ModelEvaluation) -> float:
        return self.delta_rel * max(1.0, ev.beta2 * ev.beta2)

    def beta_band(self, ev: ModelEvaluation) -> float:
        return self.beta_rel * (1.0 + ev.at.norm)


DEFAULT_BAND = ZeroBand()


@dataclass(frozen=True)
class CircleRecord:
    y: float
    stability: Stability
    multiplier: float

    @property
    def radius(self) -> float:
        return math.sqrt(self.y)


@dataclass(frozen=True)
class CircleInventory:
    circles: tuple[CircleRecord, ...]
    origin: Stability
    origin_mode: OriginMode
    region: int
    profile: "SignProfile"

    @property
    def radii(self) -> list[float]:
        return [c.radius for c in self.circles]


@dataclass(frozen=True)
class SignProfile:
    delta_sign: int
    beta1_sign: int
    beta2_sign: int
    L0_sign: int

    def as_symbols(self) -> tuple[str, str, str, str]:
        sym = {-1: "-", 0: "0", 1: "+"}
        return (sym[self.delta_sign], sym[self.L0_sign], sym[self.beta1_sign], sym[self.beta2_sign])


# (Delta, L0, beta1, beta2) -> region.  None in the beta2 slot means "any sign".
REGION_TABLE: dict[tuple[int, int, int, int | None], int] = {
    (1, 1, 1, 1): 2,
    (1, -1, -1, -1): 4,
    (1, 1, -1, None): 1,
    (1, -1, 1, None): 3,
    (1, -1, -1, 1): 7,
    (1, 1, 1, -1): 8,
    (-1, 1, 1, None): 2,
    (-1, -1, -1, None): 4,
    (0, 1, 1, 1): 2,
    (0, -1, -1, -1): 4,
    (0, -1, -1, 1): 5,
    (0, 1, 1, -1): 6,
    (0, 1, 0, 0): 2,
    (0, -1, 0, 0): 4,
    (1, -1, 0, 1): 3,
    (1, -1, 0, -1): 4,
    (1, 1, 0, -1): 1,
    (1, 1, 0, 1): 2,
}


def solve_circle_equation(ev: ModelEvaluation, band: ZeroBand = DEFAULT_BAND) -> tuple[float, float] | None:
    """Real roots ``(y1, y2)`` of ``L2 y^2 + beta2 y + beta1 = 0`` or ``None`` if Delta < 0.

    ``y1 = (sqrt(Delta) - beta2) / (2 L2)`` and ``y2 = -(sqrt(Delta) + beta2) / (2 L2)``;
    the root that would suffer cancellation is recovered from the product
    ``y1 y2 = beta1 / L2`` instead of the textbook formula.
    """
    if abs(ev.l2) <= band.root_abs:
        raise DegenerateQuadratic(f"L2 = {ev.l2!r} is numerically zero")
    if ev.delta < 0:
        return None
    sq = math.sqrt(ev.delta)
    b1, b2, l2 = ev.beta1, ev.beta2, ev.l2
    if b2 >= 0:
        q = -0.5 * (b2 + sq)
        y2 = q / l2
        y1 = b1 / q if q != 0 else 0.0
    else:
        q = 0.5 * (sq - b2)
        y1 = q / l2
        y2 = b1 / q
    return y1, y2


def circle_multiplier(ev: ModelEvaluation, y: float, which: str) -> float:
    """Derivative of the rho-map at ``rho = sqrt(y)`` for the root ``which`` in {'y1', 'y2'}."""
    sq = math.sqrt(max(ev.delta, 0.0))
    if which == "y1":
        return 1.0 + 2.0 * y * sq
    if which == "y2":
        return 1.0 - 2.0 * y * sq
    raise ValueError(f"which must be 'y1' or 'y2', got {which!r}")


def origin_stability(ev: ModelEvaluation, L0: float, band: ZeroBand = DEFAULT_BAND) -> tuple[Stability, OriginMode]:
    tol = band.beta_band(ev)
    if ev.beta1 < -tol:
        return Stability.STABLE, OriginMode.LINEAR
    if ev.beta1 > tol:
        return Stability.UNSTABLE, OriginMode.LINEAR
    if ev.beta2 < -tol:
        return Stability.STABLE, OriginMode.NONLINEAR_BETA2
    if ev.beta2 > tol:
        return Stability.UNSTABLE, OriginMode.NONLINEAR_BETA2
    return (Stability.STABLE if L0 < 0 else Stability.UNSTABLE), OriginMode.NONLINEAR_L0


def _sign(x: float, tol: float) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def sign_profile(ev: ModelEvaluation, L0: float, band: ZeroBand = DEFAULT_BAND) -> SignProfile:
    btol = band.beta_band(ev)
    return SignProfile(
        delta_sign=_sign(ev.delta, band.delta_band(ev)),
        beta1_sign=_sign(ev.beta1, btol),
        beta2_sign=_sign(ev.beta2, btol),
        L0_sign=1 if L0 > 0 else -1,
    )


def region_of(profile: SignProfile) -> int:
    d, l, b1, b2 = profile.delta_sign, profile.L0_sign, profile.beta1_sign, profile.beta2_sign
    region = REGION_TABLE.get((d, l, b1, b2))
    if region is None:
        region = REGION_TABLE.get((d, l, b1, None))
    if region is None:
        raise InfeasibleProfile(
            "sign profile (Delta, L0, beta1, beta2) = ({}, {}, {}, {}) is not realisable".format(
                *profile.as_symbols()
            )
        )
    return region


def classify(ev: ModelEvaluation, L0: float, band: ZeroBand = DEFAULT_BAND) -> CircleInventory:
    profile = sign_profile(ev, L0, band)
    region = region_of(profile)
    origin, mode = origin_stability(ev, L0, band)
    circles: list[CircleRecord] = []

    if profile.delta_sign == 0:
        if region in (5, 6):
            # double root; the exact value uses L2(alpha), not its limit L0
            y = -ev.beta2 / (2.0 * ev.l2)
            kind = Stability.SEMISTABLE_OUTER_STABLE if L0 < 0 else Stability.SEMISTABLE_INNER_STABLE
            circles.append(CircleRecord(y, kind, 1.0))
    elif profile.delta_sign > 0:
        y1, y2 = solve_circle_equation(ev, band)
        if region in (1, 7, 8):
            circles.append(CircleRecord(y1, Stability.UNSTABLE, circle_multiplier(ev, y1, "y1")))
        if region in (3, 7, 8):
            circles.append(CircleRecord(y2, Stability.STABLE, circle_multiplier(ev, y2, "y2")))
        circles = [c for c in circles if c.y > band.root_abs]
        circles.sort(key=lambda c: c.y)

    expected = {1: 1, 2: 0, 3: 1, 4: 0, 5: 1, 6: 1, 7: 2, 8: 2}[region]
    if len(circles) != expected:
        raise InfeasibleProfile(
            f"region {region} expects {expected} circle(s) but the roots give {len(circles)}; "
            "zero bands are inconsistent with the evaluation"
        )
    return CircleInventory(tuple(circles), origin, mode, region, profile)


def classify_point(m: NormalFormModel, p: PointLike, band: ZeroBand = DEFAULT_BAND) -> CircleInventory:
    return classify(evaluate(m, p), float(m.L0), band)


def default_rho_max(ev: ModelEvaluation, L0: float) -> float:
    quarter = max(ev.delta, 0.0) ** 0.25
    return 2.0 * max(1.0, math.sqrt(abs(ev.beta2 / L0)) + quarter)


def brute_force_circle_count(ev: ModelEvaluation, L0: float, n: int = 10_000, rho_max: float | None = None) -> int:
    """Count sign changes of ``rho_map(rho) - rho`` on a uniform grid of ``(0, rho_max]``.

    This ignores the circle formulas entirely and serves as an oracle for
    :func:`classify`.
    """
    if rho_max is None:
        rho_max = default_rho_max(ev, L0)
    rho = np.linspace(rho_max / n, rho_max, n)
    g = rho_map(ev, rho) - rho
    s = np.sign(g)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
