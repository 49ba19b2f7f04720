"""Orbit iteration of the truncated map and empirical circle detection."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classifier import DEFAULT_BAND, ZeroBand
from .errors import InvalidStart, NotOnCurve, PreconditionViolated
from .normal_form import TWO_PI, ModelEvaluation, NormalFormModel, PointLike, evaluate

__all__ = [
    "VerdictKind",
    "Verdict",
    "SimulationConfig",
    "OrbitTrace",
    "iterate_orbit",
    "SemistabilityReport",
    "semistability_probe",
    "Monotonicity",
    "MonotonicityResult",
    "monotonicity_check",
]


class VerdictKind(str, enum.Enum):
    CONVERGED_TO_ORIGIN = "ConvergedToOrigin"
    CONVERGED_TO_CIRCLE = "ConvergedToCircle"
    ESCAPED = "Escaped"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    radius: float | None = None

    def __str__(self) -> str:
        if self.kind is VerdictKind.CONVERGED_TO_CIRCLE:
            return f"{self.kind.value}({self.radius:.10g})"
        return self.kind.value


@dataclass(frozen=True)
class SimulationConfig:
    max_steps: int = 1_000_000
    convergence_tol: float = 1e-6
    escape_radius: float = 1.0
    window: int = 100

    def __post_init__(self):
        if self.max_steps <= 0 or self.window <= 2:
            raise ValueError("max_steps must be positive and window at least 3")
        if self.convergence_tol <= 0 or self.escape_radius <= 0:
            raise ValueError("convergence_tol and escape_radius must be positive")


@dataclass
class OrbitTrace:
    rho: np.ndarray
    phi: np.ndarray
    verdict: Verdict
    steps_used: int

    @property
    def states(self) -> list[tuple[float, float]]:
        return list(zip(self.rho.tolist(), self.phi.tolist()))

    @property
    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        return self.rho * np.cos(self.phi), self.rho * np.sin(self.phi)


def _judge(tail: list[float], tol: float) -> Verdict | None:
    hi, lo = max(tail), min(tail)
    if hi <= tol and tail[-1] <= tail[-2]:
        return Verdict(VerdictKind.CONVERGED_TO_ORIGIN)
    r = tail[-1]
    if r <= tol:
        return None
    mean = math.fsum(tail) / len(tail)
    if max(hi - mean, mean - lo) > tol:
        return None
    # Require the geometric tail of the remaining steps to be below tol as
    # well; a small spread alone is fooled by multipliers close to 1.
    d1 = tail[-1] - tail[-2]
    d0 = tail[-2] - tail[-3]
    if d1 == 0.0:
        remaining = 0.0
    elif d0 == 0.0:
        return None
    else:
        lam = d1 / d0
        if lam < 0.0:
            remaining = abs(d1)
        elif lam < 1.0:
            remaining = abs(d1) * lam / (1.0 - lam)
        else:
            return None
    if remaining <= tol:
        return Verdict(VerdictKind.CONVERGED_TO_CIRCLE, r)
    return None


def _phases(phi0: float, theta0: float, count: int) -> np.ndarray:
    return np.mod(phi0 + theta0 * np.arange(count), TWO_PI)


def iterate_orbit(
    m: NormalFormModel,
    p: PointLike,
    rho0: float,
    phi0: float = 0.0,
    cfg: SimulationConfig | None = None,
) -> OrbitTrace:
    """Iterate the truncated map from ``(rho0, phi0)`` until a verdict is reached.

    The trailing ``cfg.window`` radii are inspected every ``window`` steps.
    A negative image radius ends the orbit as ``Escaped`` without recording
    the negative value.
    """
    cfg = cfg or SimulationConfig()
    if not rho0 >= 0:
        raise InvalidStart(f"rho0 must be non-negative, got {rho0}")
    ev = evaluate(m, p)
    b1, b2, l2 = ev.beta1, ev.beta2, ev.l2
    tol, window, escape = cfg.convergence_tol, cfg.window, cfg.escape_radius

    rhos = [float(rho0)]
    append = rhos.append
    rho = float(rho0)
    verdict = None
    if rho > escape:
        verdict = Verdict(VerdictKind.ESCAPED)
    n = 0
    while verdict is None and n < cfg.max_steps:
        n += 1
        r2 = rho * rho
        nxt = rho * (1.0 + b1 + b2 * r2 + l2 * r2 * r2)
        if nxt < 0.0:
            verdict = Verdict(VerdictKind.ESCAPED)
            n -= 1
            break
        append(nxt)
        rho = nxt
        if rho > escape:
            verdict = Verdict(VerdictKind.ESCAPED)
        elif n % window == 0:
            verdict = _judge(rhos[-window:], tol)
    if verdict is None:
        verdict = Verdict(VerdictKind.UNDECIDED)
    rho_arr = np.asarray(rhos)
    return OrbitTrace(rho_arr, _phases(float(phi0), float(m.theta0), len(rho_arr)), verdict, n)


def _radial_orbit(ev: ModelEvaluation, rho0: float, steps: int, escape: float = math.inf) -> np.ndarray:
    out = [rho0]
    rho = rho0
    b1, b2, l2 = ev.beta1, ev.beta2, ev.l2
    for _ in range(steps):
        r2 = rho * rho
        rho = rho * (1.0 + b1 + b2 * r2 + l2 * r2 * r2)
        if rho < 0.0:
            break
        out.append(rho)
        if rho > escape:
            break
    return np.asarray(out)


@dataclass
class SemistabilityReport:
    radius: float
    outer_converges: bool
    inner_departs: bool
    outer_departs: bool
    inner_converges: bool
    outer: np.ndarray = field(repr=False)
    inner: np.ndarray = field(repr=False)


def _approaches(dist: np.ndarray, transient: int) -> bool:
    tail = dist[transient:]
    return bool(len(tail) > 1 and np.all(np.diff(tail) <= 0.0) and tail[-1] < dist[0])


def _recedes(rho: np.ndarray, outward: bool) -> bool:
    steps = np.diff(rho)
    if len(steps) == 0:
        return False
    return bool(np.all(steps > 0.0) if outward else np.all(steps < 0.0))


def semistability_probe(
    m: NormalFormModel,
    p_on_C: PointLike,
    cfg: SimulationConfig | None = None,
    steps: int = 20_000,
    transient: int = 10,
    band: ZeroBand = DEFAULT_BAND,
) -> SemistabilityReport:
    """Launch orbits at 1.1 and 0.9 times the radius of the Delta = 0 circle.

    For ``L0 < 0`` the expected outcome is ``outer_converges`` and
    ``inner_departs``; for ``L0 > 0`` it is ``outer_departs`` and
    ``inner_converges``.
    """
    cfg = cfg or SimulationConfig()
    ev = evaluate(m, p_on_C)
    if abs(ev.delta) > band.delta_band(ev):
        raise NotOnCurve(f"|Delta| = {abs(ev.delta):.3e} exceeds the zero band")
    if float(m.L0) * ev.beta2 >= 0:
        raise NotOnCurve("no semistable circle: L0 * beta2 must be negative")
    y = -ev.beta2 / (2.0 * ev.l2)
    r = math.sqrt(y)
    outer = _radial_orbit(ev, 1.1 * r, steps, cfg.escape_radius)
    inner = _radial_orbit(ev, 0.9 * r, steps, cfg.escape_radius)
    d_out = np.abs(outer - r)
    d_in = np.abs(inner - r)
    return SemistabilityReport(
        radius=r,
        outer_converges=_approaches(d_out, transient),
        inner_departs=_recedes(inner, outward=False),
        outer_departs=_recedes(outer, outward=True),
        inner_converges=_approaches(d_in, transient),
        outer=outer,
        inner=inner,
    )


class Monotonicity(str, enum.Enum):
    STRICTLY_DECREASING = "strictly_decreasing"
    STRICTLY_INCREASING = "strictly_increasing"
    VIOLATED = "violated"


@dataclass
class MonotonicityResult:
    verdict: Monotonicity
    index: int | None
    s_decreasing: bool
    rho: np.ndarray = field(repr=False)


def monotonicity_check(
    m: NormalFormModel,
    p_with_beta1_zero: PointLike,
    rho0: float,
    n: int = 1000,
    band: ZeroBand = DEFAULT_BAND,
) -> MonotonicityResult:
    """Iterate ``rho <- rho + rho^3 (beta2 + L2 rho^2)`` on the curve beta1 = 0.

    The orbit must be strictly decreasing when beta2 < 0 and strictly
    increasing when beta2 > 0.  When beta2 and L0 have opposite signs the
    start must lie below ``sqrt(-beta2 / L2)``.
    """
    ev = evaluate(m, p_with_beta1_zero)
    btol = band.beta_band(ev)
    if abs(ev.beta1) > btol:
        raise PreconditionViolated(f"beta1 = {ev.beta1:.3e} is not zero within the band")
    if abs(ev.beta2) <= btol:
        raise PreconditionViolated("beta2 vanishes; the nonhyperbolic test needs beta2 != 0")
    if not rho0 > 0:
        raise PreconditionViolated("rho0 must be positive")
    b2, l2 = ev.beta2, ev.l2
    if b2 * l2 < 0:
        bound = math.sqrt(-b2 / l2)
        if rho0 >= bound:
            raise PreconditionViolated(f"rho0 = {rho0} must lie below sqrt(-beta2/L2) = {bound:.6g}")

    decreasing = b2 < 0
    rho = np.empty(n + 1)
    rho[0] = rho0
    # a divergent orbit overflows; the violation is reported below
    with np.errstate(all="ignore"):
        for k in range(n):
            r = rho[k]
            rho[k + 1] = r + r * r * r * (b2 + l2 * r * r)
        s = b2 + l2 * rho * rho
        steps = np.diff(rho)
        s_decreasing = bool(np.all(np.diff(s) < 0.0))
    bad = (steps >= 0.0) if decreasing else (steps <= 0.0)
    bad |= ~(rho[1:] > 0.0) | ~np.isfinite(rho[1:])
    if bad.any():
        idx = int(np.argmax(bad))
        return MonotonicityResult(Monotonicity.VIOLATED, idx, s_decreasing, rho)
    verdict = Monotonicity.STRICTLY_DECREASING if decreasing else Monotonicity.STRICTLY_INCREASING
    return MonotonicityResult(verdict, None, s_decreasing, rho)
