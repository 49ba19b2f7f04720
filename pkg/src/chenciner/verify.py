"""Random degenerate models and the property suite behind ``chenciner verify``."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .classifier import DEFAULT_BAND, Stability, ZeroBand, brute_force_circle_count, classify
from .curves import CurveKind, expand_B1, expand_B2, expand_C, series_expansion, trace_curve
from .errors import ChencinerError
from .normal_form import NormalFormModel, TaylorSeries2D, evaluate, rho_map
from .simulator import Monotonicity, monotonicity_check, semistability_probe

__all__ = [
    "random_coefficient",
    "random_degenerate_model",
    "random_models",
    "admissible_radius",
    "majorant",
    "derivative_alpha2",
    "PropertyResult",
    "PROPERTIES",
    "run_properties",
    "delta_leading_ratios",
    "random_point",
]

COEFF_BOUND = 2
MIN_LINEAR = Fraction(1, 10)
RADIUS_LADDER = tuple(Fraction(1, 10) / 2**k for k in range(25))


def random_coefficient(rng: random.Random, digits: int = 2) -> Fraction:
    """Decimal coefficient uniform on a grid of ``[-2, 2]`` with ``digits`` decimals."""
    scale = 10**digits
    return Fraction(rng.randint(-COEFF_BOUND * scale, COEFF_BOUND * scale), scale)


def majorant(s: TaylorSeries2D, r: float, skip_constant: bool = True) -> float:
    """Upper bound ``sum |c_ij| r^(i+j)`` of ``|s|`` on the disk of radius ``r``."""
    return math.fsum(abs(float(c)) * r ** (i + j) for (i, j), c in s if not (skip_constant and i == j == 0))


def derivative_alpha2(s: TaylorSeries2D) -> TaylorSeries2D:
    return TaylorSeries2D({(i, j - 1): j * c for (i, j), c in s if j > 0})


def admissible_radius(m: NormalFormModel, delta_monotone: bool = True) -> Fraction | None:
    """Largest radius on ``0.1 * 2^-k`` where the analysis is provably safe.

    The majorant bounds guarantee that on the disk

    * ``L2`` keeps the sign of ``L0`` with ``|L2| >= |L0|/2``;
    * every invariant circle has radius at most ``1/2`` (well inside the
      escape radius 1, so starts at ``1.5 r`` stay bounded);
    * optionally ``dDelta/dalpha2`` stays within half of its value
      ``-4 L0 a01`` at the origin, so Delta is strictly monotone on every
      vertical chord and changes sign exactly across C.
    """
    L0 = abs(float(m.L0))
    ddelta = derivative_alpha2(m.delta_series())
    lead = abs(float(ddelta.coeff(0, 0)))
    for exact in RADIUS_LADDER:
        r = float(exact)
        if majorant(m.l2, r) > 0.5 * L0:
            continue
        b1, b2 = majorant(m.beta1, r), majorant(m.beta2, r)
        ymax = (b2 + math.sqrt(b2 * b2 + 4 * b1 * 1.5 * L0)) / L0
        if ymax > 0.25:
            continue
        if delta_monotone and majorant(ddelta, r) > 0.5 * lead:
            continue
        return exact
    return None


def random_degenerate_model(
    rng: random.Random,
    order: int = 4,
    case: int | None = None,
    delta_monotone: bool = True,
) -> NormalFormModel:
    """Seeded random degenerate model with an adaptive validity radius.

    Coefficients are decimals in ``[-2, 2]``; draws with ``|a01|``,
    ``|b01|`` or ``|L0|`` below 0.1 are rejected and ``b10`` is forced to
    ``a10 b01 / a01`` so the degeneracy holds exactly.  ``case`` forces the
    sign of ``L0 a01`` (1 or 2).
    """
    while True:
        L0 = random_coefficient(rng)
        a01 = random_coefficient(rng)
        b01 = random_coefficient(rng)
        if min(abs(L0), abs(a01), abs(b01)) < MIN_LINEAR:
            continue
        if case is not None and (L0 * a01 > 0) != (case == 1):
            continue
        a10 = random_coefficient(rng)
        b10 = a10 * b01 / a01
        beta1 = {(1, 0): a10, (0, 1): a01}
        beta2 = {(1, 0): b10, (0, 1): b01}
        l2 = {}
        for n in range(2, order + 1):
            for i in range(n + 1):
                beta1[(i, n - i)] = random_coefficient(rng)
                beta2[(i, n - i)] = random_coefficient(rng)
        for n in range(1, order + 1):
            for i in range(n + 1):
                l2[(i, n - i)] = random_coefficient(rng)
        theta0 = Fraction(rng.randint(1, 300), 100)
        m = NormalFormModel(TaylorSeries2D(beta1), TaylorSeries2D(beta2), TaylorSeries2D(l2), L0, theta0)
        r = admissible_radius(m, delta_monotone)
        if r is None:
            continue
        return m.with_radius(r)


def random_models(n: int, seed: int, **kwargs) -> list[NormalFormModel]:
    rng = random.Random(seed)
    return [random_degenerate_model(rng, **kwargs) for _ in range(n)]


def random_point(rng: random.Random, radius: float, fraction: float = 0.95) -> tuple[float, float]:
    """Uniform point in the disk of radius ``fraction * radius``."""
    rr = fraction * radius * math.sqrt(rng.random())
    th = 2.0 * math.pi * rng.random()
    return rr * math.cos(th), rr * math.sin(th)


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, model_index: int, **details) -> None:
        self.failures.append({"model": model_index, **details})


def _close(a, b, rel: float = 1e-12) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def prop_series_vs_closed_form(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """Closed-form c2..c4 and d2..d4 agree with series composition."""
    for kind, exp in ((CurveKind.B1, expand_B1(m)), (CurveKind.B2, expand_B2(m))):
        series = series_expansion(m, kind)
        for n, (a, b) in enumerate(zip(exp.coeffs, series), start=1):
            if not _close(a, b):
                res.fail(k, curve=kind.value, order=n, closed_form=str(a), series=str(b))


def prop_c_curve_identities(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """m2 = c2 and m3 = c3 exactly; m4 - c4 = gamma^2 / (4 L0 a01)."""
    c1, c2, c3, c4 = expand_B1(m).coeffs
    _, m2, m3, m4 = series_expansion(m, CurveKind.C)
    gamma = expand_C(m).gamma
    if not (_close(m2, c2) and _close(m3, c3)):
        res.fail(k, m2=str(m2), c2=str(c2), m3=str(m3), c3=str(c3))
    if not _close(m4 - c4, gamma**2 / (4 * m.L0 * m.a01)):
        res.fail(k, m4_minus_c4=str(m4 - c4), formula=str(gamma**2 / (4 * m.L0 * m.a01)))


def prop_case_split(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """sign(m4 - c4) = sign(L0 a01) whenever |gamma| > 1e-9."""
    gamma = expand_C(m).gamma
    if abs(float(gamma)) <= 1e-9:
        return
    diff = series_expansion(m, CurveKind.C)[3] - expand_B1(m).coeffs[3]
    if (diff > 0) != (m.L0 * m.a01 > 0):
        res.fail(k, m4_minus_c4=str(diff), L0_a01=str(m.L0 * m.a01))


def prop_gamma_identity(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """gamma = b01 (c2 - d2)."""
    c2 = expand_B1(m).coeffs[1]
    d2 = expand_B2(m).coeffs[1]
    gamma = expand_C(m).gamma
    if not _close(gamma, m.b01 * (c2 - d2)):
        res.fail(k, gamma=str(gamma), b01_c2_minus_d2=str(m.b01 * (c2 - d2)))


def prop_circle_count_brute_force(m: NormalFormModel, k: int, res: PropertyResult, rng: random.Random, points: int = 3) -> None:
    """Analytic circle count equals the sign-change count of rho_map - rho."""
    for _ in range(points):
        p = random_point(rng, m.epsilon)
        ev = evaluate(m, p)
        try:
            inv = classify(ev, float(m.L0))
        except ChencinerError as exc:
            res.fail(k, point=p, error=str(exc))
            continue
        brute = brute_force_circle_count(ev, float(m.L0))
        ok = brute == len(inv.circles) or (inv.profile.delta_sign == 0 and brute in (0, 2))
        if not ok:
            res.fail(k, point=p, analytic=len(inv.circles), brute_force=brute, region=inv.region)


def prop_multipliers(m: NormalFormModel, k: int, res: PropertyResult, rng: random.Random, points: int = 3) -> None:
    """Circle multipliers agree with a central finite difference of the rho-map."""
    for _ in range(points):
        p = random_point(rng, m.epsilon)
        ev = evaluate(m, p)
        inv = classify(ev, float(m.L0))
        for c in inv.circles:
            r = c.radius
            h = 1e-6 * r
            fd = (rho_map(ev, r + h) - rho_map(ev, r - h)) / (2 * h)
            deriv = 1 + ev.beta1 + 3 * ev.beta2 * c.y + 5 * ev.l2 * c.y * c.y
            if abs(fd - c.multiplier) > 1e-6 or abs(deriv - c.multiplier) > 1e-9:
                res.fail(k, point=p, radius=r, multiplier=c.multiplier, finite_difference=fd)
            stable_side = c.multiplier < 1
            if c.stability is Stability.STABLE and not stable_side:
                res.fail(k, point=p, radius=r, stability=c.stability.value, multiplier=c.multiplier)
            if c.stability is Stability.UNSTABLE and stable_side:
                res.fail(k, point=p, radius=r, stability=c.stability.value, multiplier=c.multiplier)


def prop_monotonicity(m: NormalFormModel, k: int, res: PropertyResult, steps: int = 1000) -> None:
    """On B1 the nonhyperbolic orbit is monotone in the direction of sign(beta2)."""
    for a1 in (0.3 * m.epsilon, -0.3 * m.epsilon):
        trace = trace_curve(m, CurveKind.B1, [a1])
        if not trace.points:
            continue
        p = trace.points[0]
        ev = evaluate(m, p)
        if abs(ev.beta2) <= DEFAULT_BAND.beta_band(ev):
            continue
        rho0 = 0.01
        if ev.beta2 * ev.l2 < 0:
            rho0 = min(rho0, 0.5 * math.sqrt(-ev.beta2 / ev.l2))
        # a relative step below ~1e-13 cannot be resolved over the run in doubles
        if rho0 * rho0 * abs(ev.beta2 + ev.l2 * rho0 * rho0) < 1e-13:
            res.skipped += 1
            continue
        out = monotonicity_check(m, p, rho0, steps)
        want = Monotonicity.STRICTLY_DECREASING if ev.beta2 < 0 else Monotonicity.STRICTLY_INCREASING
        if out.verdict is not want:
            res.fail(k, point=(p.alpha1, p.alpha2), beta2=ev.beta2, verdict=out.verdict.value, index=out.index)


def prop_semistable(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """On C with L0 beta2 < 0 the double circle attracts from one side only."""
    c1 = float(expand_B1(m).coeffs[0])
    reach = 0.9 * m.epsilon / math.sqrt(1.0 + c1 * c1)
    for a1 in (reach, -reach):
        trace = trace_curve(m, CurveKind.C, [a1])
        if not trace.points:
            continue
        p = trace.points[0]
        ev = evaluate(m, p)
        if float(m.L0) * ev.beta2 >= 0 or abs(ev.delta) > DEFAULT_BAND.delta_band(ev):
            continue
        # The probe needs per-step changes that double precision can resolve.
        y = -ev.beta2 / (2.0 * ev.l2)
        if abs(ev.l2) * (0.19 * y) ** 2 < 1e-14:
            res.skipped += 1
            continue
        rep = semistability_probe(m, p, steps=2000)
        ok = (rep.outer_converges and rep.inner_departs) if m.L0 < 0 else (rep.outer_departs and rep.inner_converges)
        if not ok:
            res.fail(k, point=(p.alpha1, p.alpha2), L0=str(m.L0), report=repr(rep))


def delta_leading_ratios(m: NormalFormModel, radii: Iterable[float] = (1e-2, 1e-3, 1e-4), angles: int = 360) -> list[float]:
    """``max_{|alpha|=r} |Delta + 4 L0 (a10 a1 + a01 a2)| / r^2`` for each r.

    Evaluated on the Delta polynomial directly, so radii above the model's
    validity radius are allowed.
    """
    delta = m.delta_series()
    lin = TaylorSeries2D({(1, 0): 4 * m.L0 * m.a10, (0, 1): 4 * m.L0 * m.a01})
    rem = delta + lin
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    out = []
    for r in radii:
        vals = rem(r * np.cos(th), r * np.sin(th))
        out.append(float(np.max(np.abs(vals))) / (r * r))
    return out


def quadratic_part_max(m: NormalFormModel, angles: int = 360) -> float:
    q = TaylorSeries2D({k: v for k, v in m.delta_series() if sum(k) == 2})
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    return float(np.max(np.abs(q(np.cos(th), np.sin(th)))))


def prop_delta_leading(m: NormalFormModel, k: int, res: PropertyResult) -> None:
    """The remainder after the linear term of Delta is O(|alpha|^2)."""
    ratios = delta_leading_ratios(m)
    q = quadratic_part_max(m)
    limit = 2.0 * max(ratios[0], q) + 1e-12
    bounded = all(math.isfinite(x) and x <= limit for x in ratios)
    if not bounded or abs(ratios[-1] - q) > 1e-2 * (1.0 + q):
        res.fail(k, ratios=ratios, quadratic_max=q)


PROPERTIES: dict[str, Callable] = {
    "series_vs_closed_form": prop_series_vs_closed_form,
    "c_curve_identities": prop_c_curve_identities,
    "case_split": prop_case_split,
    "gamma_identity": prop_gamma_identity,
    "circle_count_brute_force": prop_circle_count_brute_force,
    "multipliers": prop_multipliers,
    "monotonicity": prop_monotonicity,
    "semistable": prop_semistable,
    "delta_leading": prop_delta_leading,
}

_NEEDS_RNG = {"circle_count_brute_force", "multipliers"}


def run_properties(
    models: list[NormalFormModel],
    seed: int = 0,
    names: Iterable[str] | None = None,
) -> list[PropertyResult]:
    """Run the selected properties over every model, catching errors as failures."""
    names = list(PROPERTIES if names is None else names)
    results = []
    for name in names:
        fn = PROPERTIES[name]
        res = PropertyResult(name)
        rng = random.Random(f"{seed}:{name}")
        for k, m in enumerate(models):
            res.checked += 1
            try:
                if name in _NEEDS_RNG:
                    fn(m, k, res, rng)
                else:
                    fn(m, k, res)
            except ChencinerError as exc:
                res.fail(k, error=f"{type(exc).__name__}: {exc}")
        results.append(res)
    return results
