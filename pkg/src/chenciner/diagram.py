"""Qualitative bifurcation-diagram cases, sampled parameter-plane diagrams and phase portraits.

Canonical case labels
---------------------
Near the origin the curves B1 and C agree through cubic order, so the local
picture inside a fixed ``(Case, sign c1)`` pair is decided by three signs:

* ``sign c2``: on which side of the common tangent line B1 and C bend;
* ``sign gamma`` with ``gamma = b01 (c2 - d2)``: whether the region
  ``beta2 > 0`` lies on the B1/C side of B2 or away from it;
* ``sign L0``: which of the mirror-image region sets appears.

The raw data ``(sign c2, sign d2, order of c2 and d2, sign b01)`` collapses onto
``sign gamma`` because only the product ``b01 (c2 - d2)`` matters; for example
``0 < c2 < d2, b01 > 0`` and ``0 < d2 < c2, b01 < 0`` give the same picture.
The index within a ``(Case, c1)`` pair is

    index = 1 + 4 [c2 < 0] + 2 [gamma > 0] + [L0 < 0]

so index 1 is ``c2 > 0, gamma < 0, L0 > 0``.  With two cases and two signs
of ``c1`` this gives 32 labels.  Models with ``c1 = 0``, ``c2 = 0`` or
``gamma = 0`` are non-generic and receive no label.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .classifier import DEFAULT_BAND, CircleInventory, CircleRecord, Stability, ZeroBand, classify, sign_profile
from .curves import CurveKind, CurveTrace, expand_B1, expand_B2, expand_C, trace_curve
from .errors import ChencinerError, DiagramError, InfeasibleProfile, NotDegenerate
from .normal_form import (
    Degeneracy,
    NormalFormModel,
    ParameterPoint,
    PointLike,
    TaylorSeries2D,
    as_point,
    check_degeneracy,
    evaluate,
)
from .simulator import OrbitTrace, SimulationConfig, Verdict, VerdictKind, iterate_orbit

__all__ = [
    "DiagramCase",
    "enumerate_case",
    "lattice_model",
    "case_lattice",
    "ZoneProbe",
    "SideViolation",
    "DiagramSpec",
    "build_diagram",
    "PhasePortraitSpec",
    "phase_portrait",
    "expected_fate",
    "portrait_consistent",
    "MIN_RESOLUTION",
]

MIN_RESOLUTION = 16


def _sgn(x, tol: float = 0.0) -> int:
    x = float(x)
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


_SYM = {1: "+", -1: "-", 0: "0"}


@dataclass(frozen=True)
class DiagramCase:
    case: str
    c1_sign: int
    c2_sign: int
    d2_sign: int
    order_c2_d2: str
    b01_sign: int
    gamma_zero: bool
    L0_sign: int
    gamma_sign: int
    warnings: tuple[str, ...] = ()

    @property
    def index(self) -> int | None:
        if not self.is_generic:
            return None
        return 1 + 4 * (self.c2_sign < 0) + 2 * (self.gamma_sign > 0) + (self.L0_sign < 0)

    @property
    def is_generic(self) -> bool:
        return self.c1_sign != 0 and self.c2_sign != 0 and self.gamma_sign != 0

    @property
    def label(self) -> str | None:
        if not self.is_generic:
            return None
        return f"D({self.case}, c1{_SYM[self.c1_sign]}, {self.index})"

    @property
    def number(self) -> int | None:
        """Global position 1..32 of the canonical label."""
        if not self.is_generic:
            return None
        return 16 * (self.case == "Case2") + 8 * (self.c1_sign < 0) + self.index

    def summary(self) -> str:
        lines = [
            f"label: {self.label if self.label else 'non-generic (no canonical label)'}",
            f"case: {self.case}",
            f"sign c1: {_SYM[self.c1_sign]}",
            f"sign c2: {_SYM[self.c2_sign]}",
            f"sign d2: {_SYM[self.d2_sign]}",
            f"order: {self.order_c2_d2}",
            f"sign b01: {_SYM[self.b01_sign]}",
            f"sign L0: {_SYM[self.L0_sign]}",
            f"sign gamma: {_SYM[self.gamma_sign]}",
            f"gamma_zero: {str(self.gamma_zero).lower()}",
        ]
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"


def enumerate_case(m: NormalFormModel, tol: float = 1e-12) -> DiagramCase:
    """Sign data selecting the qualitative bifurcation diagram of a degenerate model.

    Vanishing of ``d2 m4 c4 gamma L0`` or of ``c1`` is reported through
    ``warnings`` rather than raised.
    """
    if check_degeneracy(m, tol) is not Degeneracy.DEGENERATE:
        raise NotDegenerate(float(m.determinant))
    b1 = expand_B1(m, tol)
    b2 = expand_B2(m, tol)
    c = expand_C(m, tol)
    c1, c2, _, c4 = b1.coeffs
    d2 = b2.coeffs[1]
    m4 = c.coeffs[3]
    gamma = c.gamma

    warnings = []
    if m.a10 == 0 and m.b10 == 0:
        warnings.append("a10 = b10 = 0: curves tangent to the alpha1 axis (c1 = 0)")
    elif m.a10 * m.b10 == 0:
        warnings.append("a10 * b10 = 0: linear parts have a vanishing coefficient")
    for name, val in (("d2", d2), ("m4", m4), ("c4", c4), ("gamma", gamma)):
        if _sgn(val, tol) == 0:
            warnings.append(f"{name} = 0: assumption d2 m4 c4 gamma L0 != 0 violated")
    if _sgn(gamma, tol) == 0:
        warnings.append("gamma_zero: B1, B2 and C coincide through quadratic order")

    diff = _sgn(c2 - d2, tol)
    order = {-1: "c2<d2", 1: "d2<c2", 0: "equal"}[diff]
    return DiagramCase(
        case="Case1" if m.L0 * m.a01 > 0 else "Case2",
        c1_sign=_sgn(c1, tol),
        c2_sign=_sgn(c2, tol),
        d2_sign=_sgn(d2, tol),
        order_c2_d2=order,
        b01_sign=_sgn(m.b01, tol),
        gamma_zero=_sgn(gamma, tol) == 0,
        L0_sign=_sgn(m.L0),
        gamma_sign=_sgn(gamma, tol),
        warnings=tuple(warnings),
    )


# (c2, d2) value pairs realising each admissible (sign c2, sign d2, order) triple
_C2_D2 = {
    (1, 1, "c2<d2"): (Fraction(1), Fraction(2)),
    (1, 1, "d2<c2"): (Fraction(1), Fraction(1, 2)),
    (1, -1, "d2<c2"): (Fraction(1), Fraction(-1)),
    (-1, 1, "c2<d2"): (Fraction(-1), Fraction(1)),
    (-1, -1, "c2<d2"): (Fraction(-1), Fraction(-1, 2)),
    (-1, -1, "d2<c2"): (Fraction(-1), Fraction(-2)),
}


def lattice_model(case: int, c1_sign: int, L0_sign: int, c2: Fraction, d2: Fraction, b01_sign: int) -> NormalFormModel:
    """Smallest exact model with the prescribed sign data.

    ``a01 = case_sign * L0`` fixes the case, ``a20 = -c2 a01`` and
    ``b20 = -d2 b01`` fix the quadratic coefficients, and ``a40 = -a01/3``
    keeps ``c4`` (and hence ``m4``) away from zero.
    """
    L0 = Fraction(L0_sign)
    a01 = Fraction(1 if case == 1 else -1) * L0
    a10 = -Fraction(c1_sign) * a01
    b01 = Fraction(b01_sign)
    b10 = a10 * b01 / a01
    beta1 = TaylorSeries2D({(1, 0): a10, (0, 1): a01, (2, 0): -c2 * a01, (4, 0): -a01 / 3})
    beta2 = TaylorSeries2D({(1, 0): b10, (0, 1): b01, (2, 0): -d2 * b01})
    return NormalFormModel(beta1, beta2, TaylorSeries2D(), L0)


def case_lattice() -> list[DiagramCase]:
    """Enumerate every admissible raw sign tuple and return its DiagramCase.

    Raw tuples: 2 cases x 2 signs of c1 x 2 signs of L0 x 6 (c2, d2, order)
    triples x 2 signs of b01 = 96 models, collapsing onto 32 labels.
    """
    out = []
    for case, c1s, L0s, key, b01s in product((1, 2), (1, -1), (1, -1), _C2_D2, (1, -1)):
        c2, d2 = _C2_D2[key]
        out.append(enumerate_case(lattice_model(case, c1s, L0s, c2, d2, b01s)))
    return out


@dataclass(frozen=True)
class ZoneProbe:
    """Classification at the midpoint between two consecutive traced curves.

    Thin regions squeezed between curves that agree to high order are
    invisible on a coarse grid; probes sample them directly.
    """

    alpha1: float
    alpha2: float
    region: int | None


@dataclass(frozen=True)
class SideViolation:
    alpha1: float
    alpha2: float
    side: str
    expected_delta_sign: int
    delta: float


@dataclass
class DiagramSpec:
    window: tuple[float, float, float, float]
    alpha1: np.ndarray
    alpha2: np.ndarray
    grid: list[list[int | None]]
    curves: dict[CurveKind, CurveTrace]
    case: DiagramCase | None
    annotations: dict[str, str]
    zone_probes: list[ZoneProbe] = field(default_factory=list)
    side_violations: list[SideViolation] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def resolution(self) -> int:
        return len(self.alpha1)

    @property
    def grid_regions(self) -> set[int]:
        return {r for row in self.grid for r in row if r is not None}

    @property
    def regions(self) -> set[int]:
        return self.grid_regions | {z.region for z in self.zone_probes if z.region is not None}

    def cells(self):
        """Yield ``(alpha1, alpha2, region)`` row by row (alpha2 outer)."""
        for j, a2 in enumerate(self.alpha2):
            for i, a1 in enumerate(self.alpha1):
                yield float(a1), float(a2), self.grid[j][i]


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


def _classify_cell(m: NormalFormModel, a1: float, a2: float, band: ZeroBand) -> tuple[int | None, str | None]:
    try:
        ev = evaluate(m, (a1, a2))
    except ChencinerError as exc:
        return None, f"({a1:.6g}, {a2:.6g}): {type(exc).__name__}: {exc}"
    at_origin = a1 == 0.0 and a2 == 0.0
    profile = sign_profile(ev, float(m.L0), band)
    if not at_origin and (profile.delta_sign == 0 or profile.beta1_sign == 0):
        # on B1 or C within the zero band: a boundary cell
        return None, None
    try:
        return classify(ev, float(m.L0), band).region, None
    except InfeasibleProfile as exc:
        return None, f"({a1:.6g}, {a2:.6g}): {exc}"


def build_diagram(
    m: NormalFormModel,
    window: Sequence[float],
    resolution: int,
    band: ZeroBand = DEFAULT_BAND,
    trace_tol: float = 1e-12,
    min_resolution: int = MIN_RESOLUTION,
) -> DiagramSpec:
    """Sample the parameter plane on a ``resolution x resolution`` grid.

    ``window = (alpha1_min, alpha1_max, alpha2_min, alpha2_max)`` must lie
    inside the validity disk.  Cells on a zero band are boundary cells
    (region ``None``).  ``grid[j][i]`` holds the region at
    ``(alpha1[i], alpha2[j])``.
    """
    a1lo, a1hi, a2lo, a2hi = (float(v) for v in window)
    if not (a1lo <= a1hi and a2lo <= a2hi):
        raise DiagramError(f"window {tuple(window)} is not ordered as (a1min, a1max, a2min, a2max)")
    if resolution < min_resolution:
        raise DiagramError(f"resolution {resolution} is below the minimum {min_resolution}")
    eps = m.epsilon
    corner = max(math.hypot(x, y) for x in (a1lo, a1hi) for y in (a2lo, a2hi))
    if corner >= eps:
        raise DiagramError(f"window reaches |alpha| = {corner:.6g}, outside the validity disk of radius {eps:.6g}")

    a1s = _axis(a1lo, a1hi, resolution)
    a2s = _axis(a2lo, a2hi, resolution)
    diagnostics: list[str] = []

    def row(a2):
        return [_classify_cell(m, float(a1), float(a2), band) for a1 in a1s]

    rows = ordered_map(row, a2s)
    grid = [[r for r, _ in cells] for cells in rows]
    for cells in rows:
        diagnostics.extend(msg for _, msg in cells if msg)

    curves: dict[CurveKind, CurveTrace] = {}
    for kind in CurveKind:
        try:
            curves[kind] = trace_curve(m, kind, a1s, trace_tol=trace_tol)
        except ChencinerError as exc:
            curves[kind] = CurveTrace(kind)
            diagnostics.append(f"{kind.value} not traced: {type(exc).__name__}: {exc}")
        for a1, reason in curves[kind].failures:
            diagnostics.append(f"{kind.value} at alpha1 = {a1:.6g}: {reason}")

    case = None
    if check_degeneracy(m) is Degeneracy.DEGENERATE:
        try:
            case = enumerate_case(m)
            diagnostics.extend(case.warnings)
        except ChencinerError as exc:
            diagnostics.append(f"case not enumerated: {type(exc).__name__}: {exc}")
    else:
        diagnostics.append("model is not degenerate; no diagram case")

    # Delta-side rule: Case 1 has Delta < 0 above C and Delta > 0 below.
    above_sign = -1 if float(m.L0 * m.a01) > 0 else 1
    annotations = {
        "R1": "alpha2 above C",
        "R2": "alpha2 below C",
        "delta_R1": "-" if above_sign < 0 else "+",
        "delta_R2": "+" if above_sign < 0 else "-",
    }
    violations: list[SideViolation] = []
    c_trace = curves[CurveKind.C]
    c_at = {p.alpha1: p.alpha2 for p in c_trace.points}
    for i, a1 in enumerate(a1s):
        c_val = c_at.get(float(a1))
        if c_val is None:
            continue
        for j, a2 in enumerate(a2s):
            if a2 == c_val:
                continue
            try:
                ev = evaluate(m, (float(a1), float(a2)))
            except ChencinerError:
                continue
            if abs(ev.delta) <= band.delta_band(ev):
                continue
            side = "R1" if a2 > c_val else "R2"
            expected = above_sign if side == "R1" else -above_sign
            if _sgn(ev.delta) != expected:
                violations.append(SideViolation(float(a1), float(a2), side, expected, ev.delta))
    if violations:
        diagnostics.append(f"{len(violations)} grid cells violate the Delta-side rule")

    probes = _zone_probes(m, a1s, (a2lo, a2hi), curves, band)
    return DiagramSpec(
        window=(a1lo, a1hi, a2lo, a2hi),
        alpha1=a1s,
        alpha2=a2s,
        grid=grid,
        curves=curves,
        case=case,
        annotations=annotations,
        zone_probes=probes,
        side_violations=violations,
        diagnostics=diagnostics,
    )


def _zone_probes(m, a1s, a2range, curves, band) -> list[ZoneProbe]:
    lookup = {k: {p.alpha1: p.alpha2 for p in t.points} for k, t in curves.items()}
    lo, hi = a2range
    probes = []
    for a1 in a1s:
        a1 = float(a1)
        vals = sorted({v[a1] for v in lookup.values() if a1 in v and lo <= v[a1] <= hi})
        for u, w in zip(vals, vals[1:]):
            mid = 0.5 * (u + w)
            if mid in (u, w):
                continue
            region, _ = _classify_cell(m, a1, mid, band)
            probes.append(ZoneProbe(a1, mid, region))
    return probes


Fate = tuple[str, float | None]


def expected_fate(inv: CircleInventory, ev, rho0: float) -> Fate:
    """Analytic destination of the radial orbit started at ``rho0``.

    The sign of ``g(rho) = beta1 + beta2 rho^2 + L2 rho^4`` decides the
    direction; the orbit moves monotonically towards the next fixed radius
    in that direction (the origin counts as radius 0) or escapes.
    """
    radii = inv.radii
    for r in radii:
        if math.isclose(rho0, r, rel_tol=1e-12, abs_tol=1e-15):
            return "circle", r
    if rho0 == 0.0:
        return "origin", None
    y = rho0 * rho0
    g = ev.beta1 + ev.beta2 * y + ev.l2 * y * y
    if g > 0:
        above = [r for r in radii if r > rho0]
        return ("circle", min(above)) if above else ("escape", None)
    below = [r for r in radii if r < rho0]
    return ("circle", max(below)) if below else ("origin", None)


@dataclass
class PhasePortraitSpec:
    region: int
    point: ParameterPoint
    inventory: CircleInventory
    circles: list[CircleRecord]
    orbits: list[OrbitTrace]
    starts: list[float]
    fates: list[Fate]
    config: SimulationConfig
    origin_multiplier: float = 0.0

    @property
    def origin(self) -> Stability:
        return self.inventory.origin


def default_starts(inv: CircleInventory) -> list[float]:
    radii = inv.radii
    if not radii:
        return [0.05]
    starts = [0.3 * radii[0]]
    starts.extend(0.5 * (u + w) for u, w in zip(radii, radii[1:]))
    starts.append(1.2 * radii[-1])
    return starts


def phase_portrait(
    m: NormalFormModel,
    p: PointLike,
    cfg: SimulationConfig | None = None,
    starts: Sequence[float] | None = None,
    band: ZeroBand = DEFAULT_BAND,
) -> PhasePortraitSpec:
    """Classify ``p`` and launch an orbit bundle inside, between and outside the circles."""
    cfg = cfg or SimulationConfig()
    p = as_point(p)
    ev = evaluate(m, p)
    inv = classify(ev, float(m.L0), band)
    starts = list(default_starts(inv) if starts is None else starts)
    count = max(len(starts), 1)

    def run(k):
        return iterate_orbit(m, p, starts[k], phi0=2.0 * math.pi * k / count, cfg=cfg)

    orbits = ordered_map(run, range(len(starts)))
    fates = [expected_fate(inv, ev, r) for r in starts]
    return PhasePortraitSpec(inv.region, p, inv, list(inv.circles), orbits, starts, fates, cfg, 1.0 + ev.beta1)


def _too_slow(mu: float, cfg: SimulationConfig) -> bool:
    """True when a contraction with multiplier ``mu`` cannot reach ``tol`` within the step budget."""
    if not 0.0 < mu < 1.0:
        return mu >= 1.0
    needed = math.log(cfg.convergence_tol) / math.log(mu)
    return needed > cfg.max_steps


def _verdict_matches(fate: Fate, verdict: Verdict, spec: "PhasePortraitSpec") -> bool:
    kind, r = fate
    inv, cfg = spec.inventory, spec.config
    if verdict.kind is VerdictKind.UNDECIDED:
        # slow approach: multiplier at (or so close to) 1 that the budget runs out
        if kind == "circle":
            rec = next(c for c in inv.circles if c.radius == r)
            return _too_slow(rec.multiplier, cfg)
        return kind == "origin" and (inv.origin_mode.value != "linear" or _too_slow(spec.origin_multiplier, cfg))
    if kind == "origin":
        return verdict.kind is VerdictKind.CONVERGED_TO_ORIGIN
    if kind == "escape":
        return verdict.kind is VerdictKind.ESCAPED
    tol = cfg.convergence_tol
    return verdict.kind is VerdictKind.CONVERGED_TO_CIRCLE and abs(verdict.radius - r) <= max(10 * tol, 1e-5)


def portrait_consistent(spec: PhasePortraitSpec) -> bool:
    """True iff every orbit verdict agrees with the analytic circle inventory."""
    return all(_verdict_matches(f, o.verdict, spec) for f, o in zip(spec.fates, spec.orbits))
