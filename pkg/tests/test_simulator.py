import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chenciner.classifier import classify_point
from chenciner.curves import CurveKind, trace_curve
from chenciner.errors import InvalidStart, NotOnCurve, PreconditionViolated
from chenciner.normal_form import NormalFormModel, TaylorSeries2D, evaluate
from chenciner.simulator import (
    Monotonicity,
    SimulationConfig,
    VerdictKind,
    iterate_orbit,
    monotonicity_check,
    semistability_probe,
)

from conftest import make_ex1, make_ex1a, make_mirror

EX1_RADIUS = 0.38958242874593080


def axis_model(L0):
    """beta1 = alpha1, beta2 = alpha2: beta1 = 0 on the alpha2 axis."""
    return NormalFormModel(TaylorSeries2D({(1, 0): 1}), TaylorSeries2D({(0, 1): 1}), TaylorSeries2D(), L0)


class TestIterateOrbit:
    @pytest.mark.parametrize("rho0", [0.05, 0.1, 0.6])
    def test_ex1_converges_to_outer_circle(self, ex1, rho0):
        tr = iterate_orbit(ex1, (0.01, 0.01), rho0)
        assert tr.verdict.kind is VerdictKind.CONVERGED_TO_CIRCLE
        assert abs(tr.verdict.radius - EX1_RADIUS) <= 1e-5

    def test_ex1_escapes_above_unstable_region(self, ex1):
        tr = iterate_orbit(ex1, (0.01, 0.01), 1.2)
        assert tr.verdict.kind is VerdictKind.ESCAPED

    def test_zero_start_stays_at_origin(self, ex1):
        tr = iterate_orbit(ex1, (0.01, 0.01), 0.0)
        assert tr.verdict.kind is VerdictKind.CONVERGED_TO_ORIGIN
        assert np.all(tr.rho == 0.0)

    def test_stable_origin(self, ex1):
        # region 4 side: beta1 < 0, no circles
        tr = iterate_orbit(ex1, (-0.01, -0.01), 0.1)
        assert tr.verdict.kind is VerdictKind.CONVERGED_TO_ORIGIN

    def test_negative_start_rejected(self, ex1):
        with pytest.raises(InvalidStart):
            iterate_orbit(ex1, (0.01, 0.01), -0.1)

    def test_budget_exhaustion_is_undecided(self, ex1):
        tr = iterate_orbit(ex1, (0.01, 0.01), 0.1, cfg=SimulationConfig(max_steps=5))
        assert tr.verdict.kind is VerdictKind.UNDECIDED
        assert tr.steps_used == 5 and len(tr.rho) == 6

    def test_phase_advances_by_theta0(self, ex1):
        tr = iterate_orbit(ex1, (0.01, 0.01), 0.1, phi0=0.5, cfg=SimulationConfig(max_steps=50))
        steps = np.mod(np.diff(tr.phi), 2 * math.pi)
        assert np.allclose(steps, 0.1)
        assert np.all((tr.phi >= 0) & (tr.phi < 2 * math.pi))

    @given(st.floats(0.0, 2 * math.pi, exclude_max=True), st.floats(0.01, 0.9))
    @settings(max_examples=30, deadline=None)
    def test_radius_independent_of_phase(self, phi0, rho0):
        m = make_ex1()
        a = iterate_orbit(m, (0.01, 0.01), rho0, phi0=0.0, cfg=SimulationConfig(max_steps=200))
        b = iterate_orbit(m, (0.01, 0.01), rho0, phi0=phi0, cfg=SimulationConfig(max_steps=200))
        assert np.array_equal(a.rho, b.rho)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimulationConfig(max_steps=0)
        with pytest.raises(ValueError):
            SimulationConfig(convergence_tol=0.0)


def on_C(m, a1):
    tr = trace_curve(m, CurveKind.C, [a1])
    return tr.points[0]


class TestSemistability:
    def test_ex1a_outer_converges_inner_departs(self):
        m = make_ex1a()
        p = on_C(m, 0.05)
        rep = semistability_probe(m, p)
        ev = evaluate(m, p)
        assert ev.beta2 > 0
        assert math.isclose(rep.radius, math.sqrt(ev.beta2 / 2), rel_tol=1e-12)
        assert rep.outer_converges and rep.inner_departs
        assert not rep.outer_departs

    def test_mirror_outer_departs_inner_converges(self):
        m = make_mirror()
        rep = semistability_probe(m, on_C(m, 0.05))
        assert rep.outer_departs and rep.inner_converges
        assert not rep.outer_converges

    def test_off_curve_rejected(self, ex1a):
        with pytest.raises(NotOnCurve):
            semistability_probe(ex1a, (0.01, 0.01))

    def test_semistable_point_classified_as_region_with_one_circle(self):
        m = make_ex1a()
        inv = classify_point(m, on_C(m, 0.05))
        assert len(inv.circles) == 1
        assert inv.circles[0].multiplier == 1.0


class TestMonotonicity:
    def test_decreasing_negative_beta2_negative_L0(self):
        res = monotonicity_check(axis_model(-1), (0.0, -0.05), 0.3, n=10_000)
        assert res.verdict is Monotonicity.STRICTLY_DECREASING
        assert res.index is None

    def test_increasing_positive_beta2_positive_L0(self):
        res = monotonicity_check(axis_model(1), (0.0, 0.05), 0.01, n=10_000)
        assert res.verdict is Monotonicity.STRICTLY_INCREASING

    def test_induction_case(self):
        res = monotonicity_check(axis_model(1), (0.0, -0.05), 0.2, n=10_000)
        assert res.verdict is Monotonicity.STRICTLY_DECREASING
        assert res.s_decreasing

    def test_induction_bound_enforced(self):
        with pytest.raises(PreconditionViolated):
            monotonicity_check(axis_model(1), (0.0, -0.05), math.sqrt(0.05) * 1.01)

    def test_beta1_nonzero_rejected(self):
        with pytest.raises(PreconditionViolated):
            monotonicity_check(axis_model(-1), (0.01, -0.05), 0.1)

    def test_beta2_zero_rejected(self):
        with pytest.raises(PreconditionViolated):
            monotonicity_check(axis_model(-1), (0.0, 0.0), 0.1)

    def test_ex1a_on_B1(self, ex1a):
        # beta1 = 0 where alpha1 + alpha2 = 0; there beta2 = alpha1^2 > 0 and L0 < 0
        res = monotonicity_check(ex1a, (0.05, -0.05), 0.01, n=10_000)
        assert res.verdict is Monotonicity.STRICTLY_INCREASING

    def test_violation_reports_index(self):
        # a huge start overshoots to a negative radius in one step
        res = monotonicity_check(axis_model(-1), (0.0, -0.05), 30.0, n=10)
        assert res.verdict is Monotonicity.VIOLATED
        assert res.index == 0
