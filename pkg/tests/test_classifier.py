import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chenciner.classifier import (
    REGION_TABLE,
    OriginMode,
    SignProfile,
    Stability,
    ZeroBand,
    brute_force_circle_count,
    circle_multiplier,
    classify,
    classify_point,
    origin_stability,
    region_of,
    sign_profile,
    solve_circle_equation,
)
from chenciner.errors import InfeasibleProfile
from chenciner.normal_form import ModelEvaluation, ParameterPoint, evaluate, rho_map, rho_step
from chenciner.verify import random_point

from conftest import degenerate_models

# Oracle values from sympy (exact rational arithmetic, 17 digits).
EX1_Y1 = -0.13177446878757825
EX1_Y2 = 0.15177446878757825
EX1_RADIUS = 0.38958242874593080
EX1_MULT = 0.91392902124849687
EX1A_RADII = (0.29664793948382652, 0.37148351242013420)


def ev_of(b1, b2, l2):
    return ModelEvaluation(b1, b2, l2, ParameterPoint(0.0, 0.0))


class TestRoots:
    def test_ex1(self, ex1):
        y1, y2 = solve_circle_equation(evaluate(ex1, (0.01, 0.01)))
        assert y1 == pytest.approx(EX1_Y1, rel=1e-14)
        assert y2 == pytest.approx(EX1_Y2, rel=1e-14)

    def test_beta1_zero(self):
        y1, y2 = solve_circle_equation(ev_of(0.0, 0.02, -1.0))
        assert y1 == 0.0 and y2 == pytest.approx(0.02)

    def test_ex1a(self, ex1a_wide):
        y1, y2 = solve_circle_equation(evaluate(ex1a_wide, (0.5, -0.512)))
        assert y1 == pytest.approx(0.088, abs=1e-14) and y2 == pytest.approx(0.138, abs=1e-14)

    def test_no_roots(self):
        assert solve_circle_equation(ev_of(0.1, 0.0, 1.0)) is None

    @given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 2), st.sampled_from([-1, 1]))
    def test_vieta(self, b1, b2, l, s):
        l2 = s * l
        ev = ev_of(b1, b2, l2)
        roots = solve_circle_equation(ev)
        if roots is None:
            assert ev.delta < 0
            return
        y1, y2 = roots
        scale = max(1.0, abs(b1 / l2), abs(b2 / l2))
        assert abs(y1 * y2 - b1 / l2) <= 1e-10 * scale**2
        assert abs(y1 + y2 + b2 / l2) <= 1e-10 * scale


class TestMultipliers:
    def test_ex1(self, ex1):
        ev = evaluate(ex1, (0.01, 0.01))
        mult = circle_multiplier(ev, EX1_Y2, "y2")
        assert mult == pytest.approx(EX1_MULT, rel=1e-14)
        r = math.sqrt(EX1_Y2)
        h = 1e-6
        fd = (rho_step(ex1, (0.01, 0.01), r + h) - rho_step(ex1, (0.01, 0.01), r - h)) / (2 * h)
        assert fd == pytest.approx(mult, abs=1e-9)

    def test_delta_zero(self):
        assert circle_multiplier(ev_of(-0.25, 1.0, -1.0), 0.5, "y1") == 1.0

    def test_ex1a(self, ex1a_wide):
        ev = evaluate(ex1a_wide, (0.5, -0.512))
        assert circle_multiplier(ev, 0.088, "y1") == pytest.approx(1.0088, abs=1e-14)
        assert circle_multiplier(ev, 0.138, "y2") == pytest.approx(0.9862, abs=1e-14)

    def test_bad_which(self):
        with pytest.raises(ValueError):
            circle_multiplier(ev_of(0, 0, 1), 0.1, "y3")


class TestOriginAndProfile:
    @pytest.mark.parametrize(
        "b1,b2,L0,expected",
        [
            (-0.01, 0.0, 1, (Stability.STABLE, OriginMode.LINEAR)),
            (0.01, 0.0, -1, (Stability.UNSTABLE, OriginMode.LINEAR)),
            (0.0, 0.02, -1, (Stability.UNSTABLE, OriginMode.NONLINEAR_BETA2)),
            (0.0, -0.02, 1, (Stability.STABLE, OriginMode.NONLINEAR_BETA2)),
            (0.0, 0.0, -1, (Stability.STABLE, OriginMode.NONLINEAR_L0)),
            (0.0, 0.0, 1, (Stability.UNSTABLE, OriginMode.NONLINEAR_L0)),
        ],
    )
    def test_origin(self, b1, b2, L0, expected):
        assert origin_stability(ev_of(b1, b2, float(L0)), L0) == expected

    def test_profile_ex1(self, ex1):
        assert sign_profile(evaluate(ex1, (0.01, 0.01)), -1) == SignProfile(1, 1, 1, -1)

    def test_profile_origin(self, ex1a):
        assert sign_profile(evaluate(ex1a, (0, 0)), -1) == SignProfile(0, 0, 0, -1)

    def test_delta_band(self):
        ev = ModelEvaluation(0.0, 0.0, 1.0)
        object.__setattr__(ev, "delta", 1e-15)
        assert sign_profile(ev, 1).delta_sign == 0

    def test_table_has_18_rows(self):
        assert len(REGION_TABLE) == 18

    @pytest.mark.parametrize(
        "profile",
        [
            # fields are (Delta, beta1, beta2, L0)
            SignProfile(-1, -1, 1, 1),
            SignProfile(-1, 1, 0, -1),
            SignProfile(0, -1, 1, 1),
            SignProfile(1, 1, 0, 1),
        ],
    )
    def test_infeasible(self, profile):
        with pytest.raises(InfeasibleProfile):
            region_of(profile)

    def test_all_realisable_profiles_covered(self):
        # brute force over sign patterns of (beta1, beta2, L2) with representative magnitudes
        mags = (-0.3, -0.01, 0.0, 0.01, 0.3)
        for b1 in mags:
            for b2 in mags:
                for l2 in (-1.0, 1.0):
                    ev = ev_of(b1, b2, l2)
                    region_of(sign_profile(ev, l2))


class TestClassify:
    def test_region1(self):
        inv = classify(ev_of(-0.01, 0.3, 1.0), 1)
        assert inv.region == 1 and [c.stability for c in inv.circles] == [Stability.UNSTABLE]

    def test_ex1(self, ex1):
        inv = classify_point(ex1, (0.01, 0.01))
        assert inv.region == 3 and len(inv.circles) == 1
        assert inv.circles[0].radius == pytest.approx(EX1_RADIUS, rel=1e-14)
        assert inv.circles[0].stability is Stability.STABLE

    def test_region5(self):
        inv = classify(ev_of(-0.25, 1.0, -1.0), -1)
        assert inv.region == 5
        (c,) = inv.circles
        assert c.stability is Stability.SEMISTABLE_OUTER_STABLE and c.y == pytest.approx(0.5) and c.multiplier == 1.0

    def test_region6(self):
        inv = classify(ev_of(0.25, -1.0, 1.0), 1)
        assert inv.region == 6 and inv.circles[0].stability is Stability.SEMISTABLE_INNER_STABLE

    def test_region7_ex1a(self, ex1a_wide):
        inv = classify_point(ex1a_wide, (0.5, -0.512))
        assert inv.region == 7
        assert [c.stability for c in inv.circles] == [Stability.UNSTABLE, Stability.STABLE]
        assert inv.radii == pytest.approx(EX1A_RADII, rel=1e-14)

    def test_region8_two_circles(self):
        inv = classify(ev_of(0.01, -0.3, 1.0), 1)
        assert inv.region == 8 and [c.stability for c in inv.circles] == [Stability.STABLE, Stability.UNSTABLE]

    def test_beta1_zero_circle(self):
        inv = classify(ev_of(0.0, 0.02, -1.0), -1)
        assert inv.region == 3 and inv.radii == pytest.approx([math.sqrt(0.02)])

    def test_origin_profiles(self, ex1a):
        assert classify_point(ex1a, (0, 0)).region == 4
        assert classify(ev_of(0, 0, 1.0), 1).region == 2

    @given(degenerate_models(delta_monotone=False), st.integers(0, 2**31))
    @settings(max_examples=60, deadline=None)
    def test_inventory_properties(self, m, seed):
        p = random_point(random.Random(seed), m.epsilon)
        ev = evaluate(m, p)
        inv = classify(ev, float(m.L0))
        count = {1: 1, 2: 0, 3: 1, 4: 0, 5: 1, 6: 1, 7: 2, 8: 2}[inv.region]
        assert len(inv.circles) == count
        assert inv.radii == sorted(inv.radii)
        for c in inv.circles:
            assert abs(rho_map(ev, c.radius) - c.radius) <= 1e-12 * max(1.0, c.radius)
            if c.stability is Stability.STABLE:
                assert c.multiplier < 1
            elif c.stability is Stability.UNSTABLE:
                assert c.multiplier > 1
        if len(inv.circles) == 2:
            inner, outer = inv.circles
            if m.L0 < 0:
                assert (inner.stability, outer.stability) == (Stability.UNSTABLE, Stability.STABLE)
            else:
                assert (inner.stability, outer.stability) == (Stability.STABLE, Stability.UNSTABLE)
        assert brute_force_circle_count(ev, float(m.L0)) == len(inv.circles)
