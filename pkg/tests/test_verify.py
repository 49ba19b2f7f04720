import json
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from chenciner import cli
from chenciner.normal_form import Degeneracy, NormalFormModel, TaylorSeries2D, check_degeneracy
from chenciner.verify import (
    PROPERTIES,
    PropertyResult,
    admissible_radius,
    delta_leading_ratios,
    majorant,
    quadratic_part_max,
    random_coefficient,
    random_degenerate_model,
    random_models,
    random_point,
    run_properties,
)

from conftest import CONFIGS, degenerate_models


class TestGenerator:
    def test_seeded_reproducible(self):
        assert random_models(5, seed=11) == random_models(5, seed=11)
        assert random_models(5, seed=11) != random_models(5, seed=12)

    def test_coefficients_on_grid(self):
        rng = random.Random(0)
        for _ in range(200):
            c = random_coefficient(rng)
            assert -2 <= c <= 2 and (c * 100).denominator == 1

    @given(degenerate_models())
    @settings(max_examples=50, deadline=None)
    def test_models_are_degenerate(self, m):
        assert check_degeneracy(m) is Degeneracy.DEGENERATE
        assert min(abs(m.L0), abs(m.a01), abs(m.b01)) >= F(1, 10)

    @given(degenerate_models())
    @settings(max_examples=50, deadline=None)
    def test_radius_guarantees(self, m):
        r = float(m.epsilon)
        assert majorant(m.l2, r) <= 0.5 * abs(float(m.L0))
        assert admissible_radius(m) == m.validity_radius
        assert (m.validity_radius * 10).numerator == 1

    @pytest.mark.parametrize("case", [1, 2])
    def test_case_forcing(self, case):
        for m in random_models(10, seed=case, case=case):
            assert (m.L0 * m.a01 > 0) == (case == 1)

    def test_random_point_inside(self):
        rng = random.Random(1)
        for _ in range(500):
            a1, a2 = random_point(rng, 0.01)
            assert math.hypot(a1, a2) <= 0.0095


class TestDeltaLeading:
    def test_ex1a_remainder_is_cubic(self, ex1a):
        # with s = a1 + a2: Delta = 4 s + 4 s a1^2 + a1^4, so the remainder has no quadratic part
        assert quadratic_part_max(ex1a) == 0.0
        ratios = delta_leading_ratios(ex1a)
        for big, small in zip(ratios, ratios[1:]):
            assert small == pytest.approx(big / 10, rel=1e-2)

    def test_ex1_remainder_is_quadratic(self, ex1):
        # Delta = s^2 + 4 s: remainder s^2, maximal value 2 r^2 on the circle
        ratios = delta_leading_ratios(ex1)
        assert quadratic_part_max(ex1) == pytest.approx(2.0)
        assert ratios == pytest.approx([2.0] * 3, rel=1e-9)


class TestRunProperties:
    def test_all_pass_on_seeded_models(self):
        results = run_properties(random_models(30, seed=5), seed=5)
        assert [r.name for r in results] == list(PROPERTIES)
        for r in results:
            assert r.passed, (r.name, r.failures[:1])
            assert r.checked == 30

    def test_subset(self, ex1a):
        results = run_properties([ex1a], names=["case_split"])
        assert len(results) == 1 and results[0].passed

    def test_errors_become_failures(self):
        # not degenerate: the curve properties raise and must be recorded
        m = NormalFormModel(TaylorSeries2D({(1, 0): 1}), TaylorSeries2D({(0, 1): 1}), TaylorSeries2D(), -1)
        (res,) = run_properties([m], names=["c_curve_identities"])
        assert not res.passed
        assert "error" in res.failures[0]

    def test_counterexample_written(self, tmp_path, monkeypatch, capsys):
        def fake(models, seed=0, names=None):
            res = PropertyResult("c_curve_identities", checked=1)
            res.fail(0, m2="1", c2="2")
            return [res]

        monkeypatch.setattr(cli, "run_properties", fake)
        rc = cli.main(["verify", str(CONFIGS / "ex1a.json"), "--out", str(tmp_path)])
        assert rc == 1
        dump = json.loads((tmp_path / "counterexample.json").read_text())
        assert dump["property"] == "c_curve_identities"
        assert dump["model"]["L0"] == "-1"
        assert "FAIL" in capsys.readouterr().out


def test_unresolvable_monotonicity_is_skipped():
    # model 16 of seed 1 has beta2 ~ -2e-8 on B1: the step is below one ulp of rho
    m = random_models(20, seed=1)[16]
    (res,) = run_properties([m], names=["monotonicity"])
    assert res.passed and res.skipped >= 1
