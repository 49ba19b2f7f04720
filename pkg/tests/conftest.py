import random
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import strategies as st

from chenciner.normal_form import NormalFormModel, TaylorSeries2D
from chenciner.verify import random_degenerate_model

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
DATA = Path(__file__).resolve().parent / "data"


def make_ex1(radius=F(1, 10)):
    s = {(1, 0): 1, (0, 1): 1}
    return NormalFormModel(TaylorSeries2D(s), TaylorSeries2D(s), TaylorSeries2D(), -1, F(1, 10), radius)


def make_ex1a(radius=F(1, 10), L0=-1):
    beta1 = TaylorSeries2D({(1, 0): 1, (0, 1): 1, (2, 0): -1, (1, 1): -2, (0, 2): -1})
    beta2 = TaylorSeries2D({(1, 0): 2, (0, 1): 2, (2, 0): 1})
    return NormalFormModel(beta1, beta2, TaylorSeries2D(), L0, F(1, 10), radius)


def make_mirror(radius=F(1, 10)):
    """ex1a with beta1, beta2, L0 negated: same curves, L0 > 0."""
    m = make_ex1a(radius)
    return NormalFormModel(m.beta1.scale(-1), m.beta2.scale(-1), TaylorSeries2D(), 1, F(1, 10), radius)


@pytest.fixture
def ex1():
    return make_ex1()


@pytest.fixture
def ex1a():
    return make_ex1a()


@pytest.fixture
def ex1a_wide():
    return make_ex1a(radius=1)


@pytest.fixture
def mirror():
    return make_mirror()


@pytest.fixture
def config_dir():
    return CONFIGS


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def degenerate_models(draw, **kwargs):
    return random_degenerate_model(random.Random(draw(seeds)), **kwargs)


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase outcome to fixtures (used by the acceptance report)
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
