import random

import pytest
from hypothesis import settings, strategies as st

from multibisim.textfmt import parse_system
from multibisim.verify.fixtures import SYSTEMS
from multibisim.verify.generate import GenParams, random_bundle, random_system

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def worked():
    """The worked example systems, parsed."""
    return {k: parse_system(v) for k, v in SYSTEMS.items()}


seeds = st.integers(min_value=0, max_value=2**32)
kinds = st.sampled_from(["lts", "mts", "pmts", "dts", "alt-mts", "alt-gts"])
shapes = st.sampled_from(["set", "multiset", "m1", "dist"])


@st.composite
def systems(draw, kind=None, max_states=5):
    kind = kind or draw(kinds)
    rng = random.Random(draw(seeds))
    return random_system(rng, kind, GenParams(max_states=max_states), "g")


@st.composite
def bundles(draw, shape=None, targets=("x0", "x1", "x2"), labels="ab"):
    shape = shape or draw(shapes)
    rng = random.Random(draw(seeds))
    return random_bundle(rng, shape, list(targets), list(labels), GenParams(), terminal_chance=0.1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
