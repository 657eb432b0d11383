import numpy as np
import pytest
from hypothesis import strategies as st

from gradinv.core import AttackGraph, WeightedFramework

EXAMPLE_ARGS = ("a0", "a1", "a2", "a3")
EXAMPLE_ATTACKS = (("a0", "a2"), ("a1", "a1"), ("a1", "a2"), ("a2", "a2"), ("a3", "a2"))
EXAMPLE_WEIGHTS = {"a0": 0.43, "a1": 0.39, "a2": 0.92, "a3": 0.30}

# worked example: expected degrees and ranking rows, most preferred first
EXAMPLE_RESULTS = {
    "TB": ((0.43, 0.39, 0.50, 0.30), [["a2"], ["a0"], ["a1"], ["a3"]]),
    "IS": ((1.00, 0.50, 0.00, 1.00), [["a0", "a3"], ["a1"], ["a2"]]),
    "MB": ((0.43, 0.30, 0.58, 0.30), [["a2"], ["a0"], ["a1", "a3"]]),
    "HC": ((0.43, 0.30, 0.38, 0.30), [["a0"], ["a2"], ["a1", "a3"]]),
    "CB": ((0.43, 0.18, 0.17, 0.30), [["a0"], ["a3"], ["a1"], ["a2"]]),
}


@pytest.fixture
def example():
    return WeightedFramework(EXAMPLE_ARGS, EXAMPLE_ATTACKS, EXAMPLE_WEIGHTS)


def random_framework(rng, n, density, low=0.0, high=1.0):
    args = tuple(f"x{i}" for i in range(n))
    hit = rng.random((n, n)) < density
    attacks = tuple((args[i], args[j]) for i, j in zip(*np.nonzero(hit)))
    weights = dict(zip(args, rng.uniform(low, high, size=n)))
    return WeightedFramework(args, attacks, weights)


@st.composite
def frameworks(draw, max_n=7, min_weight=0.0):
    n = draw(st.integers(1, max_n))
    args = tuple(f"x{i}" for i in range(n))
    pairs = [(a, b) for a in args for b in args]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    weights = draw(st.lists(st.floats(min_weight, 1.0, allow_nan=False), min_size=n, max_size=n))
    return WeightedFramework(args, tuple(chosen), dict(zip(args, weights)))


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    args = tuple(f"x{i}" for i in range(n))
    pairs = [(a, b) for a in args for b in args]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return AttackGraph(args, tuple(chosen))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
