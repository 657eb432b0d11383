import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradinv.core import DegreeAssignment, Semantics, WeightedFramework, induced_ranking
from gradinv.errors import ArgumentIdError, ValidationError
from gradinv.semantics import IterationConfig, Kernel, evaluate, snap_is, step

from conftest import EXAMPLE_ARGS, EXAMPLE_RESULTS, frameworks, random_framework
from reference import GOLDEN_RATIO_CONJUGATE, naive_fixed_point

TIGHT = IterationConfig(1e-13, 200_000)


def test_config_validation():
    with pytest.raises(ValidationError):
        IterationConfig(0.0)
    with pytest.raises(ValidationError):
        IterationConfig(1e-9, 0)


def test_step_hc_isolated():
    f = WeightedFramework(("a",), (), {"a": 0.7})
    assert step(f, "HC", {"a": 0.123})["a"] == 0.7


def test_step_mb_example(example):
    out = step(example, "MB", example.weights)
    assert out["a2"] == pytest.approx(0.92 / 1.92, abs=1e-12)
    assert out["a2"] == pytest.approx(0.4792, abs=5e-5)


def test_step_tb_single_attacker():
    f = WeightedFramework(("a", "b"), (("b", "a"),), {"a": 0.4, "b": 0.9})
    out = step(f, "TB", {"a": 0.4, "b": 0.9})
    assert out["a"] == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("sem", sorted(EXAMPLE_RESULTS))
def test_example_degrees(example, sem):
    res = evaluate(example, sem)
    assert res.converged
    expected, _ = EXAMPLE_RESULTS[sem]
    assert res.degrees.as_array() == pytest.approx(expected, abs=5e-3)


@pytest.mark.parametrize("sem", sorted(EXAMPLE_RESULTS))
def test_example_rankings(example, sem):
    res = evaluate(example, sem)
    _, levels = EXAMPLE_RESULTS[sem]
    got = [sorted(level) for level in induced_ranking(res.degrees).levels]
    assert got == levels


def test_hc_mutual_pair_golden_ratio():
    f = WeightedFramework(("a", "b"), (("a", "b"), ("b", "a")), {"a": 1.0, "b": 1.0})
    res = evaluate(f, "HC")
    assert res.degrees.as_array() == pytest.approx([GOLDEN_RATIO_CONJUGATE] * 2, abs=1e-6)
    assert GOLDEN_RATIO_CONJUGATE == pytest.approx(0.6180, abs=1e-4)


@pytest.mark.parametrize("w", [0.5, 0.6, 0.8, 1.0])
def test_tb_three_cycle_plateau(w):
    f = WeightedFramework(("a", "b", "c"), (("a", "b"), ("b", "c"), ("c", "a")), dict.fromkeys("abc", w))
    res = evaluate(f, "TB")
    assert res.converged
    assert res.degrees.as_array() == pytest.approx([0.5] * 3, abs=1e-6)


def test_tb_low_weights_are_fixed():
    rng = np.random.default_rng(3)
    for _ in range(30):
        f = random_framework(rng, int(rng.integers(1, 9)), 0.4, 0.0, 0.4999)
        res = evaluate(f, "TB")
        assert np.array_equal(res.degrees.as_array(), f.weight_array)


def test_nonconvergence_is_reported(example):
    res = evaluate(example, "HC", IterationConfig(1e-15, 2))
    assert not res.converged and res.iterations_used == 2


def test_is_snapping():
    vals = np.array([0.99995, 0.50002, 4e-5, 0.3])
    assert snap_is(vals).tolist() == [1.0, 0.5, 0.0, 0.3]


def test_cb_attackers_with_zero_weight_are_ignored():
    f = WeightedFramework(("a", "b"), (("b", "a"),), {"a": 0.6, "b": 0.0})
    assert evaluate(f, "CB").degrees["a"] == 0.6


def test_empty_framework():
    f = WeightedFramework((), (), {})
    res = evaluate(f, "HC")
    assert res.converged and len(res.degrees) == 0


@settings(max_examples=80, deadline=None)
@given(frameworks(max_n=6), st.sampled_from(["HC", "MB", "CB", "TB"]))
def test_matches_reference_evaluator(f, sem):
    ours = evaluate(f, sem, TIGHT).degrees
    ref = naive_fixed_point(sem, f.arguments, f.attacks, f.weights)
    for a in f.arguments:
        assert ours[a] == pytest.approx(ref[a], abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(frameworks(max_n=5))
def test_iterative_schema_matches_reference(f):
    ours = evaluate(f, "IS", TIGHT)
    if not ours.converged:
        return
    ref = naive_fixed_point("IS", f.arguments, f.attacks, f.weights)
    for a in f.arguments:
        assert ours.degrees[a] == pytest.approx(ref[a], abs=2e-4)


@settings(max_examples=60, deadline=None)
@given(frameworks(max_n=7), st.sampled_from(list(Semantics)))
def test_iterates_stay_in_unit_interval(f, sem):
    kern = Kernel.for_framework(f, sem)
    x = f.weight_array
    for _ in range(200):
        x = kern.step(x)
        assert np.all(x >= 0.0) and np.all(x <= 1.0)


@settings(max_examples=40, deadline=None)
@given(frameworks(max_n=7), st.sampled_from(list(Semantics)))
def test_deterministic(f, sem):
    a = evaluate(f, sem).degrees.as_array()
    b = evaluate(f, sem).degrees.as_array()
    assert a.tobytes() == b.tobytes()


@settings(max_examples=60, deadline=None)
@given(frameworks(max_n=7), st.sampled_from(["MB", "HC", "CB", "TB"]))
def test_unattacked_keep_their_weight(f, sem):
    res = evaluate(f, sem, TIGHT).degrees
    for a in f.arguments:
        if f.attackers(a):
            continue
        if sem == "TB" and f.weights[a] > 0.5:
            continue
        assert res[a] == pytest.approx(f.weights[a], abs=1e-9)


def _bump_trials(rng, count, delta):
    for _ in range(count):
        n = int(rng.integers(2, 12))
        f = random_framework(rng, n, float(rng.uniform(0.05, 0.6)), 0.0, 1.0 - delta)
        a = f.arguments[int(rng.integers(n))]
        yield f, a, f.with_weight(a, f.weights[a] + delta)


@pytest.mark.parametrize("sem", ["MB", "HC", "CB"])
@pytest.mark.parametrize("delta", [0.01, 0.1])
def test_strong_monotonicity_sample(sem, delta):
    rng = np.random.default_rng(11)
    for f, a, g in _bump_trials(rng, 60, delta):
        assert evaluate(g, sem, TIGHT).degrees[a] > evaluate(f, sem, TIGHT).degrees[a]


@pytest.mark.parametrize("sem", ["MB", "HC", "CB"])
def test_uniqueness_sample(sem):
    rng = np.random.default_rng(12)
    for _ in range(60):
        n = int(rng.integers(2, 10))
        f = random_framework(rng, n, 0.35)
        a = f.arguments[int(rng.integers(n))]
        other = float(rng.uniform(0, 1))
        if abs(other - f.weights[a]) < 0.05:
            other = (f.weights[a] + 0.5) % 1.0
        g = f.with_weight(a, other)
        assert abs(evaluate(g, sem, TIGHT).degrees[a] - evaluate(f, sem, TIGHT).degrees[a]) > 1e-9


@pytest.mark.parametrize("sem", ["MB", "HC", "CB"])
def test_continuity_sample(sem):
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = int(rng.integers(2, 10))
        f = random_framework(rng, n, 0.35, 0.0, 0.999)
        a = f.arguments[int(rng.integers(n))]
        for delta in (1e-4, 1e-5, 1e-6):
            base = evaluate(f, sem, TIGHT).degrees.as_array()
            moved = evaluate(f.with_weight(a, f.weights[a] + delta), sem, TIGHT).degrees.as_array()
            assert np.max(np.abs(moved - base)) <= 10 * delta


def complete_framework(rng, n):
    args = tuple(f"x{i}" for i in range(n))
    attacks = tuple((a, b) for a in args for b in args)
    return WeightedFramework(args, attacks, dict(zip(args, rng.uniform(0, 1, size=n))))


@pytest.mark.parametrize("sem", ["MB", "HC", "CB"])
def test_fully_connected_order_sample(sem):
    rng = np.random.default_rng(14)
    for _ in range(25):
        f = complete_framework(rng, int(rng.integers(1, 21)))
        deg = evaluate(f, sem, TIGHT).degrees.as_array()
        assert np.array_equal(np.argsort(-deg, kind="stable"), np.argsort(-f.weight_array, kind="stable"))


def test_step_rejects_partial_current(example):
    with pytest.raises(ArgumentIdError):
        step(example, "HC", {"a0": 0.1})


def test_evaluate_accepts_warm_start(example):
    cold = evaluate(example, "HC", TIGHT).degrees.as_array()
    warm = evaluate(example, "HC", TIGHT, start=np.full(4, 0.9)).degrees.as_array()
    assert warm == pytest.approx(cold, abs=1e-11)
    assert isinstance(evaluate(example, "HC").degrees, DegreeAssignment)
    assert math.isclose(cold[0], 0.43)
