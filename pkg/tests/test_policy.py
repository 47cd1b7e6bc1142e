import numpy as np
import pytest

from coxmaint.errors import UsageError
from coxmaint.policy import (
    FLY,
    MAINTAIN,
    CostParams,
    decide,
    evaluate_policy,
    evaluations_to_csv,
)

from conftest import make_trajectory

COSTS = CostParams(restoration_cost=3.5e6, replacement_cost=4.0e6)


def brute_force_evaluation(trajectories, threshold, costs):
    """Independent oracle: walk each engine cycle by cycle, stop at the
    first maintain decision; engines never maintained run to failure."""
    maintained = 0
    failed = 0
    for tr in trajectories:
        for score in tr.scores:
            if decide(score, threshold) == MAINTAIN:
                maintained += 1
                break
        else:
            failed += 1
    total = maintained * costs.restoration_cost + failed * costs.replacement_cost
    return maintained, failed, total


def test_decide_below():
    assert decide(5.0, 6.0) == FLY


def test_decide_above():
    assert decide(9.0, 6.0) == MAINTAIN


def test_decide_boundary_inclusive():
    assert decide(6.0, 6.0) == MAINTAIN


def test_cost_params_validation():
    with pytest.raises(UsageError):
        CostParams(4.0e6, 3.5e6)
    with pytest.raises(UsageError):
        CostParams(0.0, 1.0)


def test_evaluate_three_engine_example():
    trajectories = [
        make_trajectory("a", [1.0, 2.0]),
        make_trajectory("b", [5.0, 4.0]),
        make_trajectory("c", [3.0, 9.0]),
    ]
    ev = evaluate_policy(trajectories, 6.0, COSTS)
    assert ev.maintained_count == 1
    assert ev.failed_count == 2
    assert ev.total_cost == pytest.approx(1.15e7)
    assert ev.failure_probability == pytest.approx(2 / 3)


def test_evaluate_all_maintained_below_min():
    trajectories = [make_trajectory(f"u{i}", [i + 1.0]) for i in range(5)]
    ev = evaluate_policy(trajectories, 0.0, COSTS)
    assert ev.total_cost == 5 * COSTS.restoration_cost
    assert ev.failure_probability == 0.0


def test_evaluate_none_maintained_above_max():
    trajectories = [make_trajectory(f"u{i}", [i + 1.0]) for i in range(5)]
    ev = evaluate_policy(trajectories, 100.0, COSTS)
    assert ev.total_cost == 5 * COSTS.replacement_cost
    assert ev.failure_probability == 1.0


def test_evaluate_empty_is_usage_error():
    with pytest.raises(UsageError):
        evaluate_policy([], 1.0, COSTS)


@pytest.mark.parametrize("seed", range(25))
def test_evaluate_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    trajectories = [
        make_trajectory(f"u{i}", rng.normal(size=rng.integers(1, 30)))
        for i in range(rng.integers(1, 15))
    ]
    for threshold in rng.normal(scale=2.0, size=8):
        ev = evaluate_policy(trajectories, threshold, COSTS)
        maintained, failed, total = brute_force_evaluation(
            trajectories, threshold, COSTS
        )
        assert ev.maintained_count == maintained
        assert ev.failed_count == failed
        assert ev.total_cost == total


@pytest.mark.parametrize("seed", range(10))
def test_monotonicity_in_threshold(seed):
    rng = np.random.default_rng(500 + seed)
    trajectories = [
        make_trajectory(f"u{i}", rng.normal(size=10)) for i in range(12)
    ]
    grid = np.linspace(-4, 4, 33)
    evals = [evaluate_policy(trajectories, lam, COSTS) for lam in grid]
    maintained = [e.maintained_count for e in evals]
    probs = [e.failure_probability for e in evals]
    n = len(trajectories)
    c1, c2 = COSTS.restoration_cost, COSTS.replacement_cost
    assert all(b <= a for a, b in zip(maintained, maintained[1:]))
    assert all(b >= a for a, b in zip(probs, probs[1:]))
    for e in evals:
        assert e.total_cost == n * c2 - e.maintained_count * (c2 - c1)


def test_evaluations_csv():
    trajectories = [make_trajectory("a", [2.0])]
    text = evaluations_to_csv([evaluate_policy(trajectories, 1.0, COSTS)])
    lines = text.strip().splitlines()
    assert lines[0] == "lambda,maintained,failed,cost,failure_prob"
    assert lines[1].startswith("1.0,1,0,")
