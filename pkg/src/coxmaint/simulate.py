"""Threshold sweeps with bootstrap resampling and strategy comparison.

The threshold grid is swept either deterministically over the full fleet
or under bootstrap resampling (sample_size engines drawn with
replacement, one independent substream per replication), producing mean
and one-sigma bands for total cost and failure probability.  The
selected threshold minimizes mean cost, ties broken toward the smallest
(safest) value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import UsageError
from .policy import CostParams, PolicyEvaluation, evaluate_policy
from .trajectory import HazardTrajectory


@dataclass(frozen=True)
class LambdaGrid:
    lambda_min: float
    lambda_max: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise UsageError(f"grid step must be positive, got {self.step}")
        if not self.lambda_min < self.lambda_max:
            raise UsageError("grid requires lambda_min < lambda_max")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.lambda_max - self.lambda_min) / self.step + 1e-9))
        return self.lambda_min + self.step * np.arange(n + 1)


@dataclass(frozen=True)
class SimulationConfig:
    sample_size: int
    replications: int
    seed: int
    grid: LambdaGrid

    def __post_init__(self):
        if self.sample_size < 1:
            raise UsageError("sample_size must be >= 1")
        if self.replications < 1:
            raise UsageError("replications must be >= 1")


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    cost_mean: float
    cost_std: float
    prob_mean: float
    prob_std: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    optimal_lambda: float
    optimal_cost_mean: float
    optimal_prob_mean: float


def default_grid(
    trajectories: Sequence[HazardTrajectory], step: float = 0.5
) -> LambdaGrid:
    """Data-driven grid spanning past both boundary policies."""
    if not trajectories:
        raise UsageError("default_grid requires at least one trajectory")
    maxima = [tr.max_score for tr in trajectories]
    return LambdaGrid(
        lambda_min=math.floor(min(maxima)) - 1.0,
        lambda_max=math.ceil(max(maxima)) + 1.0,
        step=step,
    )


def deterministic_sweep(
    trajectories: Sequence[HazardTrajectory],
    grid: LambdaGrid,
    costs: CostParams,
) -> list[tuple[float, PolicyEvaluation]]:
    """Evaluate the full fleet at every grid threshold."""
    if not trajectories:
        raise UsageError("deterministic_sweep requires trajectories")
    values = grid.values()
    if values.size == 0:
        raise UsageError("grid yields no points")
    return [(float(v), evaluate_policy(trajectories, float(v), costs)) for v in values]


def _replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Independent, scheduling-agnostic substream per replication."""
    entropy = (abs(int(seed)), int(replication))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _sweep_counts(max_scores: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """Number of engines with max score >= lambda, per grid point."""
    ordered = np.sort(max_scores)
    return len(ordered) - np.searchsorted(ordered, lambdas, side="left")


def bootstrap_sweep(
    trajectories: Sequence[HazardTrajectory],
    config: SimulationConfig,
    costs: CostParams,
) -> SweepResult:
    """Grid sweep under bootstrap resampling of engines.

    Each replication r draws ``sample_size`` engines with replacement
    from a substream derived from (seed, r); per-threshold means and
    population standard deviations are taken over the replications.
    """
    if not trajectories:
        raise UsageError("bootstrap_sweep requires trajectories")
    lambdas = config.grid.values()
    if lambdas.size == 0:
        raise UsageError("grid yields no points")
    max_scores = np.array([tr.max_score for tr in trajectories])
    n = len(max_scores)
    c1, c2 = costs.restoration_cost, costs.replacement_cost

    cost_rows = np.empty((config.replications, lambdas.size))
    prob_rows = np.empty((config.replications, lambdas.size))
    for r in range(1, config.replications + 1):
        rng = _replication_rng(config.seed, r)
        sample = max_scores[rng.integers(0, n, size=config.sample_size)]
        maintained = _sweep_counts(sample, lambdas)
        failed = config.sample_size - maintained
        cost_rows[r - 1] = maintained * c1 + failed * c2
        prob_rows[r - 1] = failed / config.sample_size

    points = tuple(
        SweepPoint(
            threshold=float(lam),
            cost_mean=float(cost_rows[:, j].mean()),
            cost_std=float(cost_rows[:, j].std()),
            prob_mean=float(prob_rows[:, j].mean()),
            prob_std=float(prob_rows[:, j].std()),
        )
        for j, lam in enumerate(lambdas)
    )
    optimal = select_threshold(points)
    chosen = next(p for p in points if p.threshold == optimal)
    return SweepResult(
        points=points,
        optimal_lambda=optimal,
        optimal_cost_mean=chosen.cost_mean,
        optimal_prob_mean=chosen.prob_mean,
    )


def select_threshold(points: Sequence[SweepPoint]) -> float:
    """Smallest threshold attaining the minimum mean cost."""
    if not points:
        raise UsageError("select_threshold requires points")
    best = min(p.cost_mean for p in points)
    return min(p.threshold for p in points if p.cost_mean == best)


@dataclass(frozen=True)
class SubsetComparison:
    label: str
    directed_lambda: float
    directed_cost: float
    generic_cost: float


@dataclass(frozen=True)
class ComparisonReport:
    """Directed (per-subset thresholds) vs generic (one combined threshold)."""

    generic_lambda: float
    directed_total: float
    generic_total: float
    savings_pct: float
    per_subset: tuple[SubsetComparison, ...]


def compare_directed_vs_generic(
    per_subset_results: Mapping[str, SweepResult],
    combined_result: SweepResult,
    per_subset_trajectories: Mapping[str, Sequence[HazardTrajectory]],
    costs: CostParams,
) -> ComparisonReport:
    """Total deterministic cost of per-subset optimal thresholds vs the
    combined threshold applied everywhere.

    Each subset's directed threshold is the deterministic cost minimizer
    over its own grid augmented with the generic threshold, so
    directed_total <= generic_total holds exactly.
    """
    if set(per_subset_results) != set(per_subset_trajectories):
        raise UsageError(
            "per_subset_results and per_subset_trajectories name different subsets"
        )
    generic_lambda = combined_result.optimal_lambda

    rows = []
    directed_total = 0.0
    generic_total = 0.0
    for label in sorted(per_subset_trajectories):
        trajectories = per_subset_trajectories[label]
        if not trajectories:
            raise UsageError(f"subset {label}: no trajectories")
        lambdas = sorted(
            {p.threshold for p in per_subset_results[label].points}
            | {generic_lambda}
        )
        evals = {
            lam: evaluate_policy(trajectories, lam, costs) for lam in lambdas
        }
        best_cost = min(ev.total_cost for ev in evals.values())
        directed_lambda = min(
            lam for lam, ev in evals.items() if ev.total_cost == best_cost
        )
        generic_cost = evals[generic_lambda].total_cost
        directed_total += best_cost
        generic_total += generic_cost
        rows.append(
            SubsetComparison(
                label=label,
                directed_lambda=directed_lambda,
                directed_cost=best_cost,
                generic_cost=generic_cost,
            )
        )
    savings = (
        100.0 * (generic_total - directed_total) / generic_total
        if generic_total > 0
        else 0.0
    )
    return ComparisonReport(
        generic_lambda=generic_lambda,
        directed_total=directed_total,
        generic_total=generic_total,
        savings_pct=savings,
        per_subset=tuple(rows),
    )


def sweep_to_csv(result: SweepResult) -> str:
    """CSV `lambda,cost_mean,cost_std,prob_mean,prob_std`."""
    lines = ["lambda,cost_mean,cost_std,prob_mean,prob_std"]
    for p in result.points:
        lines.append(
            f"{p.threshold!r},{p.cost_mean!r},{p.cost_std!r},"
            f"{p.prob_mean!r},{p.prob_std!r}"
        )
    return "\n".join(lines) + "\n"


def sweep_from_csv(text: str) -> SweepResult:
    """Parse the CSV produced by :func:`sweep_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "lambda,cost_mean,cost_std,prob_mean,prob_std":
        raise UsageError("missing or wrong sweep CSV header")
    points = []
    for line in lines[1:]:
        lam, cm, cs, pm, ps = (float(v) for v in line.split(","))
        points.append(SweepPoint(lam, cm, cs, pm, ps))
    if not points:
        raise UsageError("sweep CSV has no data rows")
    optimal = select_threshold(points)
    chosen = next(p for p in points if p.threshold == optimal)
    return SweepResult(
        points=tuple(points),
        optimal_lambda=optimal,
        optimal_cost_mean=chosen.cost_mean,
        optimal_prob_mean=chosen.prob_mean,
    )


def comparison_to_json(report: ComparisonReport) -> str:
    doc = {
        "generic_lambda": report.generic_lambda,
        "directed_total": report.directed_total,
        "generic_total": report.generic_total,
        "savings_pct": report.savings_pct,
        "per_subset": [
            {
                "label": row.label,
                "directed_lambda": row.directed_lambda,
                "directed_cost": row.directed_cost,
                "generic_cost": row.generic_cost,
            }
            for row in report.per_subset
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
