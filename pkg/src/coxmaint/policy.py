"""Threshold decision rule and cost/safety functionals.

An engine whose trajectory maximum reaches the threshold gets preventive
restoration (cost C1); one that never reaches it runs to failure and
needs replacement (cost C2 > C1).  The boundary is inclusive: a score
equal to the threshold triggers maintenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UsageError
from .trajectory import HazardTrajectory

FLY = "fly"
MAINTAIN = "maintain"


@dataclass(frozen=True)
class CostParams:
    """Preventive restoration cost and reactive replacement cost."""

    restoration_cost: float
    replacement_cost: float

    def __post_init__(self):
        if not 0 < self.restoration_cost < self.replacement_cost:
            raise UsageError(
                "costs must satisfy 0 < restoration_cost < replacement_cost, "
                f"got {self.restoration_cost} and {self.replacement_cost}"
            )


@dataclass(frozen=True)
class PolicyEvaluation:
    """Outcome of applying one threshold to a fixed set of trajectories."""

    threshold: float
    maintained_count: int
    failed_count: int
    total_cost: float
    failure_probability: float


def decide(score: float, threshold: float) -> str:
    """Preflight decision: maintain iff the hazard score reaches the threshold."""
    return MAINTAIN if score >= threshold else FLY


def evaluate_policy(
    trajectories: Sequence[HazardTrajectory],
    threshold: float,
    costs: CostParams,
) -> PolicyEvaluation:
    """Count maintained vs failed engines and total the resulting cost."""
    if not trajectories:
        raise UsageError("evaluate_policy requires at least one trajectory")
    maintained = sum(1 for tr in trajectories if tr.max_score >= threshold)
    failed = len(trajectories) - maintained
    total = maintained * costs.restoration_cost + failed * costs.replacement_cost
    return PolicyEvaluation(
        threshold=threshold,
        maintained_count=maintained,
        failed_count=failed,
        total_cost=total,
        failure_probability=failed / len(trajectories),
    )


def evaluations_to_csv(evaluations: Sequence[PolicyEvaluation]) -> str:
    """CSV row per evaluated threshold."""
    lines = ["lambda,maintained,failed,cost,failure_prob"]
    for ev in evaluations:
        lines.append(
            f"{ev.threshold!r},{ev.maintained_count},{ev.failed_count},"
            f"{ev.total_cost!r},{ev.failure_probability!r}"
        )
    return "\n".join(lines) + "\n"
