"""Per-cycle hazard-score trajectories for engines under a fitted model.

Scores use the preprocessing frozen at fit time.  Optional smoothing is a
causal (trailing) moving average, so the score at cycle t never depends
on later measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cox import CoxModel
from .errors import UsageError
from .ingest import Dataset, EngineRun


@dataclass(frozen=True)
class HazardTrajectory:
    """Log-partial-hazard score per cycle for one engine."""

    unit_key: str
    scores: tuple[float, ...]
    max_score: float
    failure_cycle: int

    def __post_init__(self):
        if len(self.scores) != self.failure_cycle:
            raise UsageError(
                f"unit {self.unit_key}: {len(self.scores)} scores for "
                f"failure cycle {self.failure_cycle}"
            )


def causal_moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing moving average over the last min(window, t) values."""
    if window < 1:
        raise UsageError(f"window must be >= 1, got {window}")
    if window == 1:
        return np.asarray(values, dtype=float)
    values = np.asarray(values, dtype=float)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    t = np.arange(1, len(values) + 1)
    lo = np.maximum(0, t - window)
    return (csum[t] - csum[lo]) / (t - lo)


def score_engine(
    model: CoxModel, engine: EngineRun, window: int = 1
) -> HazardTrajectory:
    """Score every cycle of an engine and record the trajectory maximum."""
    raw = engine.covariate_matrix()
    if raw.shape[1] != len(model.spec.kept_mask):
        raise UsageError(
            f"unit {engine.unit_key}: rows have {raw.shape[1]} covariates, "
            f"model expects {len(model.spec.kept_mask)}"
        )
    scores = model.spec.transform(raw) @ np.asarray(model.beta)
    smoothed = causal_moving_average(scores, window)
    return HazardTrajectory(
        unit_key=engine.unit_key,
        scores=tuple(float(s) for s in smoothed),
        max_score=float(smoothed.max()),
        failure_cycle=engine.failure_cycle,
    )


def score_dataset(
    model: CoxModel, dataset: Dataset, window: int = 1
) -> list[HazardTrajectory]:
    """One trajectory per engine, in dataset order."""
    out = []
    for engine in dataset.engines:
        try:
            out.append(score_engine(model, engine, window))
        except UsageError:
            raise
        except Exception as exc:  # attach the unit for context
            raise UsageError(f"unit {engine.unit_key}: {exc}") from exc
    return out


def trajectories_to_csv(trajectories: Sequence[HazardTrajectory]) -> str:
    """Long-format CSV `unit,cycle,score`."""
    lines = ["unit,cycle,score"]
    for tr in trajectories:
        for cycle, score in enumerate(tr.scores, start=1):
            lines.append(f"{tr.unit_key},{cycle},{score!r}")
    return "\n".join(lines) + "\n"


def trajectories_from_csv(text: str) -> list[HazardTrajectory]:
    """Parse the long-format CSV produced by :func:`trajectories_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "unit,cycle,score":
        raise UsageError("missing or wrong trajectory CSV header")
    by_unit: dict[str, list[float]] = {}
    order: list[str] = []
    for line in lines[1:]:
        unit, cycle, score = line.split(",")
        if unit not in by_unit:
            by_unit[unit] = []
            order.append(unit)
        if int(cycle) != len(by_unit[unit]) + 1:
            raise UsageError(f"unit {unit}: cycles out of order in CSV")
        by_unit[unit].append(float(score))
    return [
        HazardTrajectory(
            unit_key=unit,
            scores=tuple(by_unit[unit]),
            max_score=max(by_unit[unit]),
            failure_cycle=len(by_unit[unit]),
        )
        for unit in order
    ]


def summaries_to_csv(trajectories: Sequence[HazardTrajectory]) -> str:
    """Per-unit summary CSV `unit,max_score,failure_cycle`."""
    lines = ["unit,max_score,failure_cycle"]
    for tr in trajectories:
        lines.append(f"{tr.unit_key},{tr.max_score!r},{tr.failure_cycle}")
    return "\n".join(lines) + "\n"
