import numpy as np
import pytest

from coxmaint.cox import SurvivalRecord
from coxmaint.ingest import (
    N_OP_SETTINGS,
    N_SENSORS,
    Dataset,
    EngineRun,
    MeasurementRow,
    parse_measurement_file,
)
from coxmaint.trajectory import HazardTrajectory


def synthetic_measurement_text(
    n_engines: int,
    seed: int,
    min_cycles: int = 15,
    max_cycles: int = 45,
    drift: float = 1.5,
) -> str:
    """Headerless 26-column text in the distributed file format.

    A handful of sensors carry a degradation trend rising toward
    failure, one sensor is constant (zero variance), the rest are noise.
    """
    rng = np.random.default_rng(seed)
    lines = []
    for unit in range(1, n_engines + 1):
        t_fail = int(rng.integers(min_cycles, max_cycles + 1))
        for t in range(1, t_fail + 1):
            frac = t / t_fail
            settings = rng.normal(0.0, 0.5, size=N_OP_SETTINGS)
            sensors = rng.normal(0.0, 1.0, size=N_SENSORS)
            sensors[0] = 100.0  # constant channel
            sensors[1] += drift * frac**2
            sensors[2] -= drift * frac
            sensors[3] += 0.8 * frac
            values = [unit, t, *settings, *sensors]
            lines.append(" ".join(f"{v:.6f}" if i >= 2 else str(int(v))
                                  for i, v in enumerate(values)) + " ")
    return "\n".join(lines) + "\n"


def synthetic_dataset(n_engines: int, seed: int, label: str = "FD001", **kw) -> Dataset:
    runs = parse_measurement_file(synthetic_measurement_text(n_engines, seed, **kw))
    return Dataset(subset_label=label, engines=tuple(runs))


def make_engine(unit_key: str, covariate_rows: np.ndarray) -> EngineRun:
    """Engine run with explicit 24-column covariate rows, one per cycle."""
    rows = []
    covariate_rows = np.asarray(covariate_rows, dtype=float)
    for t, row in enumerate(covariate_rows, start=1):
        rows.append(
            MeasurementRow(
                unit_id=1,
                cycle=t,
                op_settings=tuple(row[:N_OP_SETTINGS]),
                sensors=tuple(row[N_OP_SETTINGS:]),
            )
        )
    return EngineRun(
        unit_key=unit_key,
        unit_id=1,
        rows=tuple(rows),
        failure_cycle=len(rows),
    )


def random_survival_records(
    rng: np.random.Generator, n_max: int = 20, d_max: int = 4
) -> list[SurvivalRecord]:
    """Small random right-censored dataset for derivative checks."""
    n = int(rng.integers(3, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    records = []
    for i in range(n):
        stop = int(rng.integers(1, 12))
        event = bool(rng.random() < 0.8)
        x = rng.normal(0.0, 1.0, size=d)
        records.append(
            SurvivalRecord(
                unit_key=f"u{i}",
                start=0,
                stop=stop,
                event=event,
                covariates=tuple(float(v) for v in x),
            )
        )
    if not any(r.event for r in records):
        records[0] = SurvivalRecord(
            records[0].unit_key, 0, records[0].stop, True, records[0].covariates
        )
    return records


def make_trajectory(unit_key: str, scores) -> HazardTrajectory:
    scores = tuple(float(s) for s in scores)
    return HazardTrajectory(
        unit_key=unit_key,
        scores=scores,
        max_score=max(scores),
        failure_cycle=len(scores),
    )


@pytest.fixture
def three_subject_records() -> list[SurvivalRecord]:
    """A(x=0, event t=1), B(x=1, event t=2), C(x=0, event t=3)."""
    return [
        SurvivalRecord("A", 0, 1, True, (0.0,)),
        SurvivalRecord("B", 0, 2, True, (1.0,)),
        SurvivalRecord("C", 0, 3, True, (0.0,)),
    ]
