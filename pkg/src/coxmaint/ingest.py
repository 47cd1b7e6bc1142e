"""Ingestion of turbofan run-to-failure measurement files.

The distributed C-MAPSS text files are headerless, whitespace-separated,
26 numeric columns per row: unit id, cycle, 3 operational settings,
21 sensor measurements.  Rows for one unit are contiguous and ordered by
cycle.  Training trajectories run to failure, so a unit's last cycle is
its failure cycle.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import ParseError, StructureError, UsageError

N_OP_SETTINGS = 3
N_SENSORS = 21
N_COLUMNS = 2 + N_OP_SETTINGS + N_SENSORS

#: Names of the 24 covariate columns, in file order.
COVARIATE_NAMES = tuple(
    [f"os{i}" for i in range(1, N_OP_SETTINGS + 1)]
    + [f"s{i}" for i in range(1, N_SENSORS + 1)]
)

CSV_HEADER = "unit,cycle," + ",".join(COVARIATE_NAMES)

COMBINED_LABEL = "COMBINED"
SUBSET_LABELS = ("FD001", "FD002", "FD003", "FD004")


@dataclass(frozen=True)
class MeasurementRow:
    """One per-cycle row of operational settings and sensor readings."""

    unit_id: int
    cycle: int
    op_settings: tuple[float, ...]
    sensors: tuple[float, ...]

    def __post_init__(self):
        if self.unit_id < 1:
            raise StructureError(f"unit_id must be positive, got {self.unit_id}")
        if self.cycle < 1:
            raise StructureError(f"cycle must be >= 1, got {self.cycle}")
        if len(self.op_settings) != N_OP_SETTINGS or len(self.sensors) != N_SENSORS:
            raise StructureError(
                f"row for unit {self.unit_id} has "
                f"{len(self.op_settings)} settings / {len(self.sensors)} sensors"
            )

    def covariates(self) -> np.ndarray:
        """The 24 raw covariate values (settings then sensors)."""
        return np.asarray(self.op_settings + self.sensors, dtype=float)


@dataclass(frozen=True)
class EngineRun:
    """One engine's ordered run-to-failure measurement rows."""

    unit_key: str
    unit_id: int
    rows: tuple[MeasurementRow, ...]
    failure_cycle: int

    def __post_init__(self):
        if not self.rows:
            raise StructureError(f"unit {self.unit_key}: no rows")
        cycles = [r.cycle for r in self.rows]
        if cycles != list(range(1, len(cycles) + 1)):
            raise StructureError(
                f"unit {self.unit_key}: cycles must run 1..t with no gaps, got "
                f"{cycles[:5]}..."
            )
        if self.failure_cycle != cycles[-1]:
            raise StructureError(
                f"unit {self.unit_key}: failure_cycle {self.failure_cycle} "
                f"!= last cycle {cycles[-1]}"
            )

    @property
    def n_cycles(self) -> int:
        return len(self.rows)

    def covariate_matrix(self) -> np.ndarray:
        """(n_cycles, 24) matrix of raw covariates, one row per cycle."""
        return np.stack([r.covariates() for r in self.rows])


@dataclass(frozen=True)
class Dataset:
    """A labelled collection of engine runs with unique unit keys."""

    subset_label: str
    engines: tuple[EngineRun, ...]

    def __post_init__(self):
        keys = [e.unit_key for e in self.engines]
        if len(set(keys)) != len(keys):
            raise StructureError(
                f"dataset {self.subset_label}: duplicate unit keys"
            )

    @property
    def n_engines(self) -> int:
        return len(self.engines)


def _parse_line(line: str, line_number: int) -> tuple[int, int, tuple[float, ...]]:
    tokens = line.split()
    if len(tokens) != N_COLUMNS:
        raise ParseError(
            f"expected {N_COLUMNS} columns, got {len(tokens)}", line_number
        )
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"non-numeric token: {exc}", line_number) from None
    unit_f, cycle_f = values[0], values[1]
    if unit_f != int(unit_f) or cycle_f != int(cycle_f):
        raise ParseError(
            f"unit/cycle must be integers, got {unit_f} {cycle_f}", line_number
        )
    return int(unit_f), int(cycle_f), tuple(values[2:])


def parse_measurement_file(source: str | IO[str]) -> list[EngineRun]:
    """Parse a measurement text stream into one EngineRun per unit.

    ``source`` may be a text stream or the file content itself.  Blank
    lines are skipped; any run of spaces/tabs separates columns.
    """
    if isinstance(source, str):
        source = io.StringIO(source)

    runs: list[EngineRun] = []
    current_unit: int | None = None
    current_rows: list[MeasurementRow] = []
    seen_units: set[int] = set()

    def flush():
        if current_unit is None:
            return
        run = EngineRun(
            unit_key=str(current_unit),
            unit_id=current_unit,
            rows=tuple(current_rows),
            failure_cycle=current_rows[-1].cycle,
        )
        runs.append(run)

    for line_number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        unit_id, cycle, rest = _parse_line(line, line_number)
        if unit_id != current_unit:
            if unit_id in seen_units:
                raise StructureError(
                    f"unit {unit_id}: rows are not contiguous "
                    f"(reappears at line {line_number})"
                )
            flush()
            current_unit = unit_id
            current_rows = []
            seen_units.add(unit_id)
        row = MeasurementRow(
            unit_id=unit_id,
            cycle=cycle,
            op_settings=rest[:N_OP_SETTINGS],
            sensors=rest[N_OP_SETTINGS:],
        )
        current_rows.append(row)
    flush()
    return runs


def load_dataset(path: str | Path, subset_label: str) -> Dataset:
    """Load a measurement file from disk as a labelled Dataset."""
    path = Path(path)
    with path.open() as fh:
        runs = parse_measurement_file(fh)
    return Dataset(subset_label=subset_label, engines=tuple(runs))


def combine_datasets(datasets: Sequence[Dataset]) -> Dataset:
    """Concatenate datasets, re-keying units as '<label>:<id>'."""
    if not datasets:
        raise UsageError("combine_datasets requires at least one dataset")
    engines = []
    for ds in datasets:
        for run in ds.engines:
            engines.append(
                EngineRun(
                    unit_key=f"{ds.subset_label}:{run.unit_key}",
                    unit_id=run.unit_id,
                    rows=run.rows,
                    failure_cycle=run.failure_cycle,
                )
            )
    return Dataset(subset_label=COMBINED_LABEL, engines=tuple(engines))


def split_by_unit(
    dataset: Dataset, holdout_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Partition engines into disjoint train/holdout sets at unit level.

    Holdout size is round(fraction * n) clamped to [1, n - 1];
    deterministic for a given seed.
    """
    if not (0.0 < holdout_fraction < 1.0):
        raise UsageError(
            f"holdout_fraction must be in (0, 1), got {holdout_fraction}"
        )
    n = dataset.n_engines
    if n < 2:
        raise UsageError("split_by_unit needs at least 2 engines")
    n_holdout = int(round(holdout_fraction * n))
    n_holdout = max(1, min(n - 1, n_holdout))
    rng = np.random.default_rng(np.random.SeedSequence(abs(int(seed))))
    order = rng.permutation(n)
    holdout_idx = set(order[:n_holdout].tolist())
    train = tuple(e for i, e in enumerate(dataset.engines) if i not in holdout_idx)
    holdout = tuple(e for i, e in enumerate(dataset.engines) if i in holdout_idx)
    return (
        Dataset(subset_label=dataset.subset_label, engines=train),
        Dataset(subset_label=dataset.subset_label, engines=holdout),
    )


def dataset_to_csv(dataset: Dataset) -> str:
    """Render a dataset as canonical CSV (`unit,cycle,os1..os3,s1..s21`)."""
    lines = [CSV_HEADER]
    for run in dataset.engines:
        for row in run.rows:
            values = ",".join(repr(v) for v in row.op_settings + row.sensors)
            lines.append(f"{run.unit_key},{row.cycle},{values}")
    return "\n".join(lines) + "\n"


def dataset_from_csv(text: str, subset_label: str) -> Dataset:
    """Parse the canonical CSV produced by :func:`dataset_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError("missing or wrong CSV header", 1)
    by_unit: dict[str, list[MeasurementRow]] = {}
    order: list[str] = []
    for line_number, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != N_COLUMNS:
            raise ParseError(f"expected {N_COLUMNS} fields", line_number)
        unit_key = parts[0]
        try:
            cycle = int(parts[1])
            values = tuple(float(v) for v in parts[2:])
        except ValueError as exc:
            raise ParseError(str(exc), line_number) from None
        if unit_key not in by_unit:
            by_unit[unit_key] = []
            order.append(unit_key)
        numeric_id = int(unit_key) if unit_key.isdigit() else len(order)
        by_unit[unit_key].append(
            MeasurementRow(
                unit_id=numeric_id,
                cycle=cycle,
                op_settings=values[:N_OP_SETTINGS],
                sensors=values[N_OP_SETTINGS:],
            )
        )
    engines = []
    for key in order:
        rows = by_unit[key]
        engines.append(
            EngineRun(
                unit_key=key,
                unit_id=rows[0].unit_id,
                rows=tuple(rows),
                failure_cycle=rows[-1].cycle,
            )
        )
    return Dataset(subset_label=subset_label, engines=tuple(engines))
