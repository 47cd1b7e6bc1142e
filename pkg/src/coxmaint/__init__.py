"""Hazard-model prognostics and maintenance-threshold optimization.

Fits a Cox proportional-hazards model with time-varying covariates to
run-to-failure engine sensor data, scores per-cycle hazard trajectories,
and selects a maintenance threshold by bootstrap simulation of total
maintenance cost and failure probability.
"""

__version__ = "0.1.0"

from .cox import (
    BaselineHazardTable,
    CovariateSpec,
    CoxModel,
    FitConfig,
    PreprocessOptions,
    SurvivalRecord,
    breslow_baseline,
    fit_cox,
    log_partial_hazard,
    log_partial_likelihood,
    model_from_json,
    model_to_json,
    to_counting_process,
)
from .ingest import (
    Dataset,
    EngineRun,
    MeasurementRow,
    combine_datasets,
    load_dataset,
    parse_measurement_file,
    split_by_unit,
)
from .policy import CostParams, PolicyEvaluation, decide, evaluate_policy
from .simulate import (
    ComparisonReport,
    LambdaGrid,
    SimulationConfig,
    SweepPoint,
    SweepResult,
    bootstrap_sweep,
    compare_directed_vs_generic,
    default_grid,
    deterministic_sweep,
    select_threshold,
)
from .trajectory import HazardTrajectory, score_dataset, score_engine

__all__ = [
    "BaselineHazardTable",
    "ComparisonReport",
    "CostParams",
    "CovariateSpec",
    "CoxModel",
    "Dataset",
    "EngineRun",
    "FitConfig",
    "HazardTrajectory",
    "LambdaGrid",
    "MeasurementRow",
    "PolicyEvaluation",
    "PreprocessOptions",
    "SimulationConfig",
    "SurvivalRecord",
    "SweepPoint",
    "SweepResult",
    "bootstrap_sweep",
    "breslow_baseline",
    "combine_datasets",
    "compare_directed_vs_generic",
    "decide",
    "default_grid",
    "deterministic_sweep",
    "evaluate_policy",
    "fit_cox",
    "load_dataset",
    "log_partial_hazard",
    "log_partial_likelihood",
    "model_from_json",
    "model_to_json",
    "parse_measurement_file",
    "score_dataset",
    "score_engine",
    "select_threshold",
    "split_by_unit",
    "to_counting_process",
]
