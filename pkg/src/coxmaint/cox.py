"""Cox proportional-hazards fitting with time-varying covariates.

Engine runs are encoded in counting-process form: engine i with failure
cycle t_i contributes t_i unit intervals (t-1, t], carrying the covariate
row observed at cycle t, with the event flag set only on the final
interval.  The partial likelihood is maximized by Newton-Raphson with
step-halving; ties are handled with the Efron correction by default
(Breslow selectable).  The baseline hazard is the Breslow step-function
estimator.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DataError,
    NumericalError,
    SeparationError,
    UsageError,
)
from .ingest import COVARIATE_NAMES, EngineRun, MeasurementRow

CONDITION_LIMIT = 1e12
BETA_BOUND = 20.0
MAX_HALVINGS = 20


@dataclass(frozen=True)
class SurvivalRecord:
    """One (start, stop] interval with covariates and event flag."""

    unit_key: str
    start: int
    stop: int
    event: bool
    covariates: tuple[float, ...]

    def __post_init__(self):
        if self.start >= self.stop:
            raise DataError(
                f"unit {self.unit_key}: interval ({self.start}, {self.stop}] "
                "must have start < stop"
            )


@dataclass(frozen=True)
class PreprocessOptions:
    """Flags controlling raw-column preprocessing."""

    standardize: bool = True


@dataclass(frozen=True)
class CovariateSpec:
    """Which raw columns survive preprocessing and how they are scaled."""

    names: tuple[str, ...]
    kept_mask: tuple[bool, ...]
    means: tuple[float, ...]
    scales: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.names) == len(self.means) == len(self.scales)):
            raise UsageError("names/means/scales lengths differ")
        if sum(self.kept_mask) != len(self.names):
            raise UsageError("kept_mask count does not match kept names")

    @property
    def dim(self) -> int:
        return len(self.names)

    def transform(self, raw: np.ndarray) -> np.ndarray:
        """Project raw covariate row(s) to the kept, centered, scaled space."""
        raw = np.asarray(raw, dtype=float)
        mask = np.asarray(self.kept_mask, dtype=bool)
        kept = raw[..., mask]
        return (kept - np.asarray(self.means)) / np.asarray(self.scales)


def identity_spec(dim: int) -> CovariateSpec:
    """Spec that passes covariates through untouched (for prepared records)."""
    return CovariateSpec(
        names=tuple(f"x{i}" for i in range(dim)),
        kept_mask=(True,) * dim,
        means=(0.0,) * dim,
        scales=(1.0,) * dim,
    )


@dataclass(frozen=True)
class BaselineHazardTable:
    """Breslow increments of the cumulative baseline hazard."""

    event_times: tuple[int, ...]
    increments: tuple[float, ...]

    def __post_init__(self):
        times = np.asarray(self.event_times)
        if times.size and np.any(np.diff(times) <= 0):
            raise DataError("event_times must be strictly increasing")
        if np.any(np.asarray(self.increments) < 0):
            raise DataError("increments must be nonnegative")

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.increments)


@dataclass(frozen=True)
class FitConfig:
    tolerance: float = 1e-7
    max_iterations: int = 100
    tie_method: str = "efron"

    def __post_init__(self):
        if self.tie_method not in ("efron", "breslow"):
            raise UsageError(f"unknown tie_method {self.tie_method!r}")


@dataclass(frozen=True)
class FitDiagnostics:
    log_likelihood: float
    gradient_norm: float
    iterations: int
    converged: bool
    message: str = ""
    #: log partial likelihood after each accepted step (index 0 = start).
    ll_history: tuple[float, ...] = ()


@dataclass(frozen=True)
class CoxModel:
    """Fitted coefficients plus everything needed to score new rows."""

    beta: tuple[float, ...]
    spec: CovariateSpec
    baseline: BaselineHazardTable
    diagnostics: FitDiagnostics
    fit_config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if not np.all(np.isfinite(self.beta)):
            raise NumericalError("beta components must be finite")


def to_counting_process(
    engines: Sequence[EngineRun],
    options: PreprocessOptions = PreprocessOptions(),
) -> tuple[list[SurvivalRecord], CovariateSpec]:
    """Encode engine runs as unit-interval survival records.

    Zero-variance raw columns are dropped; the rest are centered by the
    training mean and, when standardization is on, divided by the
    training standard deviation.
    """
    if not engines:
        raise UsageError("no engines supplied")
    for e in engines:
        if not e.rows:
            raise DataError(f"unit {e.unit_key}: empty engine run")

    raw = np.concatenate([e.covariate_matrix() for e in engines], axis=0)
    variances = raw.var(axis=0)
    kept = variances > 0.0
    if not np.any(kept):
        raise DataError("no informative covariates (all columns constant)")

    means = raw[:, kept].mean(axis=0)
    if options.standardize:
        scales = raw[:, kept].std(axis=0)
    else:
        scales = np.ones(int(kept.sum()))
    spec = CovariateSpec(
        names=tuple(n for n, k in zip(COVARIATE_NAMES, kept) if k),
        kept_mask=tuple(bool(k) for k in kept),
        means=tuple(float(m) for m in means),
        scales=tuple(float(s) for s in scales),
    )

    records: list[SurvivalRecord] = []
    for e in engines:
        x = spec.transform(e.covariate_matrix())
        for t, row in enumerate(e.rows, start=1):
            records.append(
                SurvivalRecord(
                    unit_key=e.unit_key,
                    start=t - 1,
                    stop=t,
                    event=(t == e.failure_cycle),
                    covariates=tuple(float(v) for v in x[t - 1]),
                )
            )
    return records, spec


class _PackedRecords:
    """Array view of a record list with precomputed risk/death index sets."""

    def __init__(self, records: Sequence[SurvivalRecord]):
        if not records:
            raise UsageError("no survival records")
        self.start = np.array([r.start for r in records], dtype=float)
        self.stop = np.array([r.stop for r in records], dtype=float)
        self.event = np.array([r.event for r in records], dtype=bool)
        self.x = np.array([r.covariates for r in records], dtype=float)
        if self.x.ndim != 2:
            raise DataError("records have inconsistent covariate lengths")
        self.dim = self.x.shape[1]
        if not self.event.any():
            raise DataError("no events in the data")
        self.event_times = np.unique(self.stop[self.event])
        self.risk_sets = [
            np.flatnonzero((self.start < t) & (t <= self.stop))
            for t in self.event_times
        ]
        self.death_sets = [
            np.flatnonzero(self.event & (self.stop == t)) for t in self.event_times
        ]

    def drop_columns(self, keep: np.ndarray) -> None:
        self.x = self.x[:, keep]
        self.dim = self.x.shape[1]


def _loglik_terms(
    packed: _PackedRecords, beta: np.ndarray, tie_method: str
) -> tuple[float, np.ndarray, np.ndarray]:
    """Log partial likelihood with analytic gradient and Hessian.

    Risk-set sums use max-subtraction so large scores never overflow.
    """
    d = packed.dim
    eta = packed.x @ beta
    value = 0.0
    grad = np.zeros(d)
    hess = np.zeros((d, d))

    for risk, deaths in zip(packed.risk_sets, packed.death_sets):
        xr = packed.x[risk]
        er = eta[risk]
        m = er.max()
        w = np.exp(er - m)
        s0 = w.sum()
        s1 = w @ xr
        s2 = xr.T @ (w[:, None] * xr)

        xd = packed.x[deaths]
        nd = len(deaths)
        value += float(eta[deaths].sum())
        grad += xd.sum(axis=0)

        if tie_method == "breslow" or nd == 1:
            mu = s1 / s0
            value -= nd * (np.log(s0) + m)
            grad -= nd * mu
            hess -= nd * (s2 / s0 - np.outer(mu, mu))
        else:
            ed = eta[deaths]
            wd = np.exp(ed - m)
            s0d = wd.sum()
            s1d = wd @ xd
            s2d = xd.T @ (wd[:, None] * xd)
            for l in range(nd):
                phi = l / nd
                s0l = s0 - phi * s0d
                s1l = s1 - phi * s1d
                s2l = s2 - phi * s2d
                mu = s1l / s0l
                value -= np.log(s0l) + m
                grad -= mu
                hess -= s2l / s0l - np.outer(mu, mu)

    return value, grad, hess


def log_partial_likelihood(
    records: Sequence[SurvivalRecord],
    beta: Sequence[float],
    tie_method: str = "efron",
) -> tuple[float, np.ndarray, np.ndarray]:
    """Efron- or Breslow-corrected log partial likelihood at ``beta``.

    Returns (value, gradient, Hessian); the Hessian is the true second
    derivative and is negative semidefinite.
    """
    packed = _PackedRecords(records)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (packed.dim,):
        raise UsageError(
            f"beta has length {beta.size}, records have {packed.dim} covariates"
        )
    return _loglik_terms(packed, beta, tie_method)


def _resolve_collinearity(
    packed: _PackedRecords, spec: CovariateSpec
) -> tuple[_PackedRecords, CovariateSpec, np.ndarray]:
    """Drop trailing collinear columns until the information matrix at
    beta = 0 is numerically well conditioned.  Deterministic: earlier
    columns win."""
    _, _, hess = _loglik_terms(packed, np.zeros(packed.dim), "breslow")
    info = -hess
    if packed.dim == 0 or _condition_ok(info):
        return packed, spec, np.arange(packed.dim)

    keep: list[int] = []
    for j in range(packed.dim):
        trial = keep + [j]
        sub = info[np.ix_(trial, trial)]
        if _condition_ok(sub):
            keep.append(j)
    dropped = sorted(set(range(packed.dim)) - set(keep))
    names = [spec.names[j] for j in dropped]
    warnings.warn(
        f"dropping collinear covariate column(s): {', '.join(names)}",
        stacklevel=3,
    )
    keep_arr = np.array(keep, dtype=int)
    packed.drop_columns(keep_arr)

    full_keep = np.flatnonzero(spec.kept_mask)[keep_arr]
    new_mask = np.zeros(len(spec.kept_mask), dtype=bool)
    new_mask[full_keep] = True
    new_spec = CovariateSpec(
        names=tuple(spec.names[j] for j in keep),
        kept_mask=tuple(bool(b) for b in new_mask),
        means=tuple(spec.means[j] for j in keep),
        scales=tuple(spec.scales[j] for j in keep),
    )
    return packed, new_spec, keep_arr


def _condition_ok(info: np.ndarray) -> bool:
    if info.size == 0:
        return True
    diag = np.diag(info)
    if np.any(diag <= 0):
        return False
    return np.linalg.cond(info) <= CONDITION_LIMIT


def fit_cox(
    records: Sequence[SurvivalRecord],
    fit_config: FitConfig = FitConfig(),
    spec: CovariateSpec | None = None,
) -> CoxModel:
    """Maximize the partial likelihood by Newton-Raphson with step-halving.

    Starts at beta = 0; accepts a step only if it does not decrease the
    log partial likelihood (halving up to 20 times); converges when the
    gradient max-norm is at or below ``fit_config.tolerance``.
    """
    packed = _PackedRecords(records)
    if spec is None:
        spec = identity_spec(packed.dim)
    if spec.dim != packed.dim:
        raise UsageError(
            f"spec has {spec.dim} covariates, records have {packed.dim}"
        )

    # Degenerate data: every risk set is exactly its own deaths, so the
    # likelihood is flat in beta and there is nothing to compare.
    if all(
        len(risk) == len(deaths)
        for risk, deaths in zip(packed.risk_sets, packed.death_sets)
    ):
        beta = np.zeros(packed.dim)
        value, grad, _ = _loglik_terms(packed, beta, fit_config.tie_method)
        return CoxModel(
            beta=tuple(beta),
            spec=spec,
            baseline=breslow_baseline(records, beta),
            diagnostics=FitDiagnostics(
                log_likelihood=value,
                gradient_norm=float(np.abs(grad).max(initial=0.0)),
                iterations=0,
                converged=True,
                message="no comparisons: flat likelihood, beta fixed at 0",
            ),
            fit_config=fit_config,
        )

    packed, spec, _ = _resolve_collinearity(packed, spec)
    if packed.dim == 0:
        raise DataError("no informative covariates after collinearity drop")

    beta = np.zeros(packed.dim)
    value, grad, hess = _loglik_terms(packed, beta, fit_config.tie_method)
    history = [value]
    iterations = 0
    for iterations in range(1, fit_config.max_iterations + 1):
        if np.abs(grad).max() <= fit_config.tolerance:
            iterations -= 1
            break
        try:
            step = np.linalg.solve(-hess, grad)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(-hess, grad, rcond=None)
        candidate = None
        for _ in range(MAX_HALVINGS + 1):
            trial = beta + step
            t_value, t_grad, t_hess = _loglik_terms(
                packed, trial, fit_config.tie_method
            )
            if np.isfinite(t_value) and t_value >= value:
                candidate = (trial, t_value, t_grad, t_hess)
                break
            step = step / 2.0
        if candidate is None:
            raise ConvergenceError(
                "step-halving failed to improve the likelihood",
                beta=beta,
                diagnostics=FitDiagnostics(
                    value, float(np.abs(grad).max()), iterations, False
                ),
            )
        beta, value, grad, hess = candidate
        history.append(value)
        if np.abs(beta).max() > BETA_BOUND:
            raise SeparationError(
                "covariate separation: |beta| diverged beyond "
                f"{BETA_BOUND} (monotone likelihood)"
            )
    gradient_norm = float(np.abs(grad).max())
    if gradient_norm > fit_config.tolerance:
        raise ConvergenceError(
            f"Newton-Raphson did not converge in {fit_config.max_iterations} "
            f"iterations (gradient max-norm {gradient_norm:.3g})",
            beta=beta,
            diagnostics=FitDiagnostics(value, gradient_norm, iterations, False),
        )

    reduced_records = _records_with_covariates(records, packed.x)
    return CoxModel(
        beta=tuple(float(b) for b in beta),
        spec=spec,
        baseline=breslow_baseline(reduced_records, beta),
        diagnostics=FitDiagnostics(
            log_likelihood=value,
            gradient_norm=gradient_norm,
            iterations=iterations,
            converged=True,
            ll_history=tuple(history),
        ),
        fit_config=fit_config,
    )


def _records_with_covariates(
    records: Sequence[SurvivalRecord], x: np.ndarray
) -> list[SurvivalRecord]:
    if x.shape[1] == len(records[0].covariates):
        return list(records)
    return [
        replace(r, covariates=tuple(float(v) for v in x[i]))
        for i, r in enumerate(records)
    ]


def breslow_baseline(
    records: Sequence[SurvivalRecord], beta: Sequence[float]
) -> BaselineHazardTable:
    """Breslow estimator: at event time tau, increment d / sum_R exp(eta)."""
    packed = _PackedRecords(records)
    beta = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(beta)):
        raise UsageError("beta must be finite")
    eta = packed.x @ beta
    increments = []
    for risk, deaths in zip(packed.risk_sets, packed.death_sets):
        er = eta[risk]
        m = er.max()
        denom = np.exp(er - m).sum()
        increments.append(float(len(deaths) * np.exp(-m) / denom))
    return BaselineHazardTable(
        event_times=tuple(int(t) for t in packed.event_times),
        increments=tuple(increments),
    )


def log_partial_hazard(model: CoxModel, row: "MeasurementRow | np.ndarray") -> float:
    """Score a raw measurement row: beta . (x_kept - mean) / scale."""
    if isinstance(row, MeasurementRow):
        raw = row.covariates()
    else:
        raw = np.asarray(row, dtype=float)
    if raw.shape[-1] != len(model.spec.kept_mask):
        raise UsageError(
            f"row has {raw.shape[-1]} covariates, model expects "
            f"{len(model.spec.kept_mask)}"
        )
    return float(model.spec.transform(raw) @ np.asarray(model.beta))


def model_to_json(model: CoxModel) -> str:
    """Serialize a fitted model; floats round-trip exactly via repr."""
    doc = {
        "beta": list(model.beta),
        "covariates": {
            "names": list(model.spec.names),
            "kept_mask": list(model.spec.kept_mask),
            "means": list(model.spec.means),
            "scales": list(model.spec.scales),
        },
        "baseline": {
            "event_times": list(model.baseline.event_times),
            "increments": list(model.baseline.increments),
        },
        "diagnostics": {
            "log_likelihood": model.diagnostics.log_likelihood,
            "gradient_norm": model.diagnostics.gradient_norm,
            "iterations": model.diagnostics.iterations,
            "converged": model.diagnostics.converged,
            "message": model.diagnostics.message,
        },
        "fit_config": {
            "tolerance": model.fit_config.tolerance,
            "max_iterations": model.fit_config.max_iterations,
            "tie_method": model.fit_config.tie_method,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def model_from_json(text: str) -> CoxModel:
    doc = json.loads(text)
    cov = doc["covariates"]
    diag = doc["diagnostics"]
    cfg = doc["fit_config"]
    return CoxModel(
        beta=tuple(doc["beta"]),
        spec=CovariateSpec(
            names=tuple(cov["names"]),
            kept_mask=tuple(bool(b) for b in cov["kept_mask"]),
            means=tuple(cov["means"]),
            scales=tuple(cov["scales"]),
        ),
        baseline=BaselineHazardTable(
            event_times=tuple(doc["baseline"]["event_times"]),
            increments=tuple(doc["baseline"]["increments"]),
        ),
        diagnostics=FitDiagnostics(
            log_likelihood=diag["log_likelihood"],
            gradient_norm=diag["gradient_norm"],
            iterations=diag["iterations"],
            converged=diag["converged"],
            message=diag.get("message", ""),
        ),
        fit_config=FitConfig(
            tolerance=cfg["tolerance"],
            max_iterations=cfg["max_iterations"],
            tie_method=cfg["tie_method"],
        ),
    )
