"""Acceptance gate: one test per criterion, printing a pass/fail line.

Criteria 5 (real-data half) and 6 need the four training files
``train_FD001.txt`` .. ``train_FD004.txt``; point COXMAINT_DATA_DIR at
a directory holding them (default: ``data/`` under the repo root).
They are skipped when the files are absent.
"""

import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from coxmaint.cox import fit_cox, log_partial_likelihood
from coxmaint.pipeline import ExperimentConfig, run_pipeline
from coxmaint.policy import CostParams, decide, evaluate_policy
from coxmaint.simulate import (
    SimulationConfig,
    bootstrap_sweep,
    compare_directed_vs_generic,
    default_grid,
    deterministic_sweep,
)

from conftest import (
    make_trajectory,
    random_survival_records,
    synthetic_measurement_text,
)

COSTS = CostParams(3.5e6, 4.0e6)

DATA_DIR = Path(os.environ.get("COXMAINT_DATA_DIR", Path(__file__).parent.parent / "data"))
SUBSETS = ("FD001", "FD002", "FD003", "FD004")
DATA_FILES = {label: DATA_DIR / f"train_{label}.txt" for label in SUBSETS}
HAVE_DATA = all(p.is_file() for p in DATA_FILES.values())
NEED_DATA = pytest.mark.skipif(
    not HAVE_DATA,
    reason=f"training files not found under {DATA_DIR} "
    "(set COXMAINT_DATA_DIR to run the real-data criteria)",
)


_capture_manager = None


@pytest.fixture(autouse=True)
def _expose_capture_manager(request):
    global _capture_manager
    _capture_manager = request.config.pluginmanager.getplugin("capturemanager")
    yield


class _report:
    """Prints one PASS/FAIL line per criterion, bypassing output capture."""

    def __init__(self, number: int, description: str):
        self.number = number
        self.description = description

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"\nACCEPTANCE {self.number} {status}: {self.description}"
        if _capture_manager is not None:
            with _capture_manager.global_and_fixture_disabled():
                print(line)
        else:
            print(line)
        return False


def test_criterion_1_cox_fit_oracle(three_subject_records):
    with _report(1, "fitted coefficient matches the grid-search oracle"):
        start = time.perf_counter()
        model = fit_cox(three_subject_records)
        # independent oracle: two-stage 1-D grid search over the likelihood
        oracle = 0.0
        half_width = 2.0
        for _ in range(3):
            grid = np.linspace(oracle - half_width, oracle + half_width, 401)
            values = [
                log_partial_likelihood(three_subject_records, [b])[0] for b in grid
            ]
            oracle = float(grid[int(np.argmax(values))])
            half_width /= 100.0
        assert model.beta[0] == pytest.approx(math.log(math.sqrt(2.0)), abs=1e-4)
        assert model.beta[0] == pytest.approx(oracle, abs=1e-4)
        assert time.perf_counter() - start < 1.0


def test_criterion_2_gradient_and_ascent_suite():
    with _report(2, "analytic gradients match finite differences; ascent monotone"):
        start = time.perf_counter()
        checked = 0
        for seed in range(50):
            rng = np.random.default_rng(1000 + seed)
            records = random_survival_records(rng)
            d = len(records[0].covariates)
            beta = rng.normal(0.0, 0.5, size=d)
            _, grad, _ = log_partial_likelihood(records, beta)
            eps = 1e-6
            for j in range(d):
                e = np.zeros(d)
                e[j] = eps
                vp = log_partial_likelihood(records, beta + e)[0]
                vm = log_partial_likelihood(records, beta - e)[0]
                fd = (vp - vm) / (2 * eps)
                assert grad[j] == pytest.approx(fd, rel=1e-6, abs=1e-8)
            try:
                model = fit_cox(records)
            except Exception:
                continue  # separation on a random draw is not under test
            hist = model.diagnostics.ll_history
            assert all(b >= a for a, b in zip(hist, hist[1:]))
            checked += 1
        assert checked >= 25
        assert time.perf_counter() - start < 30.0


def test_criterion_3_policy_oracle():
    with _report(3, "evaluate_policy equals the per-cycle brute-force simulation"):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            trajectories = [
                make_trajectory(f"u{i}", rng.normal(size=rng.integers(1, 25)))
                for i in range(rng.integers(1, 10))
            ]
            threshold = float(rng.normal(scale=2.0))
            ev = evaluate_policy(trajectories, threshold, COSTS)
            maintained = failed = 0
            for tr in trajectories:
                for score in tr.scores:
                    if decide(score, threshold) == "maintain":
                        maintained += 1
                        break
                else:
                    failed += 1
            assert ev.maintained_count == maintained
            assert ev.failed_count == failed
            assert ev.total_cost == (
                maintained * COSTS.restoration_cost
                + failed * COSTS.replacement_cost
            )


def test_criterion_4_monotonicity_suite():
    with _report(4, "maintained nonincreasing, failure prob nondecreasing in lambda"):
        rng = np.random.default_rng(99)
        for _ in range(50):
            trajectories = [
                make_trajectory(f"u{i}", rng.normal(size=12))
                for i in range(rng.integers(2, 12))
            ]
            grid = default_grid(trajectories, 0.25)
            sweep = deterministic_sweep(trajectories, grid, COSTS)
            maintained = [ev.maintained_count for _, ev in sweep]
            probs = [ev.failure_probability for _, ev in sweep]
            assert all(b <= a for a, b in zip(maintained, maintained[1:]))
            assert all(b >= a for a, b in zip(probs, probs[1:]))


def _sweep(trajectories, seed=0):
    grid = default_grid(trajectories, 0.5)
    return bootstrap_sweep(
        trajectories,
        SimulationConfig(
            sample_size=len(trajectories), replications=5, seed=seed, grid=grid
        ),
        COSTS,
    )


def test_criterion_5_directed_vs_generic_random_fixtures():
    with _report(5, "directed total never exceeds generic total (fixtures)"):
        rng = np.random.default_rng(55)
        for trial in range(30):
            subsets = {}
            trajectories = {}
            for s in range(int(rng.integers(2, 5))):
                label = f"S{s}"
                trajectories[label] = [
                    make_trajectory(
                        f"{label}u{i}", rng.normal(loc=rng.normal(0, 4), size=6)
                    )
                    for i in range(int(rng.integers(2, 9)))
                ]
                subsets[label] = _sweep(trajectories[label], seed=trial)
            combined = [t for lst in trajectories.values() for t in lst]
            report = compare_directed_vs_generic(
                subsets, _sweep(combined, seed=trial), trajectories, COSTS
            )
            assert report.directed_total <= report.generic_total


@NEED_DATA
def test_criterion_5_directed_vs_generic_real_data():
    with _report(5, "directed total never exceeds generic total (real data)"):
        results = _real_data_results()
        report = results["comparison"]["report"]
        assert report.directed_total <= report.generic_total
        print(f"achieved directed-vs-generic savings: {report.savings_pct:.1f}%")


_REAL_RESULTS = {}


def _real_data_results():
    if not _REAL_RESULTS:
        config = ExperimentConfig(
            data_paths={lb: str(DATA_FILES[lb]) for lb in SUBSETS},
            output_dir=str(DATA_DIR / "acceptance_out"),
        )
        _REAL_RESULTS["results"] = run_pipeline(config)
    return _REAL_RESULTS["results"]


@NEED_DATA
def test_criterion_6_full_scale_run():
    with _report(6, "full-fleet run: interior optimum with nontrivial risk"):
        start = time.perf_counter()
        results = _real_data_results()
        assert time.perf_counter() - start < 300.0
        for label in (*SUBSETS, "COMBINED"):
            sel = results[label]["selection"]
            grid = sel["grid"]
            lam = sel["optimal_lambda"]
            assert grid["min"] < lam < grid["max"], f"{label}: optimum not interior"
            assert sel["optimal_cost_mean"] < sel["boundary_cost_all_restored"]
            assert sel["optimal_cost_mean"] < sel["boundary_cost_all_replaced"]
            assert 0.0 < sel["optimal_prob_mean"] < 1.0


def test_criterion_7_determinism(tmp_path):
    with _report(7, "identical config and seed give byte-identical artifacts"):
        src = tmp_path / "train.txt"
        src.write_text(synthetic_measurement_text(20, seed=7))
        config = ExperimentConfig(
            data_paths={"FD001": str(src)},
            sample_size=10,
            replications=6,
            output_dir=str(tmp_path / "out"),
        )

        def snapshot():
            run_pipeline(config, log=lambda *a: None)
            root = Path(config.output_dir)
            return {
                str(p.relative_to(root)): p.read_bytes()
                for p in sorted(root.rglob("*"))
                if p.is_file()
            }

        assert snapshot() == snapshot()


def test_criterion_8_bootstrap_degeneracy():
    with _report(8, "k=1 gives zero stds; full-sample means match deterministic"):
        rng = np.random.default_rng(88)
        trajectories = [
            make_trajectory(f"u{i}", rng.normal(size=15)) for i in range(10)
        ]
        grid = default_grid(trajectories, 0.5)

        single = bootstrap_sweep(
            trajectories,
            SimulationConfig(sample_size=5, replications=1, seed=1, grid=grid),
            COSTS,
        )
        assert all(p.cost_std == 0.0 and p.prob_std == 0.0 for p in single.points)

        k = 200
        full = bootstrap_sweep(
            trajectories,
            SimulationConfig(sample_size=10, replications=k, seed=2, grid=grid),
            COSTS,
        )
        deterministic = deterministic_sweep(trajectories, grid, COSTS)
        for (lam, ev), point in zip(deterministic, full.points):
            se = point.cost_std / math.sqrt(k)
            assert abs(point.cost_mean - ev.total_cost) <= max(3 * se, 1e-9), (
                f"lambda={lam}"
            )
