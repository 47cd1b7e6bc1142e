"""
Fitting a hazard model to run-to-failure data
=============================================

Walks the core modelling path: parse raw measurement text, encode each
engine as unit-interval survival records, fit a Cox proportional-hazards
model by Newton-Raphson on the partial likelihood, and inspect which
sensor channels carry the degradation signal.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))
from synthetic_fleet import fleet_dataset

from coxmaint import fit_cox, to_counting_process

# A fleet of 60 engines, each run to failure.  Every engine contributes
# one row per operating cycle: 3 operational settings and 21 sensors.
dataset = fleet_dataset(n_engines=60, seed=42)
print(f"fleet: {dataset.n_engines} engines, "
      f"{sum(e.failure_cycle for e in dataset.engines)} total cycles")

# Counting-process encoding: an engine failing at cycle t becomes t
# records (t-1, t], covariates taken from row t, with the failure event
# on the last interval.  Constant columns are dropped and the rest are
# standardized against the training distribution.
records, spec = to_counting_process(dataset.engines)
print(f"records: {len(records)}   covariates kept: {spec.dim} of "
      f"{len(spec.kept_mask)}")

# Maximize the partial likelihood (Efron tie correction by default).
model = fit_cox(records, spec=spec)
d = model.diagnostics
print(f"converged={d.converged} after {d.iterations} iterations, "
      f"log-likelihood {d.log_likelihood:.3f}, "
      f"gradient max-norm {d.gradient_norm:.2e}")

# The largest coefficients should land on the channels we built drift
# into (s2, s3, s4); the noise-only channels stay near zero.
beta = np.asarray(model.beta)
order = np.argsort(-np.abs(beta))
print("\ntop covariates by |beta|:")
for i in order[:6]:
    print(f"  {spec.names[i]:>4s}  beta = {beta[i]:+.4f}")

# The accompanying Breslow baseline turns scores into cumulative hazard.
cum = model.baseline.cumulative()
print(f"\nbaseline: {len(model.baseline.event_times)} event times, "
      f"cumulative hazard reaches {cum[-1]:.3f}")
