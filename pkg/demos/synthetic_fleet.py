"""
Synthetic run-to-failure fleet generator
========================================

Shared helper for the demo scripts.  Produces space-separated measurement
text in the 26-column format the parser expects: unit id, cycle number,
three operational settings, and twenty-one sensor channels.  A few sensors
drift monotonically toward failure so a hazard model has signal to find.
"""

import io

import numpy as np

from coxmaint import Dataset, parse_measurement_file


def fleet_text(n_engines, seed, min_cycles=30, max_cycles=90, drift=1.5):
    """Return measurement text for a fleet of degrading engines."""
    rng = np.random.default_rng(seed)
    lines = []
    for unit in range(1, n_engines + 1):
        life = int(rng.integers(min_cycles, max_cycles + 1))
        for cycle in range(1, life + 1):
            frac = cycle / life
            settings = rng.normal(0.0, 0.5, size=3)
            sensors = rng.normal(0.0, 1.0, size=21)
            sensors[0] = 100.0                 # flat channel: dropped by preprocessing
            sensors[1] += drift * frac ** 2    # accelerating wear indicator
            sensors[2] -= drift * frac         # linear decline
            sensors[3] += 0.8 * frac
            fields = [str(unit), str(cycle)]
            fields += [f"{v:.4f}" for v in settings]
            fields += [f"{v:.4f}" for v in sensors]
            lines.append(" ".join(fields) + " ")
    return "\n".join(lines) + "\n"


def fleet_dataset(n_engines, seed, label="DEMO", **kwargs):
    """Return a parsed ``Dataset`` for a synthetic fleet."""
    text = fleet_text(n_engines, seed, **kwargs)
    runs = parse_measurement_file(io.StringIO(text))
    return Dataset(subset_label=label, engines=tuple(runs))
