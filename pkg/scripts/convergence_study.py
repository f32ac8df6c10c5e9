"""Observed order of the fixed-step integrator and revenue quadrature on a fished transient."""

import argparse

import numpy as np

from marine_reserves.params import BioParams, DiffusionSpec, EconParams, ModelVariant, State
from marine_reserves.reports import table
from marine_reserves.simulation import ControlSchedule, discounted_revenue, integrate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=float, default=20.0)
    args = ap.parse_args()

    bio = BioParams(0.4, 0.05, 0.5)
    econ = EconParams(0.3, 2.0, 0.15, 0.05)
    sched = ControlSchedule(((0.0, 0.3), (args.horizon / 2, 0.05)))

    def run(h):
        tr = integrate(ModelVariant.PATCHES_RESERVE, State(0.05, 0.3), sched, bio, econ, DiffusionSpec.constant(2.0), args.horizon, h)
        return tr.states[-1], discounted_revenue(tr, econ, bio.alpha).value

    steps = [0.2, 0.1, 0.05, 0.025]
    ref_state, ref_rev = run(steps[-1] / 8)
    rows, prev = [], None
    for h in steps:
        state, rev = run(h)
        err = float(np.max(np.abs(state - ref_state)))
        rows.append([h, err, prev / err if prev else None, abs(rev - ref_rev)])
        prev = err
    print(table(rows, ("step", "state error", "ratio", "revenue error")))


if __name__ == "__main__":
    main()
