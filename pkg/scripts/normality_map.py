"""Classify the patch optimum over a (theta, alpha) grid.

Each cell records the threshold decision, the direct density comparison and
whether the two agree. Output is a long-format CSV ready for a heat map.
"""

import argparse

import numpy as np

from marine_reserves.equilibrium import normality_diagnosis, patches_equilibrium
from marine_reserves.params import BioParams, EconParams
from marine_reserves.reports import write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r1", type=float, default=0.4)
    ap.add_argument("--r2", type=float, default=0.05)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--theta-max", type=float, default=40.0)
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--out", default="normality_map.csv")
    args = ap.parse_args()

    q, c = 2.0, 0.15
    rows = []
    disagreements = 0
    for theta in np.linspace(1.0, args.theta_max, args.n):
        econ = EconParams(p=theta * c / q, q=q, c=c, delta=args.delta)
        for alpha in np.linspace(0.02, 0.98, args.n):
            bio = BioParams(args.r1, args.r2, float(alpha))
            d = normality_diagnosis(bio, econ)
            rep = patches_equilibrium(bio, econ)
            disagreements += not d.agrees
            rows.append([float(theta), float(alpha), d.decision, d.direct_normal, d.agrees, rep.J_star])
    with open(args.out, "w", newline="\n") as fh:
        fh.write(write_csv(rows, ("theta", "alpha", "decision", "direct_normal", "agrees", "J_star")))
    print(f"{len(rows)} cells, {disagreements} disagreements, written to {args.out}")


if __name__ == "__main__":
    main()
