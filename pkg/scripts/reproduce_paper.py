"""Audit the published numbers of the built-in scenario and write the artifacts to a directory."""

import argparse
from pathlib import Path

from marine_reserves.reports import reproduce_paper, table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", type=Path)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    res = reproduce_paper()
    (args.outdir / "audit.csv").write_text(res.csv(), newline="\n")
    (args.outdir / "run_record.json").write_text(res.record().to_json(), newline="\n")
    print(table([[r.quantity, r.reported, r.computed, r.status] for r in res.rows], ("quantity", "reported", "computed", "status")))
    print(f"\nwrote {args.outdir}/audit.csv and {args.outdir}/run_record.json")


if __name__ == "__main__":
    main()
