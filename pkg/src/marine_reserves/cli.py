"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .control import calibrate_r
from .equilibrium import global_equilibrium, normality_diagnosis, patches_equilibrium, r2_upper_bound
from .params import DomainError, ModelVariant, SolverError, State
from .reports import (
    EQUILIBRIUM_COLUMNS,
    SWEEP_COLUMNS,
    alpha_sweep,
    compare_models,
    equilibrium_row,
    reproduce_paper,
    table,
    write_csv,
)
from .scenario import PAPER_P_NOTE, PAPER_SCENARIO, Scenario, ScenarioError, parse_scenario, scenario_to_toml
from .simulation import discounted_revenue, integrate

logger = logging.getLogger("marine_reserves")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


def load_scenario(path: str | None) -> Scenario:
    """Read a TOML scenario; no path (or ``@paper``) selects the built-in one."""
    if path is None or path == "@paper":
        return PAPER_SCENARIO
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text, default_name=p.stem)


class Output:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, text: str = "") -> None:
        if not self.quiet:
            print(text)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_equilibrium(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    rep = patches_equilibrium(s.bio, s.econ) if args.model == "patches" else global_equilibrium(s.bio, s.econ)
    out(f"{rep.model} equilibrium, scenario {s.name}")
    out(table([[c, v] for c, v in zip(EQUILIBRIUM_COLUMNS, equilibrium_row(rep))], ("quantity", "value")))
    out()
    out(table([[f.key, f.value, f.note] for f in rep.diagnostics], ("diagnostic", "value", "note")))
    if args.csv:
        _write(args.csv, write_csv([equilibrium_row(rep)], EQUILIBRIUM_COLUMNS))
    return EXIT_OK


def cmd_check(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    diag = normality_diagnosis(s.bio, s.econ)
    rep = patches_equilibrium(s.bio, s.econ)
    rows = [
        ["decision", diag.decision],
        ["direct density comparison normal", diag.direct_normal],
        ["theta", diag.theta],
        ["theta0", diag.theta0],
        ["alpha", s.bio.alpha],
        ["alpha bound", diag.alpha_bound],
        ["r2 upper bound", r2_upper_bound(s.bio, s.econ)],
        ["profitable", rep.profitable],
        ["J*", rep.J_star],
    ]
    out(f"normality check, scenario {s.name}")
    out(table(rows, ("item", "value")))
    for note in diag.notes:
        out(f"note: {note}")
    return EXIT_OK


def cmd_simulate(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    if s.simulation is None:
        raise ScenarioError("scenario has no [simulation] table")
    variant = ModelVariant.parse(args.model) if args.model else s.variant
    sim = s.simulation
    traj = integrate(variant, State(sim.x1_0, sim.x2_0), sim.schedule, s.bio, s.econ, s.diffusion, sim.horizon, sim.step)
    d = s.econ.delta
    rows = (
        [t, x1, x2, e, g, math.exp(-d * t) * g]
        for t, (x1, x2), e, g in zip(traj.times, traj.states, traj.efforts, traj.rents)
    )
    _write(args.out, write_csv(rows, ("t", "x1", "x2", "E", "rent", "discounted_rent")))
    rev = discounted_revenue(traj, s.econ, s.bio.alpha)
    out(f"{variant.value}: {len(traj)} samples to t={traj.times[-1]:g}, final state ({traj.x1[-1]:.6g}, {traj.x2[-1]:.6g})")
    out(f"discounted revenue {rev.value:.10g} (tail bound {rev.tail_bound:.3g}); clamped samples {int(traj.clamped.sum())}")
    return EXIT_OK


def cmd_calibrate(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    cal = calibrate_r(s.bio, s.econ, s.diffusion)
    rows = [
        ["E_bar", cal.E_bar],
        ["r", cal.r],
        ["z_star", cal.z_star],
        ["iterations", cal.iterations],
        ["golden-rule residual", cal.golden_rule_residual],
        ["effort mismatch", cal.effort_mismatch],
        ["FOC residual", cal.foc.residual_norm],
        ["FOC residual (finite differences)", cal.foc.fd_residual_norm],
        ["open-access x1, x2", f"{cal.foc.x1:.6g}, {cal.foc.x2:.6g}"],
    ]
    out(f"growth-rate calibration, scenario {s.name}")
    out(table(rows, ("quantity", "value")))
    if args.csv:
        _write(args.csv, write_csv([[cal.E_bar, cal.r, cal.z_star, cal.iterations]], ("E_bar", "r", "z_star", "iterations")))
    return EXIT_OK


def cmd_compare(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    pat, glo, contrasts = compare_models(s)
    rows = [[c, a, b] for c, a, b in zip(EQUILIBRIUM_COLUMNS, equilibrium_row(pat), equilibrium_row(glo))]
    out(f"patches vs global, scenario {s.name}")
    out(table(rows, ("quantity", "patches", "global")))
    out()
    out(table([[c.topic, c.patches, c.global_] for c in contrasts], ("contrast", "patches", "global")))
    if args.csv:
        _write(args.csv, write_csv(rows, ("quantity", "patches", "global")))
    return EXIT_OK


def cmd_alpha_sweep(args, out: Output) -> int:
    s = load_scenario(args.scenario)
    rows = alpha_sweep(s, args.points, args.model)
    if s.diffusion.mode == "constant":
        out(f"note: constant diffusion {s.diffusion.value:g} reused as lambda0 for lambda0*alpha*(1-alpha)")
    out(table(rows, SWEEP_COLUMNS))
    if args.csv:
        _write(args.csv, write_csv(rows, SWEEP_COLUMNS))
    return EXIT_OK


def cmd_reproduce(args, out: Output) -> int:
    res = reproduce_paper()
    out("Built-in published scenario: alpha=0.5, delta=0.05, c=0.15, q=2, lambda=20, r1=0.4, r2=0.05")
    out(f"*** NOTE: {PAPER_P_NOTE} ***")
    out()
    out(table(
        [[r.quantity, r.reported, r.computed, r.deviation, r.kind, r.status] for r in res.rows],
        ("quantity", "reported", "computed", "deviation", "kind", "status"),
    ))
    out()
    for r in res.rows:
        if r.note:
            out(f"{r.quantity}: {r.note}")
    if args.csv:
        _write(args.csv, res.csv())
    if args.out:
        _write(args.out, res.record().to_json())
    return EXIT_OK


def cmd_dump_scenario(args, out: Output) -> int:
    print(scenario_to_toml(load_scenario(args.scenario)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marine-reserves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--quiet", action="store_true", help="suppress table output")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
        return p

    def scenario_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", metavar="FILE", help="TOML scenario (default: built-in published scenario)")

    p = add("equilibrium", cmd_equilibrium, "stationary optimum of a reserve model")
    scenario_arg(p)
    p.add_argument("--model", choices=("patches", "global"), default="patches")
    p.add_argument("--csv", metavar="PATH")

    p = add("check", cmd_check, "normality and profitability diagnostics")
    scenario_arg(p)

    p = add("simulate", cmd_simulate, "integrate the [simulation] table of a scenario")
    scenario_arg(p)
    p.add_argument("--model", help="patches, global, patches_open, global_open (default: scenario variant)")
    p.add_argument("--out", metavar="PATH", required=True)

    p = add("calibrate", cmd_calibrate, "aggregate growth rate matching the open-access effort")
    scenario_arg(p)
    p.add_argument("--csv", metavar="PATH")

    p = add("compare", cmd_compare, "patches vs global equilibria side by side")
    scenario_arg(p)
    p.add_argument("--csv", metavar="PATH")

    p = add("alpha-sweep", cmd_alpha_sweep, "stationary optimum over a grid of reserve shares")
    scenario_arg(p)
    p.add_argument("--points", type=int, default=19)
    p.add_argument("--model", choices=("patches", "global"), default="patches")
    p.add_argument("--csv", metavar="PATH")

    p = add("reproduce-paper", cmd_reproduce, "audit the published numbers of the built-in scenario")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="JSON run record")

    p = add("dump-scenario", cmd_dump_scenario, "print a scenario as TOML")
    scenario_arg(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    out = Output(args.quiet)
    try:
        return args.func(args, out)
    except (ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, ZeroDivisionError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
