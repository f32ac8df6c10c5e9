"""Higher-level runs behind the CLI: published-number audit, model comparison, alpha sweep."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from . import growth
from .control import CalibrationResult, calibrate_r
from .equilibrium import EquilibriumReport, global_equilibrium, patches_equilibrium
from .params import DomainError, SolverError
from .scenario import PAPER_P_NOTE, PAPER_SCENARIO, RunRecord, Scenario, scenario_digest

EXACT_TOL = 1e-12


def fmt(v: Any) -> str:
    """CSV cell: floats at 17 significant digits, booleans lower-case, None empty."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(rows: Iterable[Sequence[Any]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def table(rows: Sequence[Sequence[Any]], header: Sequence[str]) -> str:
    """Left-aligned plain-text table."""

    def cell(v: Any) -> str:
        if isinstance(v, float):
            return format(v, ".6g")
        return fmt(v)

    cells = [list(header)] + [[cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


EQUILIBRIUM_COLUMNS = ("x1_star", "x2_star", "E_star", "lambda_star", "J_star", "normal", "profitable", "feasible")


def equilibrium_row(rep: EquilibriumReport) -> list[Any]:
    return [getattr(rep, c) for c in EQUILIBRIUM_COLUMNS]


@dataclass
class Deviation:
    quantity: str
    reported: float
    computed: float
    deviation: float
    kind: str
    status: str
    note: str = ""


def deviation(quantity: str, reported: float, computed: float, note: str = "") -> Deviation:
    """Relative deviation when the reported value is nonzero, absolute otherwise."""
    if reported != 0:
        dev, kind = (computed - reported) / abs(reported), "relative"
    else:
        dev, kind = computed - reported, "absolute"
    if abs(dev) <= EXACT_TOL:
        status = "exact"
    elif abs(dev) <= 0.01:
        status = "within 1%"
    else:
        status = "DEVIATES"
    return Deviation(quantity, reported, computed, dev, kind, status, note)


@dataclass
class AuditResult:
    scenario: Scenario
    calibration: CalibrationResult
    patches: EquilibriumReport
    global_: EquilibriumReport
    rows: list[Deviation]

    def record(self) -> RunRecord:
        return RunRecord(
            scenario_digest=scenario_digest(self.scenario),
            equilibrium={"patches": dataclasses.asdict(self.patches), "global": dataclasses.asdict(self.global_)},
            diagnostics={
                "price_note": PAPER_P_NOTE,
                "calibration": dataclasses.asdict(self.calibration),
            },
            deviations=[dataclasses.asdict(r) for r in self.rows],
        )

    def csv(self) -> str:
        return write_csv(
            ([r.quantity, r.reported, r.computed, r.deviation, r.kind, r.status] for r in self.rows),
            ("quantity", "reported", "computed", "deviation", "deviation_kind", "status"),
        )


# Values published alongside the parameter set of the built-in scenario.
REPORTED = {
    "E_bar": 0.0566,
    "r": 0.28739,
    "patches_E": 0.0457,
    "patches_x1": 0.21875,
    "patches_x2": 0.0302,
    "global_E": 0.0,
    "global_x1": 0.875,
    "global_x2": 0.125,
}


def reproduce_paper(scenario: Scenario = PAPER_SCENARIO) -> AuditResult:
    """Recompute every published number of the built-in scenario and tabulate deviations.

    Nothing here asserts agreement; deviations are reported as found.
    """
    bio, econ = scenario.bio, scenario.econ
    cal = calibrate_r(bio, econ, scenario.diffusion)
    pat = patches_equilibrium(bio, econ)
    glo = global_equilibrium(bio, econ)

    # effort implied by stationarity at the published fished-zone stock
    x2_rep = REPORTED["patches_x2"]
    a = bio.alpha
    F1 = growth.patch_growth(pat.x1_star, bio.r1, a)
    F2 = growth.patch_growth(x2_rep, bio.r2, 1 - a)
    implied_E = (1 - a) / (econ.q * x2_rep) * (F1 + F2)

    rows = [
        deviation("open-access patch effort E_bar", REPORTED["E_bar"], cal.E_bar, "singular stationary point, our costate system"),
        deviation("calibrated aggregate rate r", REPORTED["r"], cal.r),
        deviation("patches E*", REPORTED["patches_E"], pat.E_star, "" if pat.feasible else "equilibrium not normal: no admissible diffusion"),
        deviation("patches x1*", REPORTED["patches_x1"], pat.x1_star),
        deviation("patches x2*", REPORTED["patches_x2"], pat.x2_star, "positive root of the fished-zone cubic"),
        deviation("global E*", REPORTED["global_E"], glo.E_star),
        deviation("global x1*", REPORTED["global_x1"], glo.x1_star),
        deviation("global x2*", REPORTED["global_x2"], glo.x2_star),
        deviation("patches E* implied by reported x2*", REPORTED["patches_E"], implied_E, "internal consistency of the published pair (x2*, E*)"),
    ]
    return AuditResult(scenario, cal, pat, glo, rows)


@dataclass
class Contrast:
    topic: str
    patches: str
    global_: str


def compare_models(scenario: Scenario) -> tuple[EquilibriumReport, EquilibriumReport, list[Contrast]]:
    """Side-by-side stationary optima with the qualitative contrasts between the models."""
    bio, econ = scenario.bio, scenario.econ
    pat = patches_equilibrium(bio, econ)
    glo = global_equilibrium(bio, econ)

    # probe dependence of x1* on c/(pq) by doubling the price
    doubled = dataclasses.replace(econ, p=2 * econ.p)
    pat2 = patches_equilibrium(bio, doubled)
    glo2 = global_equilibrium(bio, doubled)

    x2g = glo.x2_star
    a = bio.alpha
    if 0 < x2g < 1 - a:
        # F1 >= 0 on [0, alpha], so F1(x1) + F2(x2g) >= F2(x2g) > 0 for every x1
        residual_floor = growth.patch_growth(x2g, bio.r2, 1 - a)
        branch = f"no patch equilibrium has x2 = c(1-alpha)/(pq): F1(x1)+F2(x2) >= {residual_floor:.6g} > 0 on [0, alpha]"
    else:
        branch = "c(1-alpha)/(pq) lies outside (0, 1-alpha): the exclusion argument does not apply"

    contrasts = [
        Contrast(
            "x1* vs c/(pq)",
            f"alpha(r1-delta)/(2 r1) = {pat.x1_star:.6g}, unchanged ({pat2.x1_star:.6g}) when p doubles",
            f"1 - (1-alpha) c/(pq) = {glo.x1_star:.6g}, moves to {glo2.x1_star:.6g} when p doubles",
        ),
        Contrast("x2* form", f"root of a cubic = {pat.x2_star:.6g}; {branch}", f"c(1-alpha)/(pq) = {glo.x2_star:.6g}"),
        Contrast("E*", f"{pat.E_star:.6g} (non-null)", f"{glo.E_star:.6g} (null)"),
        Contrast("J*", f"{pat.J_star:.6g} (non-null)", f"{glo.J_star:.6g} (null)"),
        Contrast("normal", str(pat.normal).lower(), f"{str(glo.normal).lower()} (normal iff pq > c)"),
    ]
    return pat, glo, contrasts


SWEEP_COLUMNS = (
    "alpha", "lambda_eff", "x1_star", "x2_star", "E_star", "lambda_star",
    "lambda0_required", "J_star", "normal", "feasible", "diffusion_matches",
)


def alpha_sweep(scenario: Scenario, points: int, model: str = "patches") -> list[list[Any]]:
    """Stationary optimum on an interior grid of reserve shares.

    Diffusion is size dependent, ``lambda0 * alpha * (1 - alpha)``; a
    constant-mode scenario has its coefficient reused as ``lambda0``. The
    reserve share is not optimised.
    """
    if points < 1:
        raise DomainError("points must be >= 1")
    lam0 = scenario.diffusion.value
    rows: list[list[Any]] = []
    for k in range(1, points + 1):
        alpha = k / (points + 1)
        lam_eff = lam0 * alpha * (1 - alpha)
        bio = dataclasses.replace(scenario.bio, alpha=alpha)
        try:
            rep = patches_equilibrium(bio, scenario.econ) if model == "patches" else global_equilibrium(bio, scenario.econ)
        except (DomainError, SolverError):
            rows.append([alpha, lam_eff] + [None] * (len(SWEEP_COLUMNS) - 2))
            continue
        lam_star = rep.lambda_star
        lam0_req = lam_star / (alpha * (1 - alpha)) if lam_star is not None else None
        matches = lam_star is not None and math.isclose(lam_eff, lam_star, rel_tol=1e-9, abs_tol=1e-15)
        rows.append([
            alpha, lam_eff, rep.x1_star, rep.x2_star, rep.E_star, lam_star,
            lam0_req, rep.J_star, rep.normal, rep.feasible, matches,
        ])
    return rows
