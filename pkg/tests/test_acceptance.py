"""One test per acceptance criterion; each records a PASS/FAIL line for the terminal summary."""

import math
import subprocess
import sys
import time

import numpy as np
from draws import open_access_params, slow_reserve_params, threshold_params, valid_patch_params

from marine_reserves.cli import main
from marine_reserves.control import calibrate_r, clark_golden_rule, golden_rule_residual, patches_open_stationary
from marine_reserves.dynamics import global_reserve_rhs
from marine_reserves.equilibrium import (
    T_function,
    cubic_residual,
    el_residual,
    global_equilibrium,
    normality_diagnosis,
    patches_equilibrium,
    patches_x1_star,
    patches_x2_star,
)
from marine_reserves.growth import aggregate_growth
from marine_reserves.params import BioParams, DiffusionSpec, EconParams, ModelVariant, State
from marine_reserves.scenario import PAPER_SCENARIO
from marine_reserves.simulation import ControlSchedule, Trajectory, discounted_revenue, integrate, stationarity_drift

EPS = np.finfo(float).eps
BASE_BIO, BASE_ECON = PAPER_SCENARIO.bio, PAPER_SCENARIO.econ
THETA20_ECON = EconParams(p=1.5, q=2.0, c=0.15, delta=0.05)


def cubic_oracle(bio: BioParams, econ: EconParams, step: float = 1e-6, chunk: int = 200_000) -> float:
    """First sign change on a 1e-6 grid from zero, then plain bisection to the last bit."""
    b = 1.0 - bio.alpha
    th = econ.p * econ.q / econ.c
    r1, r2, d = bio.r1, bio.r2, econ.delta
    a3, a2, a1 = 2 * r2 * th / b**2, -(th * (r2 - d) + r2) / b, -d
    a0 = -bio.alpha * (r1 - d) * (r1 + d) / (4 * r1)

    def g(x):
        return ((a3 * x + a2) * x + a1) * x + a0

    start = 0
    while True:
        xs = (start + np.arange(chunk + 1)) * step
        pos = np.nonzero(g(xs) > 0)[0]
        if pos.size:
            lo, hi = float(xs[pos[0] - 1]), float(xs[pos[0]])
            break
        start += chunk
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return mid
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid


def test_criterion_01_closed_form_reserve_stock(criterion):
    x1 = patches_x1_star(BASE_BIO, BASE_ECON)
    err = abs(x1 - 0.21875)
    ok = err <= 1e-12
    criterion(1, "closed-form reserve stock 0.21875", ok, f"x1*={x1!r}, |err|={err:.1e}")
    assert ok


def test_criterion_02_global_equilibrium(criterion):
    rep = global_equilibrium(BASE_BIO, BASE_ECON)
    errs = [abs(rep.x1_star - 0.875), abs(rep.x2_star - 0.125), abs(rep.E_star), abs(rep.lambda_star), abs(rep.J_star)]
    ok = max(errs) <= 1e-12
    criterion(2, "global equilibrium (0.875, 0.125), E*=lambda*=J*=0", ok, f"max |err|={max(errs):.1e}")
    assert ok


def test_criterion_03_cubic_certificate(criterion):
    rng = np.random.default_rng(3)
    params = [(BASE_BIO, BASE_ECON)] + [valid_patch_params(rng) for _ in range(500)]
    t0 = time.perf_counter()
    roots = [patches_x2_star(b, e) for b, e in params]
    solve_time = time.perf_counter() - t0
    residual = max(abs(cubic_residual(x, b, e)) for x, (b, e) in zip(roots, params))
    t1 = time.perf_counter()
    oracle = [cubic_oracle(b, e) for b, e in params]
    total_time = solve_time + time.perf_counter() - t1
    gap = max(abs(x - o) for x, o in zip(roots, oracle))
    ok = residual <= 1e-10 and gap <= 1e-8 and total_time < 5.0
    criterion(3, "cubic certificate, 501 instances", ok,
              f"max residual={residual:.1e}, max oracle gap={gap:.1e}, solve {solve_time:.2f}s, with oracle {total_time:.2f}s")
    assert ok


def test_criterion_04_euler_lagrange_residuals(criterion):
    rng = np.random.default_rng(4)
    worst = 0.0
    count = 0
    for bio, econ in [(BASE_BIO, BASE_ECON), (BASE_BIO, THETA20_ECON)] + [valid_patch_params(rng) for _ in range(500)]:
        rep = patches_equilibrium(bio, econ)
        worst = max(worst, *map(abs, el_residual(rep.state, bio, econ, "patches")))
        count += 1
    global_cases = [(BASE_BIO, BASE_ECON), (BASE_BIO, THETA20_ECON)]
    for _ in range(500):
        bio, econ = valid_patch_params(rng)
        bio = BioParams(bio.r1, bio.r2, bio.alpha, r=rng.uniform(0.05, 2.0))
        if econ.p * econ.q > econ.c * (1 - bio.alpha):
            global_cases.append((bio, econ))
    for bio, econ in global_cases:
        rep = global_equilibrium(bio, econ)
        worst = max(worst, *map(abs, el_residual(rep.state, bio, econ, "global")))
        count += 1
    ok = worst <= 1e-9
    criterion(4, "Euler-Lagrange residuals at returned equilibria", ok, f"{count} equilibria, max={worst:.1e}")
    assert ok


def test_criterion_05_T_identity(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        bio, econ = valid_patch_params(rng)
        th = econ.theta
        worst = max(worst, abs(T_function(1 / th, bio, econ) - (1 - th) * bio.r2 / th**2))
    ok = worst <= 1e-12
    criterion(5, "T(1/theta) identity, 1000 draws", ok, f"max |diff|={worst:.1e}")
    assert ok


def test_criterion_06_normality_equivalence(criterion):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    disagree = sum(not normality_diagnosis(*threshold_params(rng)).agrees for _ in range(1000))
    normal_slow = sum(normality_diagnosis(*slow_reserve_params(rng)).direct_normal for _ in range(1000))
    elapsed = time.perf_counter() - t0
    ok = disagree == 0 and normal_slow == 0 and elapsed < 10.0
    criterion(6, "threshold decision matches density comparison", ok,
              f"{disagree}/1000 disagreements, {normal_slow}/1000 normal with r1<=r2, {elapsed:.2f}s")
    assert ok


def test_criterion_07_aggregation_identity(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        x1 = rng.uniform(0, 1)
        x2 = rng.uniform(0, 1 - x1)
        lam, r, alpha = rng.uniform(0, 50), rng.uniform(0.01, 3), rng.uniform(0.05, 0.95)
        bio = BioParams(0.4, 0.05, alpha, r=r)
        d1, d2 = global_reserve_rhs(State(x1, x2), 0.0, DiffusionSpec.constant(lam), bio, BASE_ECON)
        phi = aggregate_growth(x1 + x2, r)
        # rounding scale: magnitudes of the summands
        scale = abs(d1) + abs(d2) + abs(phi) + lam * (x1 / alpha + x2 / (1 - alpha))
        worst = max(worst, abs(d1 + d2 - phi) / (EPS * max(scale, 1.0)))
    ok = worst <= 8
    criterion(7, "aggregation identity with E=0", ok, f"max error {worst:.1f} ulp of summand scale")
    assert ok


def test_criterion_08_stationarity(criterion):
    cases = []
    glo = global_equilibrium(BASE_BIO, BASE_ECON)
    cases.append(("global built-in", ModelVariant.GLOBAL_RESERVE, glo.state, 0.0, DiffusionSpec.constant(glo.lambda_star), BASE_BIO, BASE_ECON))
    pat = patches_equilibrium(BASE_BIO, THETA20_ECON)
    cases.append(("patches theta=20", ModelVariant.PATCHES_RESERVE, pat.state, pat.E_star, DiffusionSpec.constant(pat.lambda_star), BASE_BIO, THETA20_ECON))
    foc = patches_open_stationary(BASE_BIO, BASE_ECON, PAPER_SCENARIO.diffusion)
    cases.append(("open-access patches", ModelVariant.PATCHES_OPEN, foc.state, foc.E, PAPER_SCENARIO.diffusion, BASE_BIO, BASE_ECON))
    rng = np.random.default_rng(8)
    while len(cases) < 13:
        bio, econ = threshold_params(rng)
        rep = patches_equilibrium(bio, econ)
        if rep.feasible:
            cases.append(("draw", ModelVariant.PATCHES_RESERVE, rep.state, rep.E_star, DiffusionSpec.constant(rep.lambda_star), bio, econ))
    drifts = [stationarity_drift(v, s, E, spec, b, e, 100.0, 0.01) for _, v, s, E, spec, b, e in cases]
    ok = max(drifts) <= 1e-6
    criterion(8, "stationarity over 100 time units", ok,
              f"{len(cases)} feasible equilibria, max drift={max(drifts):.1e}; the p=0.3 patch optimum has no admissible lambda")
    assert ok


def test_criterion_09_pontryagin_consistency(criterion):
    rng = np.random.default_rng(9)
    cases = [(BASE_BIO, BASE_ECON, PAPER_SCENARIO.diffusion)] + [open_access_params(rng) for _ in range(20)]
    sols = [patches_open_stationary(b, e, s) for b, e, s in cases]
    analytic = max(f.residual_norm for f in sols)
    fd = max(f.fd_residual_norm for f in sols)
    ok = analytic <= 1e-8 and fd <= 1e-6
    criterion(9, "open-access first-order conditions", ok, f"21 instances, analytic {analytic:.1e}, finite-difference {fd:.1e}")
    assert ok


def test_criterion_10_calibration(criterion):
    cal = calibrate_r(BASE_BIO, BASE_ECON, PAPER_SCENARIO.diffusion)
    z, E = clark_golden_rule(cal.r, BASE_ECON)
    mismatch = abs(E - cal.E_bar)
    resid = abs(golden_rule_residual(z, cal.r, BASE_ECON.p, BASE_ECON.q, BASE_ECON.c, BASE_ECON.delta))
    ok = mismatch <= 1e-8 and resid <= 1e-10
    criterion(10, "calibration round trip", ok, f"r={cal.r:.10g}, |E-E_bar|={mismatch:.1e}, golden-rule residual={resid:.1e}")
    assert ok


def test_criterion_11_published_number_audit(criterion, tmp_path, capsys):
    path = tmp_path / "audit.csv"
    code = main(["reproduce-paper", "--csv", str(path)])
    text = capsys.readouterr().out
    lines = path.read_text().splitlines()
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    required = ["open-access patch effort E_bar", "calibrated aggregate rate r", "patches E*", "patches x2*",
                "patches x1*", "global E*", "global x1*", "global x2*"]
    present = all(q in rows and q in text for q in required)
    exact = all(rows[q][5] == "exact" for q in ("patches x1*", "global E*", "global x1*", "global x2*"))
    detail = "; ".join(f"{q} dev {float(rows[q][3]):+.3g}" for q in required[:4])
    ok = code == 0 and present and exact
    criterion(11, "published-number audit produced", ok, detail)
    assert ok


def test_criterion_12_revenue_quadrature(criterion):
    econ, alpha, x2, E, T = BASE_ECON, 0.5, 0.3, 0.4, 50.0
    times = np.linspace(0, T, 5001)
    n = times.size
    rent = (econ.p * econ.q * x2 / (1 - alpha) - econ.c) * E
    traj = Trajectory(ModelVariant.PATCHES_RESERVE, times, np.tile([0.2, x2], (n, 1)), np.full(n, E), np.full(n, rent), np.zeros(n, bool))
    exact = rent * (1 - math.exp(-econ.delta * T)) / econ.delta
    rel = abs(discounted_revenue(traj, econ, alpha).value - exact) / exact

    # the same check on an integrated stationary run
    pat = patches_equilibrium(BASE_BIO, THETA20_ECON)
    run = integrate(ModelVariant.PATCHES_RESERVE, pat.state, ControlSchedule.constant(pat.E_star), BASE_BIO, THETA20_ECON,
                    DiffusionSpec.constant(pat.lambda_star), 400.0)
    exact_run = pat.J_star * (1 - math.exp(-THETA20_ECON.delta * 400.0))
    rel_run = abs(discounted_revenue(run, THETA20_ECON, alpha).value - exact_run) / exact_run
    ok = rel <= 1e-8 and rel_run <= 1e-8
    criterion(12, "revenue quadrature against closed form", ok, f"constant state rel={rel:.1e}, stationary run rel={rel_run:.1e}")
    assert ok


def test_criterion_13_determinism(criterion, tmp_path):
    outputs = []
    for k in range(2):
        csv_path, json_path = tmp_path / f"audit{k}.csv", tmp_path / f"run{k}.json"
        subprocess.run([sys.executable, "-m", "marine_reserves", "--quiet", "reproduce-paper", "--csv", str(csv_path), "--out", str(json_path)],
                       check=True)
        outputs.append((csv_path.read_bytes(), json_path.read_bytes()))
    ok = outputs[0] == outputs[1]
    criterion(13, "byte-identical reproduce-paper artifacts", ok, f"{len(outputs[0][0])} CSV bytes, {len(outputs[0][1])} JSON bytes")
    assert ok
