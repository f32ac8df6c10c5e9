"""Optimal stationary solutions of the two reserve models and their diagnostics.

Patch model
    The non-trivial stationary point of the Euler-Lagrange system has the
    reserve stock fixed by ``F1'(x1) = delta`` and the fished stock given by
    the positive root of a cubic. Effort, diffusion coefficient and rent
    follow from the stationary dynamics.

Global (split) model
    The stationary point is closed form, ``x2 = c(1-alpha)/(pq)``,
    ``x1 = 1 - x2``, with zero effort, zero diffusion and zero rent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from . import growth
from .dynamics import vector_field
from .params import BioParams, DomainError, EconParams, ModelVariant, SolverError, State
from .rootfind import bracketed_root, expand_upper

CUBIC_TOL = 1e-10
# relative slack for density comparisons that are exact in real arithmetic
_RTOL = 1e-12


@dataclass(frozen=True)
class Finding:
    key: str
    value: Any
    note: str = ""


@dataclass
class EquilibriumReport:
    model: str
    x1_star: float
    x2_star: float
    E_star: float
    lambda_star: float | None
    J_star: float
    normal: bool
    profitable: bool
    feasible: bool
    diagnostics: list[Finding] = field(default_factory=list)

    def finding(self, key: str) -> Any:
        for f in self.diagnostics:
            if f.key == key:
                return f.value
        raise KeyError(key)

    @property
    def state(self) -> State:
        return State(self.x1_star, self.x2_star)


@dataclass
class NormalityDiagnosis:
    theta: float
    theta0: float | None
    alpha_bound: float | None
    decision: str  # "normal" | "not_normal" | "never_normal"
    direct_normal: bool
    notes: list[str] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return (self.decision == "normal") == self.direct_normal


def _require_r1_above_delta(bio: BioParams, econ: EconParams) -> None:
    if bio.r1 <= econ.delta:
        raise DomainError(f"no nontrivial equilibrium: r1={bio.r1} <= delta={econ.delta}")


def patches_x1_star(bio: BioParams, econ: EconParams) -> float:
    _require_r1_above_delta(bio, econ)
    return bio.alpha * (bio.r1 - econ.delta) / (2.0 * bio.r1)


def reserve_growth_at_optimum(bio: BioParams, econ: EconParams) -> float:
    """``F1(x1*) = alpha (r1 - delta)(r1 + delta) / (4 r1)``, the cubic's right side."""
    r1, d = bio.r1, econ.delta
    return bio.alpha * (r1 - d) * (r1 + d) / (4.0 * r1)


def cubic_lhs(x2: float, bio: BioParams, econ: EconParams) -> float:
    a, r2, d = bio.alpha, bio.r2, econ.delta
    th = econ.theta
    b = 1.0 - a
    return x2 * (2.0 * r2 * th / b**2 * x2**2 - (th * (r2 - d) + r2) / b * x2 - d)


def cubic_lhs_derivative(x2: float, bio: BioParams, econ: EconParams) -> float:
    a, r2, d = bio.alpha, bio.r2, econ.delta
    th = econ.theta
    b = 1.0 - a
    return 6.0 * r2 * th / b**2 * x2**2 - 2.0 * (th * (r2 - d) + r2) / b * x2 - d


def cubic_residual(x2: float, bio: BioParams, econ: EconParams) -> float:
    return cubic_lhs(x2, bio, econ) - reserve_growth_at_optimum(bio, econ)


def patches_x2_star(bio: BioParams, econ: EconParams) -> float:
    """Unique positive root of the fished-zone cubic.

    Bisection on a certified sign change (negative at 0, bracket end doubled
    from ``max(1-alpha, 1)``) down to width 1e-13, then three Newton steps.
    """
    _require_r1_above_delta(bio, econ)
    if econ.c <= 0:
        raise DomainError("c > 0 required for the patch equilibrium")

    def g(x: float) -> float:
        return cubic_residual(x, bio, econ)

    def dg(x: float) -> float:
        return cubic_lhs_derivative(x, bio, econ)

    if not g(0.0) < 0:
        raise SolverError(f"cubic bracket not negative at 0 (g(0)={g(0.0)})")
    hi = expand_upper(g, 0.0, max(1.0 - bio.alpha, 1.0))
    if not g(hi) > 0:
        raise SolverError(f"cubic bracket not positive at upper end {hi}")
    root = bracketed_root(g, dg, 0.0, hi)
    res = abs(g(root))
    if res > CUBIC_TOL:
        raise SolverError(f"cubic residual {res:.3e} exceeds {CUBIC_TOL:.0e} at x2={root}")
    return root


def T_function(z: float, bio: BioParams, econ: EconParams) -> float:
    """Cubic left side rewritten in fished-zone density ``z = x2/(1-alpha)``."""
    r2, d = bio.r2, econ.delta
    th = econ.theta
    return z * (2.0 * r2 * th * z**2 - (th * (r2 - d) + r2) * z - d)


def theta0(bio: BioParams, econ: EconParams) -> float:
    r1, r2, d = bio.r1, bio.r2, econ.delta
    if r1 == r2:
        raise DomainError("threshold undefined for r1 == r2")
    _require_r1_above_delta(bio, econ)
    return (2.0 * r1 / (r1 - d) + r2 / d) * r1 / (r1 - r2)


def _normality_margin(bio: BioParams, econ: EconParams) -> float:
    # t = ((r1-d)/r1)(theta d (r1-r2)/r1 - r2) - 2d; normality reads alpha (r1+d) <= (1-alpha) t
    r1, r2, d = bio.r1, bio.r2, econ.delta
    return (r1 - d) / r1 * (econ.theta * d * (r1 - r2) / r1 - r2) - 2.0 * d


def alpha_bound(bio: BioParams, econ: EconParams) -> float | None:
    """Largest reserve share for which the patch optimum is normal.

    Defined only when ``r1 > r2`` and ``theta > theta0``; ``None`` otherwise.
    """
    if bio.r1 <= bio.r2:
        return None
    if econ.theta <= theta0(bio, econ):
        return None
    t = _normality_margin(bio, econ)
    return t / (bio.r1 + econ.delta + t)


def r2_upper_bound(bio: BioParams, econ: EconParams) -> float:
    """Largest ``r2`` compatible with ``theta > theta0`` for the given ``theta``."""
    r1, d, th = bio.r1, econ.delta, econ.theta
    return r1 * (th - 2.0 * r1 / (r1 - d)) / (th + r1 / d)


def _densities(x1: float, x2: float, alpha: float) -> tuple[float, float]:
    return x1 / alpha, x2 / (1.0 - alpha)


def _is_normal(d1: float, d2: float) -> bool:
    return d2 <= d1 * (1.0 + _RTOL)


def normality_diagnosis(bio: BioParams, econ: EconParams) -> NormalityDiagnosis:
    _require_r1_above_delta(bio, econ)
    th = econ.theta
    notes: list[str] = []
    try:
        th0 = theta0(bio, econ)
    except DomainError:
        th0 = None
        notes.append("theta0 undefined for r1 == r2: bound unavailable")

    x1 = patches_x1_star(bio, econ)
    x2 = patches_x2_star(bio, econ)
    d1, d2 = _densities(x1, x2, bio.alpha)
    direct = _is_normal(d1, d2)

    bound = None
    if bio.r1 <= bio.r2:
        decision = "never_normal"
    elif th <= th0:
        decision = "not_normal"
        notes.append(f"theta={th:.6g} <= theta0={th0:.6g}: no reserve share gives a normal optimum")
    else:
        bound = alpha_bound(bio, econ)
        decision = "normal" if bio.alpha <= bound else "not_normal"
    if (decision == "normal") != direct:
        notes.append(f"threshold decision {decision} disagrees with density comparison (d1={d1:.17g}, d2={d2:.17g})")
    return NormalityDiagnosis(th, th0, bound, decision, direct, notes)


def patches_equilibrium(bio: BioParams, econ: EconParams) -> EquilibriumReport:
    """Stationary optimum of the patch reserve model with all diagnostics."""
    a, d = bio.alpha, econ.delta
    x1 = patches_x1_star(bio, econ)
    x2 = patches_x2_star(bio, econ)
    F1 = growth.patch_growth(x1, bio.r1, a)
    F2 = growth.patch_growth(x2, bio.r2, 1.0 - a)
    E = (1.0 - a) / (econ.q * x2) * (F1 + F2)
    d1, d2 = _densities(x1, x2, a)
    normal = _is_normal(d1, d2)
    lam = F1 / (d1 - d2) if d1 > d2 else None
    J = (econ.p * econ.q * d2 - econ.c) * E / d
    profitable = econ.p * econ.q * d2 - econ.c > _RTOL * max(econ.c, 1.0)
    effort_ok = 0.0 <= E <= econ.e_max
    feasible = lam is not None and lam >= 0 and effort_ok

    diag = [
        Finding("theta", econ.theta),
        Finding("cubic_residual", cubic_residual(x2, bio, econ)),
        Finding("reserve_density", d1),
        Finding("fished_density", d2),
        Finding("break_even_density", 1.0 / econ.theta),
        Finding("r2_upper_bound", r2_upper_bound(bio, econ), "largest r2 compatible with theta > theta0"),
    ]
    try:
        diag.append(Finding("theta0", theta0(bio, econ)))
    except DomainError as exc:
        diag.append(Finding("theta0", None, str(exc)))
    diag.append(Finding("alpha_bound", alpha_bound(bio, econ)))
    el = el_residual(State(x1, x2), bio, econ, "patches")
    diag.append(Finding("el_residual", max(abs(el[0]), abs(el[1]))))
    if lam is None:
        diag.append(Finding("lambda_star", F1 / (d1 - d2) if d1 != d2 else math.inf, "required diffusion is negative: not normal"))
    else:
        res = vector_field(ModelVariant.PATCHES_RESERVE, State(x1, x2), E, lam, bio, econ.q)
        diag.append(Finding("rhs_residual", max(abs(res[0]), abs(res[1]))))
    if not effort_ok:
        diag.append(Finding("effort_out_of_bounds", E, f"E* outside [0, {econ.e_max}]"))
    return EquilibriumReport("patches", x1, x2, E, lam, J, normal, profitable, feasible, diag)


def global_equilibrium(bio: BioParams, econ: EconParams) -> EquilibriumReport:
    """Closed-form stationary optimum of the global (split) model."""
    a = bio.alpha
    pq = econ.p * econ.q
    if not pq > econ.c * (1.0 - a):
        raise DomainError(f"interior equilibrium nonpositive: pq={pq} <= c(1-alpha)={econ.c * (1 - a)}")
    x2 = econ.c * (1.0 - a) / pq
    x1 = 1.0 - x2
    d1, d2 = _densities(x1, x2, a)
    theta_is_one = math.isclose(pq, econ.c, rel_tol=_RTOL)
    lam = None if theta_is_one else 0.0
    diag = [
        Finding("theta", pq / econ.c if econ.c > 0 else math.inf),
        Finding("reserve_density", d1),
        Finding("fished_density", d2),
        Finding("lambda_indeterminate", theta_is_one, "equal densities: any diffusion is stationary" if theta_is_one else ""),
    ]
    if bio.r is not None:
        el = el_residual(State(x1, x2), bio, econ, "global")
        diag.append(Finding("el_residual", max(abs(el[0]), abs(el[1]))))
    profitable = pq * d2 - econ.c > _RTOL * max(econ.c, 1.0)
    return EquilibriumReport("global", x1, x2, 0.0, lam, 0.0, _is_normal(d1, d2), profitable, True, diag)


def el_residual(state: State, bio: BioParams, econ: EconParams, variant: str) -> tuple[float, float]:
    """Right-hand sides of the stationary Euler-Lagrange system at ``state``.

    Both components vanish at a stationary point of the reduced variational
    problem.
    """
    x1, x2 = state
    a, d = bio.alpha, econ.delta
    if econ.c <= 0:
        raise DomainError("c > 0 required")
    k = x2 * (econ.p * econ.q * x2 / (econ.c * (1.0 - a)) - 1.0)
    if variant == "patches":
        F1 = bio.r1 * x1 * (1.0 - x1 / a)
        F2 = bio.r2 * x2 * (1.0 - x2 / (1.0 - a))
        dF1 = bio.r1 * (1.0 - 2.0 * x1 / a)
        dF2 = bio.r2 * (1.0 - 2.0 * x2 / (1.0 - a))
        return k * (dF2 - d) + F1 + F2, k * (d - dF1)
    if variant == "global":
        r, z = bio.aggregate_rate(), x1 + x2
        dphi = r - 2.0 * r * z
        return k * (dphi - d) + r * z * (1.0 - z), k * (d - dphi)
    raise DomainError(f"unknown Euler-Lagrange variant {variant!r}")
