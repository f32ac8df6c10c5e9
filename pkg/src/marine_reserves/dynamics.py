"""Vector fields of the four two-zone model variants and related views.

The reserve variants harvest only the fished zone, at a rate proportional
to its *density* ``x2/(1-alpha)``. The open-access variants harvest both
zones in proportion to their *stocks*. The two conventions differ on
purpose and are kept as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import growth
from .growth import DOMAIN_TOL
from .params import BioParams, DiffusionSpec, DomainError, EconParams, ModelVariant, State


def _check_effort(E: float, econ: EconParams) -> None:
    if not 0.0 <= E <= econ.e_max:
        raise DomainError(f"effort E={E} outside [0, E_max={econ.e_max}]")


def _check_state(state: State, variant: ModelVariant) -> None:
    x1, x2 = state
    if x1 < -DOMAIN_TOL or x2 < -DOMAIN_TOL:
        raise DomainError(f"negative biomass in state {tuple(state)}")
    if not variant.is_patches and x1 + x2 > 1.0 + DOMAIN_TOL:
        raise DomainError(f"total stock {x1 + x2} exceeds carrying capacity 1")


def diffusion_flux(state: State, alpha: float, spec: DiffusionSpec) -> float:
    """Net biomass flow into the reserve driven by the density gap."""
    lam = spec.effective(alpha)
    if spec.mode == "size_dependent" and alpha in (0.0, 1.0):
        # lambda0*alpha*(1-alpha) vanishes at the ends; single-zone limit
        return 0.0
    x1, x2 = state
    return lam * (x2 / (1.0 - alpha) - x1 / alpha)


def natural_growth(variant: ModelVariant, state: State, bio: BioParams) -> float:
    """Summed growth of both zones before diffusion and harvest.

    This is ``F1(x1) + F2(x2)`` for the patch variants and ``phi(x1 + x2)``
    for the global variants; diffusion always cancels from the sum.
    """
    x1, x2 = state
    if variant.is_patches:
        return growth.patch_growth(x1, bio.r1, bio.alpha) + growth.patch_growth(x2, bio.r2, 1.0 - bio.alpha)
    return growth.aggregate_growth(x1 + x2, bio.aggregate_rate())


def harvest(variant: ModelVariant, state: State, E: float, alpha: float, q: float) -> tuple[float, float]:
    x1, x2 = state
    if variant.is_reserve:
        return 0.0, q * E * x2 / (1.0 - alpha)
    return q * E * x1, q * E * x2


def vector_field(variant: ModelVariant, state: State, E: float, lam: float, bio: BioParams, q: float) -> tuple[float, float]:
    """Unchecked vector field for solvers that may probe outside the domain."""
    x1, x2 = state
    a = bio.alpha
    flux = lam * (x2 / (1.0 - a) - x1 / a)
    if variant.is_patches:
        g1 = bio.r1 * x1 * (1.0 - x1 / a)
        g2 = bio.r2 * x2 * (1.0 - x2 / (1.0 - a))
    else:
        r, z = bio.aggregate_rate(), x1 + x2
        g1 = r * x1 * (1.0 - z)
        g2 = r * x2 * (1.0 - z)
    h1, h2 = harvest(variant, state, E, a, q)
    return g1 + flux - h1, g2 - flux - h2


def rhs(
    variant: ModelVariant,
    state: State,
    E: float,
    spec: DiffusionSpec,
    bio: BioParams,
    econ: EconParams,
) -> tuple[float, float]:
    """Time derivative ``(dx1/dt, dx2/dt)`` of the chosen variant."""
    state = State(*state)
    _check_effort(E, econ)
    _check_state(state, variant)
    x1, x2 = state
    a = bio.alpha
    flux = diffusion_flux(state, a, spec)
    if variant.is_patches:
        g1 = growth.patch_growth(x1, bio.r1, a)
        g2 = growth.patch_growth(x2, bio.r2, 1.0 - a)
    else:
        r, z = bio.aggregate_rate(), x1 + x2
        g1 = growth.shared_field_growth(x1, z, r)
        g2 = growth.shared_field_growth(x2, z, r)
    h1, h2 = harvest(variant, state, E, a, econ.q)
    return g1 + flux - h1, g2 - flux - h2


def patches_reserve_rhs(state, E, spec, bio, econ):
    return rhs(ModelVariant.PATCHES_RESERVE, state, E, spec, bio, econ)


def global_reserve_rhs(state, E, spec, bio, econ):
    return rhs(ModelVariant.GLOBAL_RESERVE, state, E, spec, bio, econ)


def patches_open_rhs(state, E, spec, bio, econ):
    return rhs(ModelVariant.PATCHES_OPEN, state, E, spec, bio, econ)


def global_open_rhs(state, E, spec, bio, econ):
    return rhs(ModelVariant.GLOBAL_OPEN, state, E, spec, bio, econ)


def density_view(state: State, alpha: float, q: float) -> tuple[float, float, float]:
    """Densities ``(X1, X2)`` and the catchability ``Q`` rescaled to density."""
    if not 0 < alpha < 1:
        raise DomainError("alpha in (0,1)")
    x1, x2 = state
    return x1 / alpha, x2 / (1.0 - alpha), q / (1.0 - alpha)


def instantaneous_rent(state: State, E: float, alpha: float, econ: EconParams) -> float:
    """Rent of the reserve variants: ``(p q x2/(1-alpha) - c) E``."""
    if E < 0:
        raise DomainError(f"negative effort E={E}")
    return (econ.p * econ.q * state[1] / (1.0 - alpha) - econ.c) * E


def rent(variant: ModelVariant, state: State, E: float, alpha: float, econ: EconParams) -> float:
    if variant.is_reserve:
        return instantaneous_rent(state, E, alpha, econ)
    if E < 0:
        raise DomainError(f"negative effort E={E}")
    return (econ.p * econ.q * (state[0] + state[1]) - econ.c) * E


def effort_from_rates(state: State, xdot_sum: float, bio: BioParams, q: float, variant: ModelVariant) -> float:
    """Recover the effort that produced a given total rate of change.

    Inverts the harvest term of the variant: the gap between natural growth
    and the observed ``dx1/dt + dx2/dt`` is what the fleet removed.
    """
    state = State(*state)
    removed = natural_growth(variant, state, bio) - xdot_sum
    if variant.is_reserve:
        if state.x2 <= 0:
            raise ZeroDivisionError("effort undefined at zero stock")
        return (1.0 - bio.alpha) / (q * state.x2) * removed
    if state.z <= 0:
        raise ZeroDivisionError("effort undefined at zero stock")
    return removed / (q * state.z)


@dataclass
class AdmissibilityReport:
    """Per-sample check of ``G - harvest(E_max) <= dx1/dt + dx2/dt <= G``."""

    ok: np.ndarray
    violation: np.ndarray
    tolerance: float
    lower_slack: np.ndarray
    upper_slack: np.ndarray

    @property
    def max_violation(self) -> float:
        return float(self.violation.max()) if self.violation.size else 0.0

    @property
    def admissible(self) -> bool:
        return bool(self.ok.all())


def admissible_curve_check(traj: Any, bio: BioParams, econ: EconParams, variant: ModelVariant) -> AdmissibilityReport:
    """Check a sampled trajectory against the admissible-rate band.

    ``traj`` needs ``times`` and ``states`` (shape ``(n, 2)``). Rates come
    from second-order differences on the trajectory's own grid, so the
    tolerance scales with the squared step times a third-derivative estimate.
    """
    t = np.asarray(traj.times, dtype=float)
    xs = np.asarray(traj.states, dtype=float)
    if t.size < 3:
        raise DomainError("admissibility check needs at least 3 samples")
    zsum = xs[:, 0] + xs[:, 1]
    rate = np.gradient(zsum, t, edge_order=2)
    g = np.array([natural_growth(variant, State(a, b), bio) for a, b in xs])
    hmax = np.array([sum(harvest(variant, State(a, b), econ.e_max, bio.alpha, econ.q)) for a, b in xs])
    lower = g - hmax
    upper = g

    h = float(np.max(np.diff(t)))
    d3 = np.gradient(np.gradient(rate, t, edge_order=2), t, edge_order=2)
    tol = max(1e-10, h * h * (1.0 + float(np.max(np.abs(d3)))))

    lower_slack = rate - lower
    upper_slack = upper - rate
    violation = np.maximum(0.0, np.maximum(-lower_slack, -upper_slack))
    return AdmissibilityReport(violation <= tol, violation, tol, lower_slack, upper_slack)
