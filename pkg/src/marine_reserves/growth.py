"""Logistic growth laws shared by every model variant.

Three shapes are used:

* per-patch logistic ``r x (1 - x/K)`` with a patch-specific capacity,
* the shared-field law ``r x (1 - z)`` where ``z`` is the whole-zone stock,
* the aggregate law ``r z (1 - z)``.

Summing the shared-field law over any split ``x1 + x2 = z`` gives the
aggregate law, which is what makes the global model consistent.
"""

from __future__ import annotations

from typing import Protocol

from .params import DomainError

# Integration may push z a hair above 1 or x a hair below 0.
DOMAIN_TOL = 1e-9


class GrowthLaw(Protocol):
    def __call__(self, x: float) -> float: ...

    def derivative(self, x: float) -> float: ...


def _check_patch(x: float, K: float) -> None:
    if K <= 0:
        raise DomainError(f"carrying capacity must be positive, got K={K}")
    if x < -DOMAIN_TOL:
        raise DomainError(f"negative biomass x={x}")


def patch_growth(x: float, r: float, K: float) -> float:
    _check_patch(x, K)
    return r * x * (1.0 - x / K)


def patch_growth_derivative(x: float, r: float, K: float) -> float:
    _check_patch(x, K)
    return r * (1.0 - 2.0 * x / K)


def shared_field_growth(x: float, z: float, r: float) -> float:
    if x < -DOMAIN_TOL or x > z + DOMAIN_TOL or z > 1.0 + DOMAIN_TOL:
        raise DomainError(f"shared-field growth needs 0 <= x <= z <= 1, got x={x}, z={z}")
    return r * x * (1.0 - z)


def aggregate_growth(z: float, r: float) -> float:
    if z < -DOMAIN_TOL or z > 1.0 + DOMAIN_TOL:
        raise DomainError(f"aggregate stock must lie in [0,1], got z={z}")
    return r * z * (1.0 - z)


def aggregate_growth_derivative(z: float, r: float) -> float:
    return r * (1.0 - 2.0 * z)


class LogisticPatch:
    """Per-patch logistic law bound to its rate and capacity.

    Any object with ``__call__`` and ``derivative`` satisfies ``GrowthLaw``,
    so tests can swap in other strictly concave laws.
    """

    def __init__(self, r: float, K: float):
        if r <= 0 or K <= 0:
            raise DomainError(f"logistic law needs r > 0 and K > 0, got r={r}, K={K}")
        self.r = r
        self.K = K

    def __call__(self, x: float) -> float:
        return patch_growth(x, self.r, self.K)

    def derivative(self, x: float) -> float:
        return patch_growth_derivative(x, self.r, self.K)

    def __repr__(self) -> str:
        return f"LogisticPatch(r={self.r}, K={self.K})"
