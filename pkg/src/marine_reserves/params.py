"""Parameter records and shared value types for the two-zone reserve models."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple


class DomainError(ValueError):
    """An input lies outside the domain where a model quantity is defined."""


class SolverError(RuntimeError):
    """A numerical procedure failed to produce a certified answer."""


class ModelVariant(str, enum.Enum):
    PATCHES_RESERVE = "patches_reserve"
    GLOBAL_RESERVE = "global_reserve"
    PATCHES_OPEN = "patches_open"
    GLOBAL_OPEN = "global_open"

    @property
    def is_reserve(self) -> bool:
        return self in (ModelVariant.PATCHES_RESERVE, ModelVariant.GLOBAL_RESERVE)

    @property
    def is_patches(self) -> bool:
        return self in (ModelVariant.PATCHES_RESERVE, ModelVariant.PATCHES_OPEN)

    @classmethod
    def parse(cls, name: str) -> ModelVariant:
        """Accept enum values plus the short CLI names ``patches``/``global``."""
        key = name.strip().lower().replace("-", "_")
        aliases = {"patches": cls.PATCHES_RESERVE, "global": cls.GLOBAL_RESERVE}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join([*aliases, *(v.value for v in cls)])
            raise DomainError(f"unknown model variant {name!r} (expected one of {valid})") from None


class State(NamedTuple):
    """Biomass in the reserve (``x1``) and in the fished zone (``x2``)."""

    x1: float
    x2: float

    @property
    def z(self) -> float:
        return self.x1 + self.x2


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


@dataclass(frozen=True)
class EconParams:
    """Market and regulator constants.

    ``q`` is the catch rate per unit effort at unit density, ``c`` the cost
    per unit effort and ``delta`` the discount rate.
    """

    p: float
    q: float
    c: float
    delta: float
    e_max: float = 1.0

    def __post_init__(self) -> None:
        _require(self.p > 0, "p > 0")
        _require(self.q > 0, "q > 0")
        _require(self.c >= 0, "c >= 0")
        _require(self.delta > 0, "delta > 0")
        _require(self.e_max > 0, "e_max > 0")

    @property
    def theta(self) -> float:
        """Profitability ratio ``p*q/c``."""
        if self.c == 0:
            raise DomainError("theta = pq/c is undefined for c = 0")
        return self.p * self.q / self.c


@dataclass(frozen=True)
class BioParams:
    r1: float
    r2: float
    alpha: float
    r: float | None = None
    K: float = 1.0

    def __post_init__(self) -> None:
        _require(0 < self.alpha < 1, "alpha in (0,1)")
        _require(self.r1 > 0, "r1 > 0")
        _require(self.r2 > 0, "r2 > 0")
        _require(self.r is None or self.r > 0, "r > 0")
        _require(self.K == 1.0, "K = 1")

    def aggregate_rate(self) -> float:
        if self.r is None:
            raise DomainError("aggregate growth rate r is required for the global models")
        return self.r


@dataclass(frozen=True)
class DiffusionSpec:
    """Diffusion coefficient, either fixed or scaled with the reserve size.

    In ``size_dependent`` mode the effective coefficient is
    ``lambda0 * alpha * (1 - alpha)``, which vanishes at both ends of [0, 1].
    """

    mode: str = "constant"
    value: float = 0.0

    def __post_init__(self) -> None:
        _require(self.mode in ("constant", "size_dependent"), "diffusion mode is 'constant' or 'size_dependent'")
        _require(math.isfinite(self.value) and self.value >= 0, "diffusion coefficient >= 0")

    @classmethod
    def constant(cls, lam: float) -> DiffusionSpec:
        return cls("constant", float(lam))

    @classmethod
    def size_dependent(cls, lambda0: float) -> DiffusionSpec:
        return cls("size_dependent", float(lambda0))

    def effective(self, alpha: float) -> float:
        if self.mode == "size_dependent":
            _require(0 <= alpha <= 1, "alpha in [0,1]")
            return self.value * alpha * (1 - alpha)
        _require(0 < alpha < 1, "alpha in (0,1)")
        return self.value
