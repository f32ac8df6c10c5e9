"""Fixed-step RK4 integration of the model variants under piecewise-constant effort."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import rent, rhs, vector_field
from .params import BioParams, DiffusionSpec, DomainError, EconParams, ModelVariant, SolverError, State

CLAMP_TOL = 1e-9
BLOWUP = 10.0
DEFAULT_STEP = 0.01


@dataclass(frozen=True)
class ControlSchedule:
    """Effort switching times; segment ``(t_start, E)`` holds until the next one."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        segs = tuple((float(t), float(e)) for t, e in self.segments)
        if not segs:
            raise DomainError("control schedule needs at least one segment")
        if segs[0][0] != 0.0:
            raise DomainError("first control segment must start at t=0")
        starts = [t for t, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise DomainError("control segments must be strictly time-sorted")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, E: float) -> ControlSchedule:
        return cls(((0.0, E),))

    def validate(self, e_max: float) -> None:
        for t, e in self.segments:
            if not 0.0 <= e <= e_max:
                raise DomainError(f"effort {e} at t={t} outside [0, E_max={e_max}]")

    def on_grid(self, times: np.ndarray) -> np.ndarray:
        """Effort at each grid time, with switching times snapped to the grid."""
        h = times[1] - times[0]
        out = np.empty(times.size)
        for i, (t, e) in enumerate(self.segments):
            k = int(round(t / h))
            out[k:] = e
        return out


@dataclass(frozen=True)
class Trajectory:
    variant: ModelVariant
    times: np.ndarray
    states: np.ndarray
    efforts: np.ndarray
    rents: np.ndarray
    clamped: np.ndarray

    @property
    def x1(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def x2(self) -> np.ndarray:
        return self.states[:, 1]

    def __len__(self) -> int:
        return self.times.size


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def integrate(
    variant: ModelVariant,
    initial: State,
    schedule: ControlSchedule,
    bio: BioParams,
    econ: EconParams,
    spec: DiffusionSpec,
    horizon: float,
    step: float = DEFAULT_STEP,
) -> Trajectory:
    """Classical RK4 on a uniform grid covering ``[0, horizon]``.

    The step is adjusted down so the grid ends exactly at ``horizon``.
    Undershoots below zero of at most 1e-9 are clamped and flagged; anything
    larger, or a stock above 10, raises ``SolverError``.
    """
    if step <= 0 or horizon < step:
        raise DomainError(f"need step > 0 and horizon >= step (step={step}, horizon={horizon})")
    schedule.validate(econ.e_max)
    initial = State(*map(float, initial))
    rhs(variant, initial, schedule.segments[0][1], spec, bio, econ)  # domain check

    n = max(1, int(round(horizon / step)))
    times = np.linspace(0.0, horizon, n + 1)
    h = horizon / n
    efforts = schedule.on_grid(times)
    lam = spec.effective(bio.alpha)
    q = econ.q

    states = np.empty((n + 1, 2))
    clamped = np.zeros(n + 1, dtype=bool)
    states[0] = initial
    x1, x2 = initial
    for k in range(n):
        E = efforts[k]

        def f(a: float, b: float) -> tuple[float, float]:
            return vector_field(variant, (a, b), E, lam, bio, q)

        k1 = f(x1, x2)
        k2 = f(x1 + 0.5 * h * k1[0], x2 + 0.5 * h * k1[1])
        k3 = f(x1 + 0.5 * h * k2[0], x2 + 0.5 * h * k2[1])
        k4 = f(x1 + h * k3[0], x2 + h * k3[1])
        x1 = x1 + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        x2 = x2 + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])

        if x1 < 0 or x2 < 0:
            if min(x1, x2) < -CLAMP_TOL:
                raise SolverError(f"stock undershoot {min(x1, x2):.3e} at t={times[k + 1]:.6g}; step too large")
            x1, x2 = max(x1, 0.0), max(x2, 0.0)
            clamped[k + 1] = True
        if not (abs(x1) <= BLOWUP and abs(x2) <= BLOWUP):
            raise SolverError(f"trajectory diverged at t={times[k + 1]:.6g}: state=({x1}, {x2})")
        states[k + 1] = x1, x2

    rents = np.array([rent(variant, State(a, b), e, bio.alpha, econ) for (a, b), e in zip(states, efforts)])
    return Trajectory(variant, _frozen(times), _frozen(states), _frozen(efforts), _frozen(rents), _frozen(clamped))


@dataclass(frozen=True)
class RevenueEstimate:
    value: float
    tail_bound: float


def discounted_revenue(traj: Trajectory, econ: EconParams, alpha: float) -> RevenueEstimate:
    """Discounted rent over the trajectory horizon.

    Rent is interpolated linearly between samples and the discount factor is
    integrated exactly on each interval (a product trapezoid rule), so a
    constant rent is integrated without quadrature error. Each interval uses
    its own effort at both ends. The tail bound is
    ``|rent(T)| exp(-delta T) / delta``.
    """
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    v, xs, es = traj.variant, traj.states, traj.efforts
    t = traj.times
    d = econ.delta
    T = float(t[-1])
    tail = abs(float(rent(v, State(*xs[-1]), es[-1], alpha, econ))) * math.exp(-d * T) / d
    if len(traj) == 1:
        return RevenueEstimate(0.0, tail)
    # the effort of interval k holds at both of its ends, so switches add no jump error
    g_left = np.array([rent(v, State(*xs[k]), es[k], alpha, econ) for k in range(len(traj) - 1)])
    g_right = np.array([rent(v, State(*xs[k + 1]), es[k], alpha, econ) for k in range(len(traj) - 1)])

    h = np.diff(t)
    x = d * h
    i0 = -np.expm1(-x) / d  # int_0^h e^{-ds} ds
    i1 = (-np.expm1(-x) - x * np.exp(-x)) / d**2  # int_0^h s e^{-ds} ds
    w1 = i1 / h
    w0 = i0 - w1
    start = np.exp(-d * t[:-1])
    value = float(np.sum(start * (w0 * g_left + w1 * g_right)))
    return RevenueEstimate(value, tail)


def stationarity_drift(
    variant: ModelVariant,
    point: State,
    E: float,
    spec: DiffusionSpec,
    bio: BioParams,
    econ: EconParams,
    horizon: float,
    step: float = DEFAULT_STEP,
) -> float:
    """Largest deviation from ``point`` along a constant-effort run."""
    traj = integrate(variant, point, ControlSchedule.constant(E), bio, econ, spec, horizon, step)
    return float(np.max(np.abs(traj.states - np.asarray(point, dtype=float))))
