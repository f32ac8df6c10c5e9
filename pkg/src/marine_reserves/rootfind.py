"""Small certified root finders used by the equilibrium and control solvers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .params import SolverError

logger = logging.getLogger(__name__)


def expand_upper(f: Callable[[float], float], lo: float, hi: float, max_doublings: int = 60) -> float:
    """Double ``hi`` until ``f(hi)`` has the opposite sign of ``f(lo)``."""
    sign_lo = np.sign(f(lo))
    for _ in range(max_doublings + 1):
        if np.sign(f(hi)) != sign_lo:
            return hi
        hi *= 2.0
    raise SolverError(f"no sign change found on [{lo}, {hi}] after {max_doublings} doublings")


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-13, maxiter: int = 400) -> tuple[float, float, float]:
    """Plain bisection on a certified sign change.

    Returns the midpoint of the final bracket together with the bracket ends.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, lo, lo
    if fhi == 0.0:
        return hi, hi, hi
    if np.sign(flo) == np.sign(fhi):
        raise SolverError(f"f({lo})={flo} and f({hi})={fhi} do not bracket a root")
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid, mid, mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi), lo, hi


def newton_polish(
    f: Callable[[float], float],
    df: Callable[[float], float],
    x: float,
    lo: float,
    hi: float,
    steps: int = 3,
) -> float:
    """A few Newton steps from a bisection midpoint; never leaves [lo, hi]."""
    best, fbest = x, abs(f(x))
    for _ in range(steps):
        d = df(x)
        if d == 0.0 or not np.isfinite(d):
            break
        x_new = x - f(x) / d
        if not lo <= x_new <= hi:
            break
        x = x_new
        if abs(f(x)) <= fbest:
            best, fbest = x, abs(f(x))
    return best


def bracketed_root(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-13,
    polish_steps: int = 3,
) -> float:
    mid, blo, bhi = bisect(f, lo, hi, xtol=xtol)
    if blo == bhi:
        return mid
    # Polish inside a slightly widened bracket so the exact root is reachable.
    pad = max(bhi - blo, 1e-15)
    return newton_polish(f, df, mid, blo - pad, bhi + pad, steps=polish_steps)


def numeric_jacobian(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian with step ``rel_step * max(1, |x_j|)``."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x), dtype=float)
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        h = rel_step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2 * h)
    return jac


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool


def damped_newton(
    fun: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float = 1e-12,
    maxiter: int = 100,
    max_halvings: int = 30,
) -> NewtonResult:
    """Newton's method with step halving on the max-norm of the residual.

    A step is halved up to ``max_halvings`` times until the residual norm
    decreases; if no decrease is found the iteration stops unconverged.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(fun(x), dtype=float)
    norm = float(np.max(np.abs(fx)))
    for it in range(maxiter):
        if not np.isfinite(norm):
            return NewtonResult(x, norm, it, False)
        if norm <= tol:
            return NewtonResult(x, norm, it, True)
        jac = numeric_jacobian(fun, x)
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -fx, rcond=None)[0]
        t = 1.0
        for _ in range(max_halvings + 1):
            x_try = x + t * step
            f_try = np.asarray(fun(x_try), dtype=float)
            n_try = float(np.max(np.abs(f_try)))
            if np.isfinite(n_try) and n_try < norm:
                break
            t *= 0.5
        else:
            logger.debug("damped_newton: no decrease after %d halvings at norm %.3e", max_halvings, norm)
            return NewtonResult(x, norm, it, norm <= tol)
        x, fx, norm = x_try, f_try, n_try
    return NewtonResult(x, norm, maxiter, norm <= tol)
