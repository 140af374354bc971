"""Independent numerical checks: adaptive IVP integration, residuals, finite differences.

The integrator is the Dormand-Prince 5(4) pair with local extrapolation
(the 5th-order solution is propagated).  Second-order equations
``z'' = f(chi, z, z')`` are integrated as the system ``(z, z')``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, StepSizeUnderflow

__all__ = [
    "Trajectory",
    "integrate_ivp",
    "ode_residual",
    "fd_derivative_check",
    "DEFAULT_RELTOL",
    "DEFAULT_ABSTOL",
]

DEFAULT_RELTOL = 1e-10
DEFAULT_ABSTOL = 1e-12
MIN_SAMPLES = 65

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass(frozen=True)
class Trajectory:
    """Samples ``(chi, z, z')`` of a numerical solution."""

    chi: np.ndarray
    z: np.ndarray
    zprime: np.ndarray
    reltol: float = DEFAULT_RELTOL
    abstol: float = DEFAULT_ABSTOL
    n_steps: int = 0
    n_rejected: int = 0

    def __post_init__(self):
        if not (len(self.chi) == len(self.z) == len(self.zprime)):
            raise ValueError("trajectory arrays must have equal length")

    def __len__(self):
        return len(self.chi)


def _dopri_step(f, x, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        yi = y.copy()
        for j, a in enumerate(_A[i]):
            if a:
                yi += h * a * ks[j]
        ks.append(f(x + _C[i] * h, yi))
    y5 = y.copy()
    err = np.zeros_like(y)
    for j in range(7):
        if _B5[j]:
            y5 += h * _B5[j] * ks[j]
        if _E[j]:
            err += h * _E[j] * ks[j]
    # FSAL: stage 7 is f at the new point
    return y5, err, ks[6]


def integrate_ivp(
    rhs2: Callable,
    chi0: float,
    z0: float,
    zp0: float,
    chi1: float,
    reltol: float = DEFAULT_RELTOL,
    abstol: float = DEFAULT_ABSTOL,
    samples=MIN_SAMPLES,
    fixed_steps: int | None = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate ``z'' = rhs2(chi, z, z')`` from ``chi0`` to ``chi1``.

    Parameters
    ----------
    samples : int or array_like
        Number of uniformly spaced output points (at least 65), or an explicit
        monotone array of output abscissae inside ``[chi0, chi1]``.  Steps are
        shortened to land exactly on every output point.
    fixed_steps : int, optional
        Disable step-size control and take this many equal steps; the
        trajectory then holds every step node.  Used for order checks.
    """
    chi0 = float(chi0)
    chi1 = float(chi1)
    if not (chi0 > 0 and chi1 > 0):
        raise DomainError("integration range must satisfy chi0, chi1 > 0")

    def f(x, y):
        val = rhs2(x, y[0], y[1])
        return np.array([y[1], float(val)])

    y = np.array([float(z0), float(zp0)])
    if chi1 == chi0:
        return Trajectory(np.array([chi0]), y[:1].copy(), y[1:].copy(), reltol, abstol)

    direction = 1.0 if chi1 > chi0 else -1.0
    if fixed_steps is not None:
        return _fixed(f, chi0, chi1, y, int(fixed_steps), reltol, abstol)

    if np.ndim(samples) == 0:
        count = max(int(samples), MIN_SAMPLES)
        out_x = np.linspace(chi0, chi1, count)
    else:
        out_x = np.asarray(samples, dtype=float)
        if out_x[0] != chi0:
            out_x = np.concatenate([[chi0], out_x])
        if np.any(direction * np.diff(out_x) <= 0):
            raise ValueError("output abscissae must be strictly monotone")
        if direction * (out_x[-1] - chi1) > 0:
            raise ValueError("output abscissae extend past chi1")

    xs = [chi0]
    ys = [y.copy()]
    x = chi0
    k1 = f(x, y)
    h = direction * min(abs(chi1 - chi0) / 100.0, _initial_step(f, x, y, k1, reltol, abstol))
    steps = rejected = 0
    target_index = 1
    while target_index < len(out_x):
        target = out_x[target_index]
        hit = False
        if direction * (x + h - target) >= 0:
            h = target - x
            hit = True
        if abs(h) < 16 * np.finfo(float).eps * max(1.0, abs(x)):
            raise StepSizeUnderflow(f"step size underflow at chi={x!r}")
        try:
            y_new, err, k_new = _dopri_step(f, x, y, h, k1)
            scale = abstol + reltol * np.maximum(np.abs(y), np.abs(y_new))
            norm = float(np.max(np.abs(err) / scale))
            if not math.isfinite(norm) or not np.all(np.isfinite(y_new)):
                norm = math.inf
        except DomainError:
            norm = math.inf
        if norm <= 1.0:
            x = target if hit else x + h
            y = y_new
            k1 = k_new
            steps += 1
            if hit:
                xs.append(x)
                ys.append(y.copy())
                target_index += 1
            factor = 5.0 if norm == 0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
        else:
            rejected += 1
            factor = 0.2 if not math.isfinite(norm) else max(0.2, 0.9 * norm ** -0.2)
        if steps + rejected > max_steps:
            raise StepSizeUnderflow("maximum number of steps exceeded")
        h = h * factor
    arr = np.array(ys)
    return Trajectory(np.array(xs), arr[:, 0], arr[:, 1], reltol, abstol, steps, rejected)


def _initial_step(f, x, y, k1, reltol, abstol):
    scale = abstol + reltol * np.abs(y)
    d0 = float(np.max(np.abs(y) / scale))
    d1 = float(np.max(np.abs(k1) / scale))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return h0


def _fixed(f, chi0, chi1, y, n, reltol, abstol):
    if n < 1:
        raise ValueError("fixed_steps must be positive")
    h = (chi1 - chi0) / n
    xs = chi0 + h * np.arange(n + 1)
    xs[-1] = chi1
    ys = [y.copy()]
    k1 = f(chi0, y)
    for i in range(n):
        y, _, k1 = _dopri_step(f, xs[i], y, xs[i + 1] - xs[i], k1)
        ys.append(y.copy())
    arr = np.array(ys)
    return Trajectory(xs, arr[:, 0], arr[:, 1], reltol, abstol, n, 0)


def _five_point_second(f, x, h):
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def ode_residual(sol, eq, grid) -> float:
    """``max |z''(chi) - rhs(chi, z)| / max(1, |rhs|)`` over ``grid``.

    Uses ``sol.d2z`` when available, else 5-point central differences with
    ``h = eps**(1/3) * max(1, |chi|)``.
    """
    from .efcore import rhs

    grid = np.asarray(grid, dtype=float)
    z = np.asarray(sol.z(grid), dtype=float)
    r = np.asarray(rhs(eq, grid, z), dtype=float)
    d2 = getattr(sol, "d2z", None)
    if d2 is not None:
        zpp = np.asarray(d2(grid), dtype=float)
    else:
        h = np.finfo(float).eps ** (1 / 3) * np.maximum(1.0, np.abs(grid))
        zpp = _five_point_second(lambda x: np.asarray(sol.z(x), dtype=float), grid, h)
    if grid.size == 0:
        return 0.0
    return float(np.max(np.abs(zpp - r) / np.maximum(1.0, np.abs(r))))


def fd_derivative_check(f, fprime, grid) -> float:
    """Max deviation ``|fd - f'| / max(1, |f'|)`` with 5-point central differences."""
    grid = np.asarray(grid, dtype=float)
    worst = 0.0
    for x in grid:
        h = np.finfo(float).eps ** 0.2 * max(1.0, abs(x))
        try:
            fd = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)
            claimed = fprime(x)
        except (ValueError, ArithmeticError) as exc:
            raise DomainError(f"derivative check failed at {x!r}: {exc}") from exc
        worst = max(worst, abs(fd - claimed) / max(1.0, abs(claimed)))
    return float(worst)
