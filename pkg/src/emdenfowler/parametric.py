"""Parametric solutions ``(chi(tau), z(tau))`` of both integrable classes.

Each family is driven by a quadrature ``Theta(tau)``.  Grids are integrated
panel by panel so that ``Theta`` is smooth across samples, which keeps the
finite-difference residual check meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .efcore import EfEquation, real_power, rhs
from .elliptic_reduce import CubicPoly, solve_cubic_elliptic
from .errors import (
    ChiNotMonotone,
    DomainError,
    GridTooShort,
    RadicandNonpositive,
    ThetaZeroCrossing,
    UnsupportedN,
)

__all__ = [
    "ThetaEvaluator",
    "ParametricCurve",
    "theta_class1",
    "theta_class2",
    "theta_class2_nminus1",
    "curve_class1",
    "curve_class2",
    "curve_class2_nminus1",
    "parametric_residual",
    "invert_class1_to_elliptic",
    "aligned_elliptic_tau",
    "RADICAND_FLOOR",
]

RADICAND_FLOOR = 1e-10
DEFAULT_TOL = 1e-12


class ThetaEvaluator:
    """``Theta(tau) = offset + int_{tau_a}^{tau} integrand``, restricted to ``[tau_a, tau_b]``."""

    def __init__(self, integrand, tau_a, tau_b, tol=DEFAULT_TOL, offset=0.0, radicand=None):
        self.integrand = integrand
        self.tau_a = float(tau_a)
        self.tau_b = float(tau_b)
        self.tol = float(tol)
        self.offset = float(offset)
        self.radicand = radicand

    def _check(self, tau):
        lo, hi = sorted((self.tau_a, self.tau_b))
        span = hi - lo
        if np.any((tau < lo - 1e-12 * max(1.0, span)) | (tau > hi + 1e-12 * max(1.0, span))):
            raise DomainError(f"tau outside [{lo}, {hi}]")

    def derivative(self, tau):
        return self.integrand(np.asarray(tau, dtype=float))

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        flat = np.atleast_1d(tau).ravel()
        self._check(flat)
        order = np.argsort(flat, kind="stable")
        points = flat[order]
        # cumulative panels outward from tau_a in both directions
        below = points < self.tau_a
        values = np.empty_like(points)
        if np.any(~below):
            up = np.concatenate([[self.tau_a], points[~below]])
            values[~below] = self.offset + self._cumulative(up)[1:]
        if np.any(below):
            down = np.concatenate([[self.tau_a], points[below][::-1]])
            values[below] = (self.offset + self._cumulative(down)[1:])[::-1]
        out = np.empty_like(values)
        out[order] = values
        return out.reshape(tau.shape)[()] if tau.ndim == 0 else out.reshape(tau.shape)

    def _cumulative(self, nodes):
        """Running integral over consecutive nodes (any direction)."""
        panels = max(len(nodes) - 1, 1)
        eps = self.tol / panels
        acc = np.zeros(len(nodes))
        total = 0.0
        for i in range(1, len(nodes)):
            a, b = nodes[i - 1], nodes[i]
            if a != b:
                val, _ = integrate.quad(
                    lambda x: float(self.integrand(x)), a, b, epsabs=eps, epsrel=0.0, limit=200
                )
                total += val
            acc[i] = total
        return acc


def _psi_class1(n, tau):
    if n == -1:
        tau = np.asarray(tau, dtype=float)
        if np.any(tau == 0):
            raise DomainError("psi = 2 ln|tau| is singular at tau = 0")
        return 2.0 * np.log(np.abs(tau))
    return 2.0 * real_power(tau, n + 1.0) / (n + 1.0)


def _guard_radicand(radicand, tau_a, tau_b, samples=4001):
    """Raise ``RadicandNonpositive`` unless ``radicand >= RADICAND_FLOOR`` on the range."""
    lo, hi = sorted((float(tau_a), float(tau_b)))
    grid = np.linspace(lo, hi, samples)
    try:
        vals = np.asarray(radicand(grid), dtype=float)
    except DomainError as exc:
        raise RadicandNonpositive(float("nan"), float("nan")) from exc
    i = int(np.argmin(vals))
    if vals[i] < RADICAND_FLOOR:
        raise RadicandNonpositive(float(grid[i]), float(vals[i]))
    if hi > lo:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, samples - 1)]
        if b > a:
            res = optimize.minimize_scalar(
                lambda x: float(radicand(x)), bounds=(a, b), method="bounded",
                options={"xatol": 1e-13 * max(1.0, abs(a))},
            )
            if res.fun < RADICAND_FLOOR:
                raise RadicandNonpositive(float(res.x), float(res.fun))


def theta_class1(n: float, K3: float, tau_a: float, tau_b: float, tol: float = DEFAULT_TOL):
    """``Theta(tau) = int_{tau_a}^{tau} dtau / sqrt(K3 + psi(tau) + tau**2/4)``.

    ``psi = 2 tau**(n+1)/(n+1)``, or ``2 ln|tau|`` when ``n = -1``.
    """

    def radicand(tau):
        tau = np.asarray(tau, dtype=float)
        return K3 + _psi_class1(n, tau) + 0.25 * tau * tau

    _guard_radicand(radicand, tau_a, tau_b)
    return ThetaEvaluator(lambda t: 1.0 / np.sqrt(radicand(t)), tau_a, tau_b, tol, 0.0, radicand)


def theta_class2(n: float, sign: int, C2: float, tau_a: float, tau_b: float, tol: float = DEFAULT_TOL):
    """``Theta(tau) = C2 + int_{tau_a}^{tau} dtau / sqrt(1 + sign * tau**(n+1))``."""
    sign = _sign(sign)

    def radicand(tau):
        return 1.0 + sign * real_power(np.asarray(tau, dtype=float), n + 1.0)

    _guard_radicand(radicand, tau_a, tau_b)
    return ThetaEvaluator(lambda t: 1.0 / np.sqrt(radicand(t)), tau_a, tau_b, tol, C2, radicand)


def theta_class2_nminus1(exponent_sign: int, C2: float, tau_a: float, tau_b: float, tol: float = DEFAULT_TOL):
    """``Theta(tau) = C2 + int_{tau_a}^{tau} exp(exponent_sign * tau**2) dtau``."""
    s = _sign(exponent_sign)
    return ThetaEvaluator(lambda t: np.exp(s * np.asarray(t, dtype=float) ** 2), tau_a, tau_b, tol, C2)


def _sign(sign) -> int:
    if sign in (1, "+", "+1", 1.0):
        return 1
    if sign in (-1, "-", "-1", -1.0):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


@dataclass(frozen=True)
class ParametricCurve:
    tau: np.ndarray
    theta: np.ndarray
    chi: np.ndarray
    z: np.ndarray
    equation: EfEquation
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = {len(self.tau), len(self.theta), len(self.chi), len(self.z)}
        if len(sizes) != 1:
            raise ValueError("curve arrays must have equal length")
        if len(self.tau) < 3:
            raise GridTooShort("a parametric curve needs at least 3 samples")
        if np.any(self.chi <= 0):
            raise DomainError("chi must stay positive along the curve")

    def __len__(self):
        return len(self.tau)


def _grid(tau_grid) -> np.ndarray:
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size < 3:
        raise GridTooShort("tau grid needs at least 3 points")
    if np.any(np.diff(tau) <= 0):
        raise DomainError("tau grid must be strictly increasing")
    return tau


def curve_class1(n, K3, a, b, B1, tau_grid, tol=DEFAULT_TOL) -> ParametricCurve:
    """Class-one family: ``chi = a B1**2 exp(Theta)``, ``z = b B1 tau exp(Theta/2)``.

    The curve solves ``z'' = A chi**(-(n+3)/2) z**n`` with ``A = (a/b**2)**((n-1)/2)``.
    """
    if a <= 0:
        raise DomainError("a must be positive so that chi > 0")
    if b == 0 or B1 == 0:
        raise DomainError("b and B1 must be nonzero")
    tau = _grid(tau_grid)
    theta = theta_class1(n, K3, tau[0], tau[-1], tol)(tau)
    A = (a / (b * b)) ** ((n - 1.0) / 2.0)
    chi = a * B1 * B1 * np.exp(theta)
    z = b * B1 * tau * np.exp(0.5 * theta)
    eq = EfEquation.class_one(n, A)
    return ParametricCurve(tau, theta, chi, z, eq, {"n": n, "K3": K3, "a": a, "b": b, "B1": B1, "A": A})


def _check_theta(theta):
    if np.any(theta == 0) or np.any(np.sign(theta) != np.sign(theta[0])):
        raise ThetaZeroCrossing("Theta(tau) vanishes or changes sign on the grid")


def curve_class2(n, sign, a, b, C1c, C2, tau_grid, tol=DEFAULT_TOL) -> ParametricCurve:
    """Class-two family: ``chi = a C1**(n-1)/Theta``, ``z = b C1**(n+1) tau/Theta``.

    Solves ``z'' = A chi**(-(n+3)) z**n`` with ``A = sign (n+1)/2 a**(n+1) b**(1-n)``.
    """
    sign = _sign(sign)
    if n == -1:
        raise DomainError("use curve_class2_nminus1 for n = -1")
    tau = _grid(tau_grid)
    theta = theta_class2(n, sign, C2, tau[0], tau[-1], tol)(tau)
    _check_theta(theta)
    A = sign * (n + 1.0) / 2.0 * real_power(a, n + 1.0) * real_power(b, 1.0 - n)
    chi = a * real_power(C1c, n - 1.0) / theta
    z = b * real_power(C1c, n + 1.0) * tau / theta
    eq = EfEquation.class_two(n, float(A))
    return ParametricCurve(
        tau, theta, chi, z, eq,
        {"n": n, "sign": sign, "a": a, "b": b, "C1": C1c, "C2": C2, "A": float(A)},
    )


def curve_class2_nminus1(exponent_sign, b, C1c, C2, tau_grid, tol=DEFAULT_TOL) -> ParametricCurve:
    """``n = -1`` class-two family: ``chi = C1/Theta``, ``z = b exp(s tau**2)/Theta``.

    ``s = exponent_sign``; the curve solves ``z'' = A chi**(-2) / z`` with ``A = 2 s b**2``.
    """
    s = _sign(exponent_sign)
    tau = _grid(tau_grid)
    theta = theta_class2_nminus1(s, C2, tau[0], tau[-1], tol)(tau)
    _check_theta(theta)
    A = 2.0 * s * b * b
    chi = C1c / theta
    z = b * np.exp(s * tau * tau) / theta
    eq = EfEquation.class_two(-1.0, A)
    return ParametricCurve(
        tau, theta, chi, z, eq, {"n": -1.0, "exponent_sign": s, "b": b, "C1": C1c, "C2": C2, "A": A}
    )


def _fd4(y, h):
    """4th-order central first and second differences at indices 2..N-3."""
    d1 = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d2 = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    return d1, d2


def parametric_residual(curve, eq: EfEquation | None = None) -> float:
    """Max ``|d2z/dchi2 - rhs| / max(1, |rhs|)`` over interior samples.

    Parameter derivatives use 4th-order central differences on the (uniform)
    tau grid; ``d2z/dchi2 = (z'' chi' - z' chi'') / chi'**3``.
    """
    eq = eq if eq is not None else curve.equation
    tau = np.asarray(curve.tau, dtype=float)
    if tau.size < 5:
        raise GridTooShort("residual stencil needs at least 5 samples")
    steps = np.diff(tau)
    h = steps.mean()
    if np.any(np.abs(steps - h) > 1e-9 * max(abs(h), 1e-300)):
        raise DomainError("parametric_residual requires a uniform tau grid")
    chi = np.asarray(curve.chi, dtype=float)
    z = np.asarray(curve.z, dtype=float)
    dchi, d2chi = _fd4(chi, h)
    dz, d2z = _fd4(z, h)
    if np.any(dchi == 0) or np.any(np.sign(dchi) != np.sign(dchi[0])):
        raise ChiNotMonotone("chi(tau) is not strictly monotone; reparametrize")
    zchichi = (d2z * dchi - dz * d2chi) / dchi ** 3
    r = np.asarray(rhs(eq, chi[2:-2], z[2:-2]), dtype=float)
    return float(np.max(np.abs(zchichi - r) / np.maximum(1.0, np.abs(r))))


def invert_class1_to_elliptic(n: float, K3: float) -> CubicPoly:
    """Cubic ``Q3`` with ``(dtau/dTheta)**2 = Q3(tau)`` for the ``n = 2`` class-one family."""
    if n != 2:
        raise UnsupportedN(f"tau-inversion to a cubic exists only for n = 2, got n = {n}")
    return CubicPoly(2.0 / 3.0, 0.25, 0.0, float(K3))


def aligned_elliptic_tau(K3: float, tau0: float, theta0: float = 0.0):
    """Weierstrass evaluator for ``tau(Theta)`` matched to ``tau(theta0) = tau0``.

    On the increasing branch ``Theta - theta0 = int_{tau0}^{tau} dtau/sqrt(Q3)``,
    so ``tau(Theta) = 6 wp(S - (Theta - theta0)) - 1/8`` with
    ``S = int_{tau0}^{inf} dtau/sqrt(Q3)`` (the pole sits at ``Theta = theta0 + S``).
    """
    q = invert_class1_to_elliptic(2, K3)
    if q(tau0) < RADICAND_FLOOR:
        raise RadicandNonpositive(tau0, q(tau0))
    S, _ = integrate.quad(lambda x: 1.0 / math.sqrt(q(x)), tau0, math.inf, epsabs=1e-13, epsrel=1e-13, limit=400)
    sol = solve_cubic_elliptic(q)

    def tau_of_theta(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.array([sol(S - (th - theta0)) for th in np.atleast_1d(theta).ravel()])
        return out.reshape(theta.shape)[()] if theta.ndim == 0 else out.reshape(theta.shape)

    tau_of_theta.pole = theta0 + S
    tau_of_theta.solution = sol
    return tau_of_theta
