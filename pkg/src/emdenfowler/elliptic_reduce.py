"""Reduction of cubic and quartic elliptic ODEs to Weierstrass form.

Cubic: ``(dtau/dTheta)**2 = Q3(tau)`` is solved by ``tau = scale*wp + shift``.
Quartic: ``(du/dt)**2 = Q4(u)`` uses the classical binary-quartic
invariants together with the Whittaker-Watson inversion formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCubic, DomainError, NegativeRadicand, NotARoot
from .weierstrass import GermPair, wp_pair

__all__ = [
    "CubicPoly",
    "QuarticPoly",
    "ScaleShift",
    "CubicSolution",
    "QuarticSolution",
    "cubic_germs",
    "cubic_scale_shift",
    "solve_cubic_elliptic",
    "quartic_invariants",
    "quartic_solution_general",
    "quartic_solution_simple_root",
    "real_roots",
]


@dataclass(frozen=True)
class CubicPoly:
    """``Q3(tau) = a3*tau**3 + a2*tau**2 + a1*tau + a0``."""

    a3: float
    a2: float
    a1: float
    a0: float

    def __call__(self, tau):
        return ((self.a3 * tau + self.a2) * tau + self.a1) * tau + self.a0

    def derivative(self, tau):
        return (3.0 * self.a3 * tau + 2.0 * self.a2) * tau + self.a1

    @property
    def coefficients(self) -> tuple:
        return (self.a3, self.a2, self.a1, self.a0)


@dataclass(frozen=True)
class QuarticPoly:
    """``Q4(u) = b4*u**4 + b3*u**3 + b2*u**2 + b1*u + b0``."""

    b4: float
    b3: float
    b2: float
    b1: float
    b0: float

    def __post_init__(self):
        if self.b4 == 0 and self.b3 == 0:
            raise DomainError("quartic must have degree >= 3 (b4 or b3 nonzero)")

    def __call__(self, u):
        return (((self.b4 * u + self.b3) * u + self.b2) * u + self.b1) * u + self.b0

    def derivatives(self, u) -> tuple:
        """``(Q4, Q4', Q4'', Q4''', Q4'''')`` at ``u``."""
        b4, b3, b2, b1, _ = self.coefficients
        return (
            self(u),
            ((4 * b4 * u + 3 * b3) * u + 2 * b2) * u + b1,
            (12 * b4 * u + 6 * b3) * u + 2 * b2,
            24 * b4 * u + 6 * b3,
            24 * b4,
        )

    def shifted(self, h: float) -> "QuarticPoly":
        """Coefficients of ``u -> Q4(u + h)``."""
        _, d1, d2, d3, d4 = self.derivatives(h)
        return QuarticPoly(d4 / 24.0, d3 / 6.0, d2 / 2.0, d1, self(h))

    @property
    def coefficients(self) -> tuple:
        return (self.b4, self.b3, self.b2, self.b1, self.b0)


@dataclass(frozen=True)
class ScaleShift:
    """``tau = scale*wp + shift``."""

    scale: float
    shift: float


def _check_cubic(q: CubicPoly) -> None:
    if q.a3 == 0:
        raise DegenerateCubic("leading coefficient a3 must be nonzero")


def cubic_germs(q: CubicPoly) -> GermPair:
    _check_cubic(q)
    a3, a2, a1, a0 = q.coefficients
    g2 = (a2 * a2 - 3.0 * a1 * a3) / 12.0
    g3 = (9.0 * a1 * a2 * a3 - 27.0 * a0 * a3 * a3 - 2.0 * a2 ** 3) / 432.0
    return GermPair(g2, g3)


def cubic_scale_shift(q: CubicPoly) -> ScaleShift:
    _check_cubic(q)
    return ScaleShift(4.0 / q.a3, -q.a2 / (3.0 * q.a3))


@dataclass(frozen=True)
class CubicSolution:
    """Evaluator ``Theta -> tau`` solving ``tau'**2 = Q3(tau)``."""

    poly: CubicPoly
    germs: GermPair
    transform: ScaleShift

    def __call__(self, theta):
        return self.evaluate(theta)[0]

    def evaluate(self, theta) -> tuple[float, float]:
        """``(tau, dtau/dTheta)`` at a scalar ``theta``."""
        p, dp = wp_pair(theta, self.germs)
        return self.transform.scale * p + self.transform.shift, self.transform.scale * dp

    def residual(self, theta) -> float:
        tau, dtau = self.evaluate(theta)
        return abs(dtau * dtau - self.poly(tau)) / max(1.0, abs(tau) ** 3)


def solve_cubic_elliptic(q: CubicPoly) -> CubicSolution:
    return CubicSolution(q, cubic_germs(q), cubic_scale_shift(q))


def quartic_invariants(q: QuarticPoly) -> GermPair:
    b4, b3, b2, b1, b0 = q.coefficients
    g2 = b0 * b4 - b1 * b3 / 4.0 + b2 * b2 / 12.0
    g3 = (
        b0 * b2 * b4 / 6.0
        + b1 * b2 * b3 / 48.0
        - b2 ** 3 / 216.0
        - b0 * b3 * b3 / 16.0
        - b1 * b1 * b4 / 16.0
    )
    return GermPair(g2, g3)


@dataclass(frozen=True)
class QuarticSolution:
    """Evaluator ``t -> u`` solving ``u'**2 = Q4(u)`` with ``u`` anchored at ``u0``.

    ``simple_root`` selects the reduced formula valid when ``Q4(u0) = 0``.
    """

    poly: QuarticPoly
    u0: float
    germs: GermPair
    simple_root: bool = False

    def __call__(self, t):
        return self.evaluate(t)[0]

    def evaluate(self, t) -> tuple[float, float]:
        """``(u, du/dt)`` at scalar ``t``; raises ``DomainError`` at poles of ``u``."""
        f0, f1, f2, f3, f4 = self.poly.derivatives(self.u0)
        p, dp = wp_pair(t, self.germs)
        w = p - f2 / 24.0
        if self.simple_root:
            den = 4.0 * w
            if den == 0.0:
                raise DomainError(f"u has a pole at t={t!r}")
            return self.u0 + f1 / den, -4.0 * f1 * dp / (den * den)
        root = math.sqrt(f0)
        num = root * dp + 0.5 * f1 * w + f0 * f3 / 24.0
        den = 2.0 * w * w - f0 * f4 / 48.0
        if den == 0.0:
            raise DomainError(f"u has a pole at t={t!r}")
        # d/dt of num and den, using wp'' = 6 wp**2 - g2/2
        ddp = 6.0 * p * p - 0.5 * self.germs.g2
        dnum = root * ddp + 0.5 * f1 * dp
        dden = 4.0 * w * dp
        return self.u0 + num / den, (dnum * den - num * dden) / (den * den)

    def second_derivative(self, t) -> float:
        """``d2u/dt2`` from direct differentiation of the simple-root formula,
        falling back to ``Q4'(u)/2`` for the general formula."""
        if self.simple_root:
            f1 = self.poly.derivatives(self.u0)[1]
            f2 = self.poly.derivatives(self.u0)[2]
            p, dp = wp_pair(t, self.germs)
            w = p - f2 / 24.0
            ddp = 6.0 * p * p - 0.5 * self.germs.g2
            return f1 / 4.0 * (2.0 * dp * dp / w ** 3 - ddp / (w * w))
        u, _ = self.evaluate(t)
        return 0.5 * self.poly.derivatives(u)[1]

    def residual(self, t) -> float:
        u, du = self.evaluate(t)
        return abs(du * du - self.poly(u)) / max(1.0, u ** 4)


def quartic_solution_general(q: QuarticPoly, u0: float) -> QuarticSolution:
    """Whittaker-Watson solution through an arbitrary base point ``u0``."""
    f0 = q(u0)
    if f0 < 0:
        raise NegativeRadicand(f"Q4({u0!r}) = {f0!r} < 0")
    return QuarticSolution(q, float(u0), quartic_invariants(q), simple_root=False)


def quartic_solution_simple_root(q: QuarticPoly, u0: float) -> QuarticSolution:
    if abs(q(u0)) >= 1e-12:
        raise NotARoot(f"Q4({u0!r}) = {q(u0)!r} is not zero")
    return QuarticSolution(q, float(u0), quartic_invariants(q), simple_root=True)


def real_roots(coefficients, tol: float = 1e-12) -> list[float]:
    """Real roots of a polynomial (highest degree first), polished by Newton."""
    coefficients = np.trim_zeros(np.asarray(coefficients, dtype=float), "f")
    if coefficients.size < 2:
        return []
    deriv = np.polyder(coefficients)
    out = []
    for r in np.roots(coefficients):
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)):
            continue
        x = r.real
        for _ in range(8):
            d = np.polyval(deriv, x)
            if d == 0:
                break
            step = np.polyval(coefficients, x) / d
            x -= step
            if abs(step) <= tol * max(1.0, abs(x)):
                break
        out.append(float(x))
    return sorted(out)
