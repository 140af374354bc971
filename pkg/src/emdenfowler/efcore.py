"""Emden-Fowler equations ``z'' = A chi**(-lam-2) z**n`` and their closed forms.

Two loci are integrable: ``lam = (n-1)/2`` (class one) and ``lam = n+1``
(class two).  Both admit power-law particular solutions ``z_p``; writing
``z = z_p * nu`` with ``t = ln chi`` yields an autonomous oscillator

    nu'' + a nu' + b (nu - nu**n) = 0

whose known solutions give the Fowler family (class one) and the kink
family (class two).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    NEqualsOne,
    NegativeBase,
    NoRealRoot,
    PoleCrossing,
)

__all__ = [
    "EfEquation",
    "ClassTag",
    "ClosedFormSolution",
    "NuReduction",
    "classify",
    "rhs",
    "real_power",
    "real_nth_roots",
    "invariant_transform_power",
    "to_self_adjoint",
    "from_self_adjoint",
    "to_invariant_form",
    "from_invariant_form",
    "particular_class1",
    "particular_class2",
    "reduce_to_nu",
    "fowler_nu",
    "fowler_nu_derivatives",
    "fowler_z",
    "fowler_solution",
    "kink_nu",
    "kink_nu_derivatives",
    "kink_z",
    "kink_solution",
    "factorization_residual",
]

_TAG_TOL = 1e-12


class ClassTag(enum.Enum):
    ClassOne = "ClassOne"
    ClassTwo = "ClassTwo"
    LambdaZero = "LambdaZero"
    LambdaNMinusOne = "LambdaNMinusOne"
    Generic = "Generic"


@dataclass(frozen=True)
class EfEquation:
    """``z'' = A * chi**(-lam - 2) * z**n`` on ``chi > 0``."""

    n: float
    lam: float
    A: float

    def __post_init__(self):
        if self.A == 0:
            raise DomainError("coefficient A must be nonzero")

    @classmethod
    def class_one(cls, n: float, A: float) -> "EfEquation":
        return cls(n, (n - 1.0) / 2.0, A)

    @classmethod
    def class_two(cls, n: float, A: float) -> "EfEquation":
        return cls(n, n + 1.0, A)

    @property
    def chi_exponent(self) -> float:
        return -self.lam - 2.0

    @property
    def tags(self) -> list:
        return classify(self)

    def __call__(self, chi, z):
        return rhs(self, chi, z)


def classify(eq: EfEquation) -> list:
    """All matching integrability tags (``[Generic]`` if none match)."""
    n, lam = eq.n, eq.lam
    tags = []
    if abs(lam - (n - 1.0) / 2.0) <= _TAG_TOL:
        tags.append(ClassTag.ClassOne)
    if abs(lam - (n + 1.0)) <= _TAG_TOL:
        tags.append(ClassTag.ClassTwo)
    if abs(lam) <= _TAG_TOL:
        tags.append(ClassTag.LambdaZero)
    if abs(lam - (n - 1.0)) <= _TAG_TOL:
        tags.append(ClassTag.LambdaNMinusOne)
    return tags or [ClassTag.Generic]


def _is_integer(x: float) -> bool:
    return float(x).is_integer()


def real_power(z, n):
    """``z**n`` restricted to real values.

    Integer exponents accept any sign of ``z``; otherwise ``z`` must be
    nonnegative.
    """
    z = np.asarray(z, dtype=float)
    if _is_integer(n):
        out = z ** int(n) if n >= 0 else np.power(z, float(n))
    else:
        if np.any(z < 0):
            raise DomainError(f"z**{n} is not real for negative z")
        out = np.power(z, float(n))
    return out[()] if out.ndim == 0 else out


def rhs(eq: EfEquation, chi, z):
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0):
        raise DomainError("chi must be positive")
    with np.errstate(divide="raise", invalid="raise"):
        try:
            out = eq.A * np.power(chi, eq.chi_exponent) * real_power(z, eq.n)
        except FloatingPointError as exc:
            raise DomainError(str(exc)) from None
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def real_nth_roots(x: float, p: float) -> tuple:
    """Real solutions ``r`` of ``r**p = x``, largest first.

    Odd integer ``p`` gives one root of either sign; even integer ``p`` gives
    ``+-`` roots for ``x > 0``; non-integer ``p`` gives the positive root for
    ``x > 0``.
    """
    x = float(x)
    if p == 0:
        raise NEqualsOne("exponent n - 1 vanishes")
    if x == 0:
        return (0.0,)
    mag = abs(x) ** (1.0 / p)
    if _is_integer(p):
        if int(p) % 2:
            return (math.copysign(mag, x),)
        if x > 0:
            return (mag, -mag)
        raise NoRealRoot(f"r**{p:g} = {x!r} has no real solution")
    if x > 0:
        return (mag,)
    raise NoRealRoot(f"r**{p:g} = {x!r} has no real solution")


def _odd_reciprocal_root(x, n):
    """Real ``x**(1/(n-1))`` elementwise; negative ``x`` allowed only for odd ``n-1``."""
    p = n - 1.0
    x = np.asarray(x, dtype=float)
    odd = _is_integer(p) and int(p) % 2 == 1
    if np.any(x < 0) and not odd:
        raise NegativeBase(f"negative base raised to 1/{p:g}")
    out = np.sign(x) * np.abs(x) ** (1.0 / p)
    return out[()] if out.ndim == 0 else out


def invariant_transform_power(eq: EfEquation) -> float:
    """Exponent of ``s`` after ``z = w/s, s = 1/chi``: ``w_ss = A s**(lam-1-n) w**n``."""
    return eq.lam - 1.0 - eq.n


def to_self_adjoint(chi, z, zprime):
    """``(chi, z, z') -> (xi, eta, eta_xi)`` with ``xi = 1/chi``."""
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0):
        raise DomainError("chi must be positive")
    return 1.0 / chi, z, -chi * chi * np.asarray(zprime, dtype=float)


def from_self_adjoint(xi, eta, eta_xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise DomainError("xi must be positive")
    return 1.0 / xi, eta, -xi * xi * np.asarray(eta_xi, dtype=float)


def to_invariant_form(chi, z, zprime):
    """``(chi, z, z') -> (s, w, w_s)`` with ``s = 1/chi`` and ``w = z/chi``."""
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0):
        raise DomainError("chi must be positive")
    z = np.asarray(z, dtype=float)
    return 1.0 / chi, z / chi, z - chi * np.asarray(zprime, dtype=float)


def from_invariant_form(s, w, w_s):
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("s must be positive")
    w = np.asarray(w, dtype=float)
    chi = 1.0 / s
    z = w * chi
    return chi, z, (z - np.asarray(w_s, dtype=float)) / chi


@dataclass(frozen=True)
class ClosedFormSolution:
    """A solution ``chi -> z`` with analytic first and second derivatives."""

    z: Callable
    dz: Callable
    d2z: Callable
    params: dict = field(default_factory=dict)

    def __call__(self, chi):
        return self.z(chi)


def _require_class(eq: EfEquation, tag: ClassTag) -> None:
    if tag not in classify(eq):
        raise DomainError(f"equation {eq} is not {tag.value}")


def _power_solution(coef: float, p: float, params: dict) -> ClosedFormSolution:
    def z(chi):
        return coef * np.power(np.asarray(chi, dtype=float), p)

    def dz(chi):
        return coef * p * np.power(np.asarray(chi, dtype=float), p - 1.0)

    def d2z(chi):
        return coef * p * (p - 1.0) * np.power(np.asarray(chi, dtype=float), p - 2.0)

    return ClosedFormSolution(z, dz, d2z, params)


def particular_class1(eq: EfEquation, root: int = 0):
    """``(alpha, z_p)`` with ``z_p = alpha*sqrt(chi)`` and ``alpha**(n-1) = -1/(4A)``.

    ``root`` indexes the real roots (largest first) when several exist.
    """
    _require_class(eq, ClassTag.ClassOne)
    if eq.n == 1:
        raise NEqualsOne("class-one particular solution needs n != 1")
    alpha = real_nth_roots(-1.0 / (4.0 * eq.A), eq.n - 1.0)[root]
    return alpha, _power_solution(alpha, 0.5, {"n": eq.n, "A": eq.A, "alpha": alpha})


def particular_class2(eq: EfEquation, root: int = 0):
    """``(beta, z_p)`` with ``z_p = beta*chi**((n+1)/(n-1))``,
    ``beta**(n-1) = 2(n+1)/(A (n-1)**2)``."""
    _require_class(eq, ClassTag.ClassTwo)
    n = eq.n
    if n == 1:
        raise NEqualsOne("class-two particular solution needs n != 1")
    beta = real_nth_roots(2.0 * (n + 1.0) / (eq.A * (n - 1.0) ** 2), n - 1.0)[root]
    p = (n + 1.0) / (n - 1.0)
    return beta, _power_solution(beta, p, {"n": n, "A": eq.A, "beta": beta})


@dataclass(frozen=True)
class NuReduction:
    """``nu'' + a nu' + b (nu - nu**n) = 0`` in ``t = ln chi``."""

    a: float
    b: float
    n: float

    def residual(self, nu, nu_dot, nu_ddot):
        return nu_ddot + self.a * nu_dot + self.b * (nu - real_power(nu, self.n))


def reduce_to_nu(eq: EfEquation) -> NuReduction:
    """Coefficients of the autonomous equation for ``nu = z/z_p``.

    Only the exponent ``p`` of ``z_p ~ chi**p`` matters:
    ``a = 2p - 1`` and ``b = p(p - 1)``.  No real ``alpha``/``beta`` is needed.
    """
    tags = classify(eq)
    if eq.n == 1:
        raise NEqualsOne("reduction requires n != 1")
    if ClassTag.ClassOne in tags:
        p = 0.5
    elif ClassTag.ClassTwo in tags:
        p = (eq.n + 1.0) / (eq.n - 1.0)
    else:
        raise DomainError(f"equation {eq} is neither ClassOne nor ClassTwo")
    return NuReduction(2.0 * p - 1.0, p * (p - 1.0), eq.n)


def _check_n(n: float) -> None:
    if n == 1:
        raise NEqualsOne("formula requires n != 1")


def fowler_nu(n: float, K1: float, t):
    """Fowler's solution of ``nu'' = (nu - nu**n)/4``."""
    return fowler_nu_derivatives(n, K1, t)[0]


def fowler_nu_derivatives(n: float, K1: float, t):
    """``(nu, nu', nu'')`` of the Fowler solution in ``t``."""
    _check_n(n)
    m = (n - 1.0) / 2.0
    q = 1.0 / (n - 1.0)
    t = np.asarray(t, dtype=float)
    E = np.exp(-m * t)
    s = 1.0 + K1 * E
    if np.any(s == 0):
        raise PoleCrossing("1 + K1 exp(-(n-1)t/2) vanishes")
    nu = _odd_reciprocal_root(2.0 * K1 * (n + 1.0) * E / (s * s), n)
    L = -m * (1.0 - K1 * E) / s
    dL = -2.0 * m * m * K1 * E / (s * s)
    d1 = nu * q * L
    d2 = d1 * q * L + nu * q * dL
    return nu, d1, d2


def fowler_z(n: float, A: float, K1: float, chi):
    return fowler_solution(n, A, K1).z(chi)


def fowler_solution(n: float, A: float, K1: float) -> ClosedFormSolution:
    """Closed-form general solution of the class-one equation.

    ``z = R |s|**(-2/(n-1))`` with ``s = 1 + K1 chi**(-(n-1)/2)`` and ``R``
    the real ``(n-1)``-th root of ``-K1 (n+1)/(2A)``.
    """
    _check_n(n)
    if A == 0:
        raise DomainError("A must be nonzero")
    m = (n - 1.0) / 2.0
    q = 1.0 / (n - 1.0)
    R = float(_odd_reciprocal_root(-K1 * (n + 1.0) / (2.0 * A), n))

    def parts(chi):
        chi = np.asarray(chi, dtype=float)
        if np.any(chi <= 0):
            raise DomainError("chi must be positive")
        s = 1.0 + K1 * chi ** (-m)
        if np.any(s == 0):
            raise PoleCrossing("1 + K1 chi**(-(n-1)/2) vanishes")
        ds = -m * K1 * chi ** (-m - 1.0)
        d2s = m * (m + 1.0) * K1 * chi ** (-m - 2.0)
        z = R * np.abs(s) ** (-2.0 * q)
        h = -2.0 * q * ds / s
        dh = -2.0 * q * (d2s / s - (ds / s) ** 2)
        return z, h, dh

    def z(chi):
        return parts(chi)[0]

    def dz(chi):
        zz, h, _ = parts(chi)
        return zz * h

    def d2z(chi):
        zz, h, dh = parts(chi)
        return zz * (h * h + dh)

    return ClosedFormSolution(z, dz, d2z, {"n": n, "A": A, "K1": K1})


def kink_nu(n: float, K2: float, t):
    return kink_nu_derivatives(n, K2, t)[0]


def kink_nu_derivatives(n: float, K2: float, t):
    """``(nu, nu', nu'')`` of the kink ``(1 + K2 e**t)**(-2/(n-1))``."""
    _check_n(n)
    r = 2.0 / (n - 1.0)
    t = np.asarray(t, dtype=float)
    e = K2 * np.exp(t)
    s = 1.0 + e
    if np.any(s <= 0):
        raise PoleCrossing("1 + K2 exp(t) must stay positive")
    nu = s ** (-r)
    g = -r * e / s
    dg = -r * e / (s * s)
    d1 = nu * g
    d2 = nu * (g * g + dg)
    return nu, d1, d2


def kink_z(n: float, A: float, K2: float, chi):
    return kink_solution(n, A, K2).z(chi)


def kink_solution(n: float, A: float, K2: float, root: int = 0) -> ClosedFormSolution:
    """Closed-form kink solution of the class-two equation.

    ``z = beta chi**((n+1)/(n-1)) (1 + K2 chi)**(-2/(n-1))``.
    """
    _check_n(n)
    if A == 0:
        raise DomainError("A must be nonzero")
    beta = real_nth_roots(2.0 * (n + 1.0) / (A * (n - 1.0) ** 2), n - 1.0)[root]
    p = (n + 1.0) / (n - 1.0)
    r = 2.0 / (n - 1.0)

    def parts(chi):
        chi = np.asarray(chi, dtype=float)
        if np.any(chi <= 0):
            raise DomainError("chi must be positive")
        s = 1.0 + K2 * chi
        if np.any(s <= 0):
            raise PoleCrossing("1 + K2 chi must stay positive")
        z = beta * chi ** p * s ** (-r)
        g = p / chi - r * K2 / s
        dg = -p / chi ** 2 + r * K2 * K2 / (s * s)
        return z, g, dg

    def z(chi):
        return parts(chi)[0]

    def dz(chi):
        zz, g, _ = parts(chi)
        return zz * g

    def d2z(chi):
        zz, g, dg = parts(chi)
        return zz * (g * g + dg)

    return ClosedFormSolution(z, dz, d2z, {"n": n, "A": A, "K2": K2, "beta": beta})


def _central_derivatives(f, t, h):
    f_m2, f_m1, f_0, f_p1, f_p2 = (f(t + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h)
    d2 = (-f_m2 + 16.0 * f_m1 - 30.0 * f_0 + 16.0 * f_p1 - f_p2) / (12.0 * h * h)
    return f_0, d1, d2


def factorization_residual(n: float, nu, t_grid, nu_dot=None, nu_ddot=None) -> float:
    """Max residual of the two first-order factors applied in sequence.

    Inner factor ``w = nu' + 2/(n-1) (1 - nu**m) nu``, outer
    ``w' + (n+1)/(n-1) (1 + nu**m) w`` with ``m = (n-1)/2``.  Derivatives are
    taken from ``nu_dot``/``nu_ddot`` when supplied, else by 5-point central
    differences.
    """
    _check_n(n)
    t = np.asarray(t_grid, dtype=float)
    if nu_dot is None or nu_ddot is None:
        v, dv, d2v = _central_derivatives(lambda x: np.asarray(nu(x), dtype=float), t, 1e-3)
    else:
        v = np.asarray(nu(t), dtype=float)
        dv = np.asarray(nu_dot(t), dtype=float)
        d2v = np.asarray(nu_ddot(t), dtype=float)
    m = (n - 1.0) / 2.0
    r = 2.0 / (n - 1.0)
    p = (n + 1.0) / (n - 1.0)
    vm = real_power(v, m)
    w = dv + r * (1.0 - vm) * v
    # d/dt [(1 - nu**m) nu] = nu' (1 - (m+1) nu**m)
    dw = d2v + r * dv * (1.0 - (m + 1.0) * vm)
    res = dw + p * (1.0 + vm) * w
    return float(np.max(np.abs(res))) if res.size else 0.0
