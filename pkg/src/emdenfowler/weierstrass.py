"""Real-argument Weierstrass elliptic function.

``wp`` is evaluated from its Laurent expansion about the origin and carried
outward with the duplication formula.  The germs are first rescaled by the
homogeneity relation

    wp(t; g2, g3) = mu**2 * wp(mu*t; g2/mu**4, g3/mu**6)

so that the normalized germs satisfy ``max(|g2|, |g3|) == 1``.  For such
germs the nearest non-zero lattice point is at distance > 2.7, which fixes a
safe series radius once and for all.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, PoleProximity

__all__ = [
    "GermPair",
    "LatticeCase",
    "DegenerateBranch",
    "discriminant",
    "classify",
    "wp",
    "wp_prime",
    "wp_pair",
    "wp_regular",
    "wp_degenerate",
    "wp_degenerate_prime",
    "degenerate_parameters",
    "laurent_coefficients",
]

# series radius in normalized units (lattice distance > 2.78 there)
_SERIES_RADIUS = 1.0
_N_TERMS = 30
POLE_THRESHOLD = 1e12


@dataclass(frozen=True)
class GermPair:
    """Weierstrass invariants (g2, g3)."""

    g2: float
    g3: float

    def __post_init__(self):
        object.__setattr__(self, "g2", float(self.g2))
        object.__setattr__(self, "g3", float(self.g3))
        if not (math.isfinite(self.g2) and math.isfinite(self.g3)):
            raise DomainError(f"non-finite germs {self.g2!r}, {self.g3!r}")

    @property
    def discriminant(self) -> float:
        return discriminant(self)


class LatticeCase(enum.Enum):
    Generic = "Generic"
    DegenerateSoliton = "DegenerateSoliton"
    DegeneratePeriodic = "DegeneratePeriodic"
    Lemniscatic = "Lemniscatic"
    Equianharmonic = "Equianharmonic"
    FullyDegenerate = "FullyDegenerate"


class DegenerateBranch(enum.Enum):
    Hyperbolic = "Hyperbolic"
    Trigonometric = "Trigonometric"


def _as_germs(g) -> GermPair:
    if isinstance(g, GermPair):
        return g
    g2, g3 = g
    return GermPair(g2, g3)


def discriminant(g) -> float:
    """Modular discriminant ``g2**3 - 27*g3**2``."""
    g = _as_germs(g)
    return g.g2 ** 3 - 27.0 * g.g3 ** 2


def classify(g) -> LatticeCase:
    """Tag a germ pair by the shape of its lattice.

    ``Equianharmonic`` requires ``g3 > 0``: a negative ``g3`` with ``g2 = 0``
    is reported as ``Generic``.
    """
    g = _as_germs(g)
    g2_zero = abs(g.g2) <= 1e-14
    g3_zero = abs(g.g3) <= 1e-14
    if g2_zero and g3_zero:
        return LatticeCase.FullyDegenerate
    delta_tol = 1e-12 * max(1.0, abs(g.g2) ** 3, g.g3 ** 2)
    if abs(discriminant(g)) <= delta_tol and g.g2 > 0 and not g3_zero:
        if g.g3 < 0:
            return LatticeCase.DegenerateSoliton
        return LatticeCase.DegeneratePeriodic
    if g3_zero and g.g2 > 0:
        return LatticeCase.Lemniscatic
    if g2_zero and g.g3 > 0:
        return LatticeCase.Equianharmonic
    return LatticeCase.Generic


@lru_cache(maxsize=256)
def laurent_coefficients(g2: float, g3: float, n_terms: int = _N_TERMS) -> tuple:
    """Coefficients ``c[k]`` of ``wp = 1/t**2 + sum_{k>=2} c[k] t**(2k-2)``.

    Index 0 and 1 are unused placeholders.
    """
    c = [0.0] * (n_terms + 1)
    if n_terms >= 2:
        c[2] = g2 / 20.0
    if n_terms >= 3:
        c[3] = g3 / 28.0
    for k in range(4, n_terms + 1):
        acc = 0.0
        for m in range(2, k - 1):
            acc += c[m] * c[k - m]
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return tuple(c)


def _series(t: float, c: tuple) -> tuple[float, float, float]:
    """Regular part of wp, full wp' at small ``t`` (Horner in t**2)."""
    t2 = t * t
    reg = 0.0
    dreg = 0.0
    for k in range(len(c) - 1, 1, -1):
        reg = reg * t2 + c[k]
        dreg = dreg * t2 + (2 * k - 2) * c[k]
    reg *= t2
    dreg *= t
    return reg, 1.0 / t2 + reg, -2.0 / (t2 * t) + dreg


def _scale(g: GermPair) -> float:
    return max(abs(g.g2) ** 0.25, abs(g.g3) ** (1.0 / 6.0))


def _normalized_pair(t: float, g2: float, g3: float) -> tuple[float, float]:
    """(wp, wp') for t > 0 and |g2|, |g3| <= 1."""
    c = laurent_coefficients(g2, g3)
    doublings = 0
    s = t
    while s > _SERIES_RADIUS:
        s *= 0.5
        doublings += 1
    _, p, dp = _series(s, c)
    for _ in range(doublings):
        if dp == 0.0:
            raise PoleProximity(f"wp: hit a lattice point at t={t!r}")
        ddp = 6.0 * p * p - 0.5 * g2
        lam = ddp / (2.0 * dp)
        dlam = (12.0 * p * dp * dp - ddp * ddp) / (2.0 * dp * dp)
        p, dp = -2.0 * p + lam * lam, -dp + lam * dlam
        if not math.isfinite(p) or abs(p) > POLE_THRESHOLD:
            raise PoleProximity(f"wp: t={t!r} is numerically at a pole")
    return p, dp


def wp_pair(t: float, g) -> tuple[float, float]:
    """Return ``(wp(t), wp'(t))`` for real ``t`` and real germs."""
    g = _as_germs(g)
    t = float(t)
    if t == 0.0:
        raise DomainError("wp has a double pole at t = 0")
    sign = 1.0 if t > 0 else -1.0
    at = abs(t)
    mu = _scale(g)
    if mu == 0.0:
        p, dp = 1.0 / (at * at), -2.0 / (at ** 3)
    elif mu < 1.0 and mu * at <= _SERIES_RADIUS:
        # unscaled coefficients stay bounded; avoids mu**6 underflow for tiny germs
        _, p, dp = _series(at, laurent_coefficients(g.g2, g.g3))
    else:
        p, dp = _normalized_pair(mu * at, g.g2 / mu ** 4, g.g3 / mu ** 6)
        p *= mu * mu
        dp *= mu ** 3
    if not math.isfinite(p) or abs(p) > POLE_THRESHOLD:
        raise PoleProximity(f"wp: t={t!r} is numerically at a pole")
    return p, sign * dp


def wp(t: float, g) -> float:
    return wp_pair(t, g)[0]


def wp_prime(t: float, g) -> float:
    return wp_pair(t, g)[1]


def wp_regular(t: float, g) -> float:
    """``wp(t) - 1/t**2`` without cancellation for small ``|t|``."""
    g = _as_germs(g)
    t = float(t)
    if t == 0.0:
        return 0.0
    mu = _scale(g)
    if mu == 0.0:
        return 0.0
    s = mu * abs(t)
    if s <= _SERIES_RADIUS:
        if mu < 1.0:
            return _series(abs(t), laurent_coefficients(g.g2, g.g3))[0]
        reg, _, _ = _series(s, laurent_coefficients(g.g2 / mu ** 4, g.g3 / mu ** 6))
        return reg * mu * mu
    return wp(t, g) - 1.0 / (t * t)


def degenerate_parameters(g) -> tuple[float, DegenerateBranch]:
    """``(c, branch)`` for a germ pair with vanishing discriminant.

    Germs are ``(12c**2, -8c**3)`` for the hyperbolic branch and
    ``(12c**2, 8c**3)`` for the trigonometric one.
    """
    g = _as_germs(g)
    case = classify(g)
    if case not in (LatticeCase.DegenerateSoliton, LatticeCase.DegeneratePeriodic):
        raise DomainError(f"germs {g} are not a degenerate (Delta = 0, g2 > 0) pair")
    c = 1.5 * abs(g.g3) / g.g2
    if case is LatticeCase.DegenerateSoliton:
        return c, DegenerateBranch.Hyperbolic
    return c, DegenerateBranch.Trigonometric


def _degenerate_parts(t, c, branch):
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    branch = DegenerateBranch(branch)
    k = math.sqrt(3.0 * c)
    x = k * float(t)
    if branch is DegenerateBranch.Hyperbolic:
        if abs(x) > 300.0:
            # 3c/sinh**2 underflows relative to c
            return k, math.inf, math.inf, c
        s = math.sinh(x)
        co = math.cosh(x)
        base = c
    else:
        s = math.sin(x)
        co = math.cos(x)
        base = -c
    if abs(s) < 1e-15 * max(1.0, abs(x)):
        raise DomainError(f"t={t!r} is a singularity of the degenerate form")
    return k, s, co, base


def wp_degenerate(t: float, c: float, branch) -> float:
    """Closed form of wp when the discriminant vanishes.

    Hyperbolic: ``c + 3c/sinh(sqrt(3c) t)**2``;
    trigonometric: ``-c + 3c/sin(sqrt(3c) t)**2``.
    """
    k, s, co, base = _degenerate_parts(t, c, branch)
    if math.isinf(s):
        return base
    return base + 3.0 * c / (s * s)


def wp_degenerate_prime(t: float, c: float, branch) -> float:
    k, s, co, base = _degenerate_parts(t, c, branch)
    if math.isinf(s):
        return 0.0
    return -6.0 * c * k * co / (s ** 3)
