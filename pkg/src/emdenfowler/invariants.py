"""First integrals of the two integrable Emden-Fowler classes."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyTrajectory, NEqualsMinusOne
from .efcore import real_power

__all__ = [
    "ConstantId",
    "PhasePoint",
    "InvariantValue",
    "class1_first_integral",
    "class2_first_integral",
    "class1_canonical_invariant",
    "class2_canonical_invariant",
    "invariant_values",
    "invariant_drift",
]


class ConstantId(enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"


@dataclass(frozen=True)
class PhasePoint:
    chi: float
    z: float
    zprime: float

    def __post_init__(self):
        if not self.chi > 0:
            raise DomainError("chi must be positive")


@dataclass(frozen=True)
class InvariantValue:
    value: float
    constant_id: ConstantId

    def __float__(self):
        return float(self.value)


def _check(n, chi):
    if n == -1:
        raise NEqualsMinusOne("first integral has a 2A/(n+1) factor; n = -1 excluded")
    if np.any(np.asarray(chi) <= 0):
        raise DomainError("independent variable must be positive")


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return x[()] if x.ndim == 0 else x


def _class1_value(n, A, chi, z, zp):
    _check(n, chi)
    chi, z, zp = (np.asarray(v, dtype=float) for v in (chi, z, zp))
    return _scalar(
        zp * (chi * zp - z)
        - 2.0 * A / (n + 1.0) * chi ** (-(n + 1.0) / 2.0) * real_power(z, n + 1.0)
    )


def _class2_value(n, A, chi, z, zp):
    _check(n, chi)
    chi, z, zp = (np.asarray(v, dtype=float) for v in (chi, z, zp))
    return _scalar(
        (z - chi * zp) ** 2
        - 2.0 * A / (n + 1.0) * chi ** (-(n + 1.0)) * real_power(z, n + 1.0)
    )


def class1_first_integral(n: float, A: float, p: PhasePoint) -> InvariantValue:
    """``z'(chi z' - z) - 2A/(n+1) chi**(-(n+1)/2) z**(n+1)``.

    Constant along every solution of ``z'' = A chi**(-(n+3)/2) z**n``.
    """
    return InvariantValue(float(_class1_value(n, A, p.chi, p.z, p.zprime)), ConstantId.C1)


def class2_first_integral(n: float, A: float, p: PhasePoint) -> InvariantValue:
    """``(z - chi z')**2 - 2A/(n+1) chi**(-(n+1)) z**(n+1)``, constant along
    solutions of ``z'' = A chi**(-(n+3)) z**n``."""
    return InvariantValue(float(_class2_value(n, A, p.chi, p.z, p.zprime)), ConstantId.C3)


def class1_canonical_invariant(n: float, A: float, xi, eta, eta_xi):
    """Class-one integral in self-adjoint variables ``xi = 1/chi``."""
    _check(n, xi)
    xi, eta, eta_xi = (np.asarray(v, dtype=float) for v in (xi, eta, eta_xi))
    return _scalar(
        xi ** 2 * eta_xi * (xi * eta_xi + eta)
        - 2.0 * A / (n + 1.0) * xi ** ((n + 1.0) / 2.0) * real_power(eta, n + 1.0)
    )


def class2_canonical_invariant(n: float, A: float, xi, eta, eta_xi):
    _check(n, xi)
    xi, eta, eta_xi = (np.asarray(v, dtype=float) for v in (xi, eta, eta_xi))
    return _scalar(
        (eta + xi * eta_xi) ** 2
        - 2.0 * A / (n + 1.0) * xi ** (n + 1.0) * real_power(eta, n + 1.0)
    )


_EVALUATORS = {
    ConstantId.C1: _class1_value,
    ConstantId.C2: _class1_value,
    ConstantId.C3: _class2_value,
}


def invariant_values(traj, which, n: float, A: float) -> np.ndarray:
    which = ConstantId(which)
    return np.atleast_1d(_EVALUATORS[which](n, A, traj.chi, traj.z, traj.zprime))


def invariant_drift(traj, which, n: float, A: float) -> float:
    """``max_i |C(chi_i) - C(chi_0)| / max(1, |C(chi_0)|)`` along ``traj``.

    ``C2`` is evaluated with the class-one expression: it differs from ``C1``
    only by an additive constant, which drops out of the drift.
    """
    if len(traj.chi) == 0:
        raise EmptyTrajectory("trajectory has no samples")
    values = invariant_values(traj, which, n, A)
    c0 = values[0]
    return float(np.max(np.abs(values - c0)) / max(1.0, abs(c0)))
