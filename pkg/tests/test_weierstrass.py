import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emdenfowler.errors import DomainError, PoleProximity
from emdenfowler.weierstrass import (
    DegenerateBranch,
    GermPair,
    LatticeCase,
    classify,
    degenerate_parameters,
    discriminant,
    laurent_coefficients,
    wp,
    wp_degenerate,
    wp_degenerate_prime,
    wp_pair,
    wp_prime,
    wp_regular,
)
from emdenfowler.oracle import fd_derivative_check

germ = st.floats(-2.0, 2.0, allow_nan=False)
SOLITON = GermPair(1 / 192, -1 / 13824)


def ode_defect(t, g):
    p, dp = wp_pair(t, g)
    return abs(dp * dp - (4 * p ** 3 - g.g2 * p - g.g3)) / max(1.0, abs(p) ** 3)


@pytest.mark.parametrize(
    "g, expected",
    [((1 / 192, -1 / 13824), 0.0), ((0.0, -1 / 16), -27 / 256), ((0.0, 0.0), 0.0)],
)
def test_discriminant_examples(g, expected):
    assert discriminant(g) == pytest.approx(expected, abs=1e-18)
    assert GermPair(*g).discriminant == pytest.approx(expected, abs=1e-18)


@pytest.mark.parametrize(
    "g, case",
    [
        ((1 / 192, -1 / 13824), LatticeCase.DegenerateSoliton),
        ((1 / 192, 1 / 13824), LatticeCase.DegeneratePeriodic),
        ((1 / 192, 0.0), LatticeCase.Lemniscatic),
        ((0.0, 1.0), LatticeCase.Equianharmonic),
        ((0.0, -1 / 16), LatticeCase.Generic),
        ((0.0, 0.0), LatticeCase.FullyDegenerate),
        ((1.0, 0.1), LatticeCase.Generic),
    ],
)
def test_classify_examples(g, case):
    assert classify(g) is case


@given(germ, germ)
def test_classify_total_and_deterministic(g2, g3):
    a = classify((g2, g3))
    assert isinstance(a, LatticeCase)
    assert classify((g2, g3)) is a


def test_germ_pair_rejects_non_finite():
    with pytest.raises(DomainError):
        GermPair(math.nan, 0.0)


def test_small_argument_leading_terms():
    t = 1e-3
    expected = 1e6 + (1 / 240) * 1e-6
    assert wp(t, (1 / 12, 0.0)) == pytest.approx(expected, rel=1e-9)


def test_laurent_recursion_low_orders():
    g2, g3 = 0.7, -0.3
    c = laurent_coefficients(g2, g3)
    assert c[2] == pytest.approx(g2 / 20)
    assert c[3] == pytest.approx(g3 / 28)
    assert c[4] == pytest.approx(g2 ** 2 / 1200)
    assert c[5] == pytest.approx(3 * g2 * g3 / 6160)


@settings(max_examples=200, deadline=None)
@given(germ, germ, st.floats(1e-5, 1e-2))
def test_laurent_consistency(g2, g3, t):
    # evaluated without the 1/t**2 cancellation, which float wp cannot resolve at 1e-6 t**4
    reg = wp_regular(t, (g2, g3))
    assert abs(reg - g2 * t * t / 20 - g3 * t ** 4 / 28) < 1e-6 * t ** 4


@settings(max_examples=100, deadline=None)
@given(germ, germ, st.floats(1e-3, 0.2))
def test_regular_part_matches_full_evaluation(g2, g3, t):
    g = (g2, g3)
    assert wp(t, g) == pytest.approx(1 / t ** 2 + wp_regular(t, g), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(germ, germ, st.floats(0.3, 3.0))
def test_ode_residual_property(g2, g3, t):
    g = GermPair(g2, g3)
    try:
        assert ode_defect(t, g) < 1e-9
    except PoleProximity:
        pass


@settings(max_examples=100, deadline=None)
@given(germ, germ, st.floats(0.05, 3.0))
def test_evenness(g2, g3, t):
    g = (g2, g3)
    try:
        p, dp = wp_pair(t, g)
    except PoleProximity:
        return
    q, dq = wp_pair(-t, g)
    assert q == pytest.approx(p, rel=1e-12, abs=1e-300)
    assert dq == pytest.approx(-dp, rel=1e-12, abs=1e-300)


def test_zero_argument_is_pole():
    with pytest.raises(DomainError):
        wp(0.0, (1.0, 0.0))


def test_pole_proximity_at_lattice_point():
    # lemniscatic g2 = 1: real half-period Gamma(1/4)**2 / (4 sqrt(pi))
    omega = math.gamma(0.25) ** 2 / (4 * math.sqrt(math.pi))
    with pytest.raises(PoleProximity):
        wp(2 * omega, (1.0, 0.0))
    assert abs(wp(omega, (1.0, 0.0)) - 0.5) < 1e-10


def test_tiny_and_large_germs():
    assert wp(1.0, (1e-269, 0.0)) == pytest.approx(1.0, rel=1e-15)
    g = GermPair(1e6, -3e8)
    for t in (1e-3, 2e-3):
        assert ode_defect(t, g) < 1e-9


def test_fully_degenerate_is_inverse_square():
    for t in (0.1, 0.5, 2.0):
        assert wp(t, (0.0, 0.0)) == pytest.approx(1 / t ** 2, rel=1e-15)
        assert wp_prime(t, (0.0, 0.0)) == pytest.approx(-2 / t ** 3, rel=1e-15)


def test_soliton_germs_closed_form():
    for t in np.linspace(0.5, 4.0, 36):
        expected = 1 / 48 + (1 / 16) / math.sinh(t / 4) ** 2
        assert wp(t, SOLITON) == pytest.approx(expected, rel=1e-8)


def test_degenerate_parameters():
    c, branch = degenerate_parameters(SOLITON)
    assert c == pytest.approx(1 / 48, rel=1e-14)
    assert branch is DegenerateBranch.Hyperbolic
    c, branch = degenerate_parameters((1 / 192, 1 / 13824))
    assert branch is DegenerateBranch.Trigonometric
    with pytest.raises(DomainError):
        degenerate_parameters((1.0, 0.1))


@pytest.mark.parametrize(
    "branch, t, expected",
    [
        (DegenerateBranch.Hyperbolic, 2.0, 1 / 48 + (1 / 16) / math.sinh(0.5) ** 2),
        (DegenerateBranch.Trigonometric, 1.0, -1 / 48 + (1 / 16) / math.sin(0.25) ** 2),
    ],
)
def test_degenerate_closed_forms(branch, t, expected):
    c = 1 / 48
    p = wp_degenerate(t, c, branch)
    assert p == pytest.approx(expected, rel=1e-14)
    g2 = 12 * c * c
    g3 = (-8 if branch is DegenerateBranch.Hyperbolic else 8) * c ** 3
    dp = wp_degenerate_prime(t, c, branch)
    assert abs(dp * dp - (4 * p ** 3 - g2 * p - g3)) < 1e-12


def test_hyperbolic_limit():
    assert wp_degenerate(1e4, 0.3, DegenerateBranch.Hyperbolic) == 0.3
    assert wp_degenerate(50.0, 0.3, DegenerateBranch.Hyperbolic) == pytest.approx(0.3, rel=1e-12)


def test_degenerate_singularity_rejected():
    with pytest.raises(DomainError):
        wp_degenerate(0.0, 0.1, DegenerateBranch.Hyperbolic)
    with pytest.raises(DomainError):
        wp_degenerate(1.0, -0.1, DegenerateBranch.Trigonometric)


@pytest.mark.parametrize("g3_sign", [-1.0, 1.0])
@pytest.mark.parametrize("c", [1 / 48, 0.1, 0.5])
def test_degenerate_consistency(c, g3_sign):
    g = GermPair(12 * c * c, g3_sign * 8 * c ** 3)
    cc, branch = degenerate_parameters(g)
    assert cc == pytest.approx(c, rel=1e-14)
    for t in np.linspace(0.5, 4.0, 50):
        try:
            p = wp(t, g)
        except PoleProximity:
            continue
        assert p == pytest.approx(wp_degenerate(t, cc, branch), rel=1e-8)


def test_derivative_matches_finite_differences():
    for g in [(1 / 12, 0.0), (0.0, -1 / 16), (1.0, 0.3), SOLITON]:
        grid = np.linspace(0.4, 2.0, 17)
        err = fd_derivative_check(lambda t: wp(t, g), lambda t: wp_prime(t, g), grid)
        assert err < 1e-6
