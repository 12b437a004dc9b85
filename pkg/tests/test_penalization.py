"""Tests for the penalization calculus: the martingale density phi,
exact clock-expectation formulas, excursion exponents, and the
limit-theorem bookkeeping (normalizers, direction parameters, sweeps).

Oracle values: with the Brownian h(x) = |x| every ingredient of the
exact formulas (hitting probabilities, restricted local-time Laplace
transforms) is a ratio of affine functions of the levels, so the
two-site renewal systems solve by hand to rationals.  The frozen
fractions below were worked out that way with pencil and paper and are
asserted against the quadrature-backed implementation.

Tolerances: single extrapolated h values carry ~1e-9 error (the
extrapolation stops at 1e-8), and the exact formulas compose a dozen or
so of them, so value-vs-oracle checks use 1e-8.  Identities in which
the same h evaluations appear on both sides cancel that noise and are
held to 1e-9 or tighter.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levypen import (
    ClockSpec,
    DegenerateConfigurationError,
    HFunction,
    ModelSpec,
    PenalizationParams,
    WeightState,
)
from levypen.hitting import hB, hC, hit_prob
from levypen.penalization import (
    exact_clock_sweep,
    excursion_exponent,
    expect_gamma_at_hit,
    expect_gamma_inverse_lt,
    expect_gamma_two_point,
    gamma_from_cd,
    limit_constants_exp_clock,
    limit_normalizer,
    martingale_value,
    phi,
    reduce_one_point,
)

from conftest import SyntheticH

ORACLE_TOL = 1e-8     # value vs hand-derived rational, extrapolation noise
IDENT_TOL = 1e-9      # identities where the h noise cancels
EXACT_TOL = 1e-12     # pure float algebra, no quadrature involved


# ---------------------------------------------------------------------------
# parameter containers


def test_params_reject_coincident_sites():
    with pytest.raises(ValueError):
        PenalizationParams(a=1.0, b=1.0, lam_a=1.0, lam_b=1.0)


def test_params_reject_negative_rates():
    with pytest.raises(ValueError):
        PenalizationParams(a=0.0, b=1.0, lam_a=-0.5, lam_b=1.0)
    with pytest.raises(ValueError):
        PenalizationParams(a=0.0, b=1.0, lam_a=1.0, lam_b=-2.0)


def test_params_reject_gamma_outside_unit_interval():
    with pytest.raises(ValueError):
        PenalizationParams(a=0.0, b=1.0, lam_a=1.0, lam_b=1.0, gamma=1.5)


def test_params_swapped_exchanges_roles():
    p = PenalizationParams(a=0.0, b=1.0, lam_a=2.0, lam_b=3.0, gamma=0.25)
    q = p.swapped()
    assert (q.a, q.b, q.lam_a, q.lam_b, q.gamma) == (1.0, 0.0, 3.0, 2.0, 0.25)
    r = q.swapped()
    assert (r.a, r.b, r.lam_a, r.lam_b, r.gamma) == (0.0, 1.0, 2.0, 3.0, 0.25)


def test_params_with_gamma_replaces_only_gamma():
    p = PenalizationParams(a=0.0, b=1.0, lam_a=2.0, lam_b=3.0, gamma=0.0)
    q = p.with_gamma(-0.5)
    assert (q.a, q.b, q.lam_a, q.lam_b) == (p.a, p.b, p.lam_a, p.lam_b)
    assert q.gamma == -0.5


def test_clock_spec_validation():
    with pytest.raises(ValueError):
        ClockSpec.exponential(0.0)
    with pytest.raises(ValueError):
        ClockSpec.exponential(-1.0)
    with pytest.raises(ValueError):
        ClockSpec.two_point(0.0, 1.0)
    with pytest.raises(ValueError):
        ClockSpec.two_point(1.0, -1.0)
    with pytest.raises(ValueError):
        ClockSpec.inverse_lt(1.0, 0.0)
    assert ClockSpec.hitting(-3.0).c == -3.0
    assert ClockSpec.exponential(0.5).q == 0.5


def test_weight_state_rejects_negative_local_time():
    with pytest.raises(ValueError):
        WeightState(x_t=0.0, l_a=-1.0, l_b=0.0)
    with pytest.raises(ValueError):
        WeightState(x_t=0.0, l_a=0.0, l_b=-1e-9)


# ---------------------------------------------------------------------------
# phi


def test_phi_brownian_midpoint_value(hf_bm, pen_unit):
    # Unit rates at 0 and 1, no tilt: phi is flat at 1/2 between the
    # sites (hand evaluation with h(x) = |x|).
    assert phi(hf_bm, pen_unit, 0.0) == pytest.approx(0.5, abs=ORACLE_TOL)
    assert phi(hf_bm, pen_unit, 0.5) == pytest.approx(0.5, abs=ORACLE_TOL)
    assert phi(hf_bm, pen_unit, 1.0) == pytest.approx(0.5, abs=ORACLE_TOL)


def test_phi_requires_a_positive_rate(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.0, lam_b=0.0)
    with pytest.raises(DegenerateConfigurationError):
        phi(hf_bm, p, 0.5)


def test_phi_positive_on_wide_grid(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.7, lam_b=0.2, gamma=0.25)
    for x in np.linspace(-20.0, 20.0, 41):
        assert phi(hf_bm, p, float(x)) > 0.0


def test_phi_positive_on_wide_grid_stable(hf_stable):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.7, lam_b=0.2)
    for x in np.linspace(-20.0, 20.0, 21):
        assert phi(hf_stable, p, float(x)) > 0.0


def test_phi_invariant_under_site_relabeling(hf_bm):
    # (a, lam_a) and (b, lam_b) are labels, not ordered roles.
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.7, lam_b=0.2, gamma=0.25)
    for x in (-1.5, 0.0, 0.3, 1.0, 4.0):
        assert phi(hf_bm, p, x) == pytest.approx(
            phi(hf_bm, p.swapped(), x), rel=EXACT_TOL)


def test_phi_reflection_symmetry(hf_bm, pen_unit):
    # Symmetric process, symmetric rates: phi is even about (a+b)/2.
    for x in (0.1, 0.5, 1.3, 3.0):
        assert phi(hf_bm, pen_unit, x) == pytest.approx(
            phi(hf_bm, pen_unit, 1.0 - x), abs=IDENT_TOL)


def test_phi_affine_in_gamma(hf_bm):
    # phi with tilt gamma is the affine combination of the two extreme
    # tilts: ((1+g)/2) phi^{(+1)} + ((1-g)/2) phi^{(-1)}.
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.7, lam_b=0.2)
    for x in (-2.0, 0.25, 1.5):
        up = phi(hf_bm, p.with_gamma(1.0), x)
        dn = phi(hf_bm, p.with_gamma(-1.0), x)
        for g in (-0.8, -0.3, 0.0, 0.4, 0.9):
            want = (1.0 + g) / 2.0 * up + (1.0 - g) / 2.0 * dn
            assert phi(hf_bm, p.with_gamma(g), x) == pytest.approx(
                want, rel=1e-11)


def test_phi_gamma_inert_when_second_moment_infinite(hf_stable):
    # Infinite variance kills the linear tilt term, so all gamma agree.
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.7, lam_b=0.2)
    for x in (-1.0, 0.4, 2.0):
        base = phi(hf_stable, p, x)
        for g in (-1.0, -0.5, 0.5, 1.0):
            assert phi(hf_stable, p.with_gamma(g), x) == pytest.approx(
                base, rel=EXACT_TOL)


# ---------------------------------------------------------------------------
# martingale_value and the one-site reduction


def test_martingale_value_at_zero_local_time_is_phi(hf_bm, pen_unit):
    s = WeightState(x_t=0.3, l_a=0.0, l_b=0.0)
    assert martingale_value(hf_bm, pen_unit, s) == phi(hf_bm, pen_unit, 0.3)


def test_martingale_value_discounts_by_accumulated_local_time(
        hf_bm, pen_unit):
    base = phi(hf_bm, pen_unit, 0.3)
    s = WeightState(x_t=0.3, l_a=0.5, l_b=1.5)
    got = martingale_value(hf_bm, pen_unit, s)
    assert got == pytest.approx(base * math.exp(-0.5 - 1.5), rel=EXACT_TOL)
    assert got < base


def test_reduce_one_point_values(hf_bm):
    # h(x) + 1/lam with h(x) = |x|.
    assert reduce_one_point(hf_bm, 1.0, 0.0, 2.0) == pytest.approx(
        3.0, abs=ORACLE_TOL)
    assert reduce_one_point(hf_bm, 4.0, 0.0, 0.0) == pytest.approx(
        0.25, abs=ORACLE_TOL)
    with pytest.raises(ValueError):
        reduce_one_point(hf_bm, 0.0, 0.0, 1.0)


def test_phi_degenerates_to_one_point_as_second_rate_vanishes(hf_bm):
    # Sending lam_b -> 0 removes the site at b; the error is linear in
    # lam_b, so shrinking it 100x shrinks the gap ~100x.
    want = reduce_one_point(hf_bm, 1.0, 0.0, 2.0)
    gaps = []
    for lam_b in (1e-4, 1e-6):
        p = PenalizationParams(a=0.0, b=1.0, lam_a=1.0, lam_b=lam_b)
        gaps.append(abs(phi(hf_bm, p, 2.0) - want))
    assert gaps[1] < 2e-5
    assert gaps[1] < 0.05 * gaps[0]


# ---------------------------------------------------------------------------
# exact clock expectations


def test_expect_gamma_at_hit_frozen_rationals(hf_bm, pen_unit):
    # Hand-solved renewal system (h(x) = |x|, sites 0 and 1, unit
    # rates, start 1/2): P[Gamma at T_5] = 2/35, P[Gamma at T_3] = 2/19.
    assert expect_gamma_at_hit(hf_bm, pen_unit, 0.5, 5.0) == pytest.approx(
        2.0 / 35.0, abs=ORACLE_TOL)
    assert expect_gamma_at_hit(hf_bm, pen_unit, 0.5, 3.0) == pytest.approx(
        2.0 / 19.0, abs=ORACLE_TOL)


def test_expect_gamma_at_hit_is_one_without_penalization(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.0, lam_b=0.0)
    assert expect_gamma_at_hit(hf_bm, p, 0.5, 5.0) == pytest.approx(
        1.0, abs=IDENT_TOL)


def test_expect_gamma_at_hit_near_one_for_tiny_rates(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=1e-8, lam_b=1e-8)
    assert expect_gamma_at_hit(hf_bm, p, 0.5, 5.0) == pytest.approx(
        1.0, abs=1e-6)


def test_expect_gamma_at_hit_trivial_from_the_target(hf_bm, pen_unit):
    # Starting at c the clock fires immediately and no weight is lost.
    assert expect_gamma_at_hit(hf_bm, pen_unit, 5.0, 5.0) == pytest.approx(
        1.0, abs=IDENT_TOL)


def test_expect_gamma_at_hit_decreasing_in_rates(hf_bm):
    vals = [expect_gamma_at_hit(
                hf_bm, PenalizationParams(0.0, 1.0, lam, lam), 0.5, 5.0)
            for lam in (0.25, 0.5, 1.0, 2.0)]
    assert all(0.0 < v < 1.0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_expect_gamma_two_point_frozen_rationals(hf_bm, pen_unit):
    # Same hand calculation pushed through the two-by-two elimination
    # between levels 4 and -4: 17/236 and 13/236, summing to 15/118.
    got = expect_gamma_two_point(hf_bm, pen_unit, 0.5, 4.0, 4.0)
    assert got.restricted_c == pytest.approx(17.0 / 236.0, abs=ORACLE_TOL)
    assert got.restricted_d == pytest.approx(13.0 / 236.0, abs=ORACLE_TOL)
    assert got.total == pytest.approx(15.0 / 118.0, abs=ORACLE_TOL)
    assert got.total == got.restricted_c + got.restricted_d


def test_expect_gamma_two_point_partition_for_small_rates(hf_bm):
    # With vanishing rates the restricted pieces become plain hitting
    # probabilities; the defect is linear in lam.
    p = PenalizationParams(a=0.0, b=1.0, lam_a=1e-4, lam_b=1e-4)
    got = expect_gamma_two_point(hf_bm, p, 0.5, 4.0, 4.0)
    assert got.total == pytest.approx(1.0, abs=2e-3)
    assert got.restricted_c == pytest.approx(
        hit_prob(hf_bm, 0.5, 4.0, -4.0), abs=1e-3)


def test_expect_gamma_two_point_degenerate_without_penalization(hf_bm):
    # At lam = 0 no weight is lost on either route and the renewal
    # elimination between the levels is singular.
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.0, lam_b=0.0)
    with pytest.raises(DegenerateConfigurationError):
        expect_gamma_two_point(hf_bm, p, 0.5, 4.0, 4.0)


def test_expect_gamma_two_point_rejects_bad_levels(hf_bm, pen_unit):
    with pytest.raises(ValueError):
        expect_gamma_two_point(hf_bm, pen_unit, 0.5, -4.0, 4.0)
    with pytest.raises(ValueError):
        expect_gamma_two_point(hf_bm, pen_unit, 0.5, 4.0, 0.0)


def test_excursion_exponent_frozen_rational(hf_bm, pen_unit):
    # Hand value at level 3: Lambda(3) = 4/19.
    assert excursion_exponent(hf_bm, pen_unit, 3.0) == pytest.approx(
        4.0 / 19.0, abs=ORACLE_TOL)


def test_excursion_exponent_vanishes_without_penalization(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=0.0, lam_b=0.0)
    assert abs(excursion_exponent(hf_bm, p, 3.0)) < EXACT_TOL


def test_excursion_exponent_decreasing_in_level(hf_bm, pen_unit):
    vals = [excursion_exponent(hf_bm, pen_unit, c) for c in (3.0, 6.0, 12.0)]
    assert all(v > 0.0 for v in vals)
    assert vals[0] > vals[1] > vals[2]


def test_expect_gamma_inverse_lt_frozen_value(hf_bm, pen_unit):
    # Survival to T_3 (2/19) times one unit of local time at 3
    # (exp(-Lambda(3)) = exp(-4/19)).
    want = math.exp(-4.0 / 19.0) * 2.0 / 19.0
    assert expect_gamma_inverse_lt(
        hf_bm, pen_unit, 0.5, 3.0, 1.0) == pytest.approx(want, abs=ORACLE_TOL)


def test_expect_gamma_inverse_lt_u_zero_matches_hitting(hf_bm, pen_unit):
    assert expect_gamma_inverse_lt(hf_bm, pen_unit, 0.5, 3.0, 0.0) == (
        pytest.approx(expect_gamma_at_hit(hf_bm, pen_unit, 0.5, 3.0),
                      rel=EXACT_TOL))
    with pytest.raises(ValueError):
        expect_gamma_inverse_lt(hf_bm, pen_unit, 0.5, 3.0, -1.0)


def test_expect_gamma_inverse_lt_decays_geometrically_in_u(hf_bm, pen_unit):
    lam = excursion_exponent(hf_bm, pen_unit, 3.0)
    vals = [expect_gamma_inverse_lt(hf_bm, pen_unit, 0.5, 3.0, u)
            for u in (1.0, 2.0, 3.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0
    assert vals[1] / vals[0] == pytest.approx(math.exp(-lam), rel=1e-11)
    assert vals[2] / vals[1] == pytest.approx(math.exp(-lam), rel=1e-11)


# ---------------------------------------------------------------------------
# limit-theorem bookkeeping


def test_limit_normalizer_per_clock_kind(hf_bm):
    assert limit_normalizer(hf_bm, ClockSpec.hitting(8.0)) == pytest.approx(
        16.0, abs=ORACLE_TOL)
    assert limit_normalizer(hf_bm, ClockSpec.two_point(1.0, 1.0)) == (
        pytest.approx(1.0, abs=ORACLE_TOL))
    assert limit_normalizer(hf_bm, ClockSpec.inverse_lt(8.0, 1.0)) == (
        pytest.approx(16.0, abs=ORACLE_TOL))
    # Exponential clock: r_q(0) = 1/sqrt(2q) for the unit Brownian.
    assert limit_normalizer(hf_bm, ClockSpec.exponential(1.0)) == (
        pytest.approx(1.0 / math.sqrt(2.0), abs=ORACLE_TOL))
    with pytest.raises(ValueError):
        limit_normalizer(hf_bm, ClockSpec(kind="bogus"))


def test_gamma_from_cd_values():
    assert gamma_from_cd(1.0, 1.0) == 0.0
    assert gamma_from_cd(1.0, 3.0) == pytest.approx(0.5, rel=EXACT_TOL)
    assert gamma_from_cd(3.0, 1.0) == pytest.approx(-0.5, rel=EXACT_TOL)
    with pytest.raises(ValueError):
        gamma_from_cd(0.0, 1.0)
    with pytest.raises(ValueError):
        gamma_from_cd(1.0, -2.0)


@given(c=st.floats(0.1, 10.0), g=st.floats(-0.95, 0.95))
def test_gamma_from_cd_roundtrip(c, g):
    # d/c = (1+g)/(1-g) inverts the direction parameter.
    d = c * (1.0 + g) / (1.0 - g)
    assert gamma_from_cd(c, d) == pytest.approx(g, abs=1e-12)


def test_limit_constants_exp_clock_frozen_value(hf_bm, pen_unit):
    # Unit Brownian, sites 0 and 1, unit rates: hB(-1) = 2, so both
    # constants are 1/(1 + 2) = 1/3 (and h(-1) = 1 keeps them equal).
    c1, c2 = limit_constants_exp_clock(hf_bm, pen_unit)
    assert c1 == pytest.approx(1.0 / 3.0, abs=ORACLE_TOL)
    assert c2 == pytest.approx(1.0 / 3.0, abs=ORACLE_TOL)


def test_limit_constants_exp_clock_bounds(hf_bm):
    for lam_a in (0.1, 1.0, 7.0):
        p = PenalizationParams(a=0.0, b=1.0, lam_a=lam_a, lam_b=1.0)
        c1, c2 = limit_constants_exp_clock(hf_bm, p)
        assert 0.0 < c2 < 1.0
        assert c1 > 0.0


def test_limit_constants_exp_clock_vanish_for_huge_rate(hf_bm):
    p = PenalizationParams(a=0.0, b=1.0, lam_a=1e9, lam_b=1.0)
    c1, c2 = limit_constants_exp_clock(hf_bm, p)
    assert c1 < 1e-8
    assert c2 < 1e-8


# ---------------------------------------------------------------------------
# exact sweeps


def test_exact_sweep_hitting_converges(hf_bm, pen_unit):
    rows = exact_clock_sweep(hf_bm, pen_unit, 0.5, "hitting",
                             [2.0, 4.0, 8.0])
    assert [r.parameter for r in rows] == [2.0, 4.0, 8.0]
    for r in rows:
        assert r.normalized == pytest.approx(r.normalizer * r.expectation,
                                             rel=EXACT_TOL)
        assert r.target == pytest.approx(0.5, abs=ORACLE_TOL)
        assert r.gap == pytest.approx(abs(r.normalized - r.target) / r.target,
                                      rel=EXACT_TOL)
    gaps = [r.gap for r in rows]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.1


def test_exact_sweep_two_point_balanced_target(hf_bm, pen_unit):
    # c = d means no directional tilt; the restricted-to-c limit is
    # half of the fully up-tilted phi.
    rows = exact_clock_sweep(hf_bm, pen_unit, 0.5, "two_point",
                             [2.0, 4.0, 8.0], d_over_c=1.0)
    want = 0.5 * phi(hf_bm, pen_unit.with_gamma(1.0), 0.5)
    for r in rows:
        assert r.target == pytest.approx(want, rel=EXACT_TOL)
    gaps = [r.gap for r in rows]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.1


def test_exact_sweep_inverse_lt_converges(hf_bm, pen_unit):
    rows = exact_clock_sweep(hf_bm, pen_unit, 0.5, "inverse_lt",
                             [4.0, 8.0, 16.0, 32.0], u=1.0)
    gaps = [r.gap for r in rows]
    assert gaps[0] > gaps[1] > gaps[2] > gaps[3]
    assert gaps[3] < 0.005


def test_exact_sweep_rejects_exponential_kind(hf_bm, pen_unit):
    with pytest.raises(ValueError):
        exact_clock_sweep(hf_bm, pen_unit, 0.5, "exponential", [1.0])


# ---------------------------------------------------------------------------
# synthetic-h property checks (no quadrature)


@st.composite
def synthetic_setups(draw):
    slope = draw(st.floats(0.2, 3.0))
    curve = draw(st.floats(0.0, 2.0))
    a = draw(st.floats(-3.0, 3.0))
    gap = draw(st.floats(0.5, 4.0))
    lam_a = draw(st.floats(0.1, 5.0))
    lam_b = draw(st.floats(0.1, 5.0))
    x = draw(st.floats(-10.0, 10.0))
    return SyntheticH(slope, curve), PenalizationParams(
        a, a + gap, lam_a, lam_b), x


@given(setup=synthetic_setups(), g=st.floats(-1.0, 1.0))
@settings(max_examples=150, deadline=None)
def test_phi_affine_in_gamma_synthetic(setup, g):
    hf, p, x = setup
    up = phi(hf, p.with_gamma(1.0), x)
    dn = phi(hf, p.with_gamma(-1.0), x)
    want = (1.0 + g) / 2.0 * up + (1.0 - g) / 2.0 * dn
    assert phi(hf, p.with_gamma(g), x) == pytest.approx(
        want, rel=1e-11, abs=1e-11)


@given(setup=synthetic_setups())
@settings(max_examples=150, deadline=None)
def test_phi_swap_invariance_synthetic(setup):
    hf, p, x = setup
    assert phi(hf, p, x) == pytest.approx(phi(hf, p.swapped(), x),
                                          rel=1e-12, abs=1e-12)


@given(setup=synthetic_setups(),
       l_a=st.floats(0.0, 10.0), l_b=st.floats(0.0, 10.0))
@settings(max_examples=150, deadline=None)
def test_martingale_value_bounded_by_phi_synthetic(setup, l_a, l_b):
    hf, p, x = setup
    s = WeightState(x_t=x, l_a=l_a, l_b=l_b)
    val = martingale_value(hf, p, s)
    assert 0.0 < val <= phi(hf, p, x) * (1.0 + 1e-15)
