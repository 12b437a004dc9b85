"""The two-point penalization martingale density and clock expectations.

The weight process is Gamma_t = exp(-lam_a L^a_t - lam_b L^b_t).  For
each of the four clock families (independent exponential time, hitting
time of a far level, two-sided exit, inverse local time) the normalized
expectation of Gamma converges, as the clock is sent to infinity, to the
same positive function phi of the starting point; phi(X_t) Gamma_t is a
martingale.  This module evaluates phi, the exact finite-parameter clock
expectations, the normalizers, and the sweep diagnostics that exhibit
the convergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DegenerateConfigurationError, NumericsError
from .hitting import (
    excursion_rate3,
    gamma_at_hit_from_b,
    hB,
    hC,
    hit_prob,
    hit_prob3,
    lt_laplace_restricted,
)
from .resolvent import HFunction


@dataclass(frozen=True)
class PenalizationParams:
    a: float
    b: float
    lam_a: float
    lam_b: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a and b must be distinct")
        if self.lam_a < 0 or self.lam_b < 0:
            raise ValueError("lam_a and lam_b must be nonnegative")
        if abs(self.gamma) > 1.0:
            raise ValueError("gamma must lie in [-1, 1]")

    def swapped(self) -> "PenalizationParams":
        return PenalizationParams(self.b, self.a, self.lam_b, self.lam_a,
                                  self.gamma)

    def with_gamma(self, gamma: float) -> "PenalizationParams":
        return PenalizationParams(self.a, self.b, self.lam_a, self.lam_b,
                                  gamma)


@dataclass(frozen=True)
class ClockSpec:
    """One of the four clock families.

    kind: 'exponential' (rate q), 'hitting' (level c), 'two_point'
    (levels c and -d), 'inverse_lt' (level c, local-time amount u).
    """

    kind: str
    q: float = 0.0
    c: float = 0.0
    d: float = 0.0
    u: float = 0.0

    @staticmethod
    def exponential(q: float) -> "ClockSpec":
        if q <= 0:
            raise ValueError("q must be positive")
        return ClockSpec(kind="exponential", q=q)

    @staticmethod
    def hitting(c: float) -> "ClockSpec":
        return ClockSpec(kind="hitting", c=c)

    @staticmethod
    def two_point(c: float, d: float) -> "ClockSpec":
        if c <= 0 or d <= 0:
            raise ValueError("two-point clock needs c, d > 0")
        return ClockSpec(kind="two_point", c=c, d=d)

    @staticmethod
    def inverse_lt(c: float, u: float) -> "ClockSpec":
        if u <= 0:
            raise ValueError("u must be positive")
        return ClockSpec(kind="inverse_lt", c=c, u=u)


@dataclass(frozen=True)
class WeightState:
    """Path state entering the martingale: position and the two
    accumulated local times."""

    x_t: float
    l_a: float
    l_b: float

    def __post_init__(self):
        if self.l_a < 0 or self.l_b < 0:
            raise ValueError("local times are nonnegative")


def phi(hf: HFunction, p: PenalizationParams, x: float) -> float:
    """The martingale density phi at x.

    Six terms: the tilted resolvent part, plus hitting-probability-
    weighted contributions of the local-time budgets at a and b.
    """
    a, b, la, lb, g = p.a, p.b, p.lam_a, p.lam_b, p.gamma
    if la + lb <= 0.0:
        raise DegenerateConfigurationError(
            "phi needs at least one positive penalization rate; the "
            "lam -> 0 reduction is reduce_one_point")
    hg = lambda y: hf.h_gamma(g, y)
    H = hB(hf, a - b)
    D = la + lb + la * lb * H
    p_a = hit_prob(hf, x, a, b)
    p_b = 1.0 - p_a
    val = (hg(x - a) - p_b * hg(b - a)
           + p_a * (hg(a - b) + (1.0 + la * hg(b - a)) / D) / (1.0 + la * H)
           + p_b * (hg(b - a) + (1.0 + lb * hg(a - b)) / D) / (1.0 + lb * H))
    if not val > 0.0:
        raise NumericsError(f"phi({x}) = {val} is not positive")
    return val


def martingale_value(hf: HFunction, p: PenalizationParams,
                     s: WeightState) -> float:
    """phi(X_t) * Gamma_t for a realized path state."""
    return phi(hf, p, s.x_t) * math.exp(-p.lam_a * s.l_a - p.lam_b * s.l_b)


def reduce_one_point(hf: HFunction, lam: float, gamma: float,
                     x: float) -> float:
    """One-site limit of phi: h^gamma(x) + 1/lam (site at 0)."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return hf.h_gamma(gamma, x) + 1.0 / lam


def expect_gamma_at_hit(hf: HFunction, p: PenalizationParams, x: float,
                        c: float) -> float:
    """Exact P_x[Gamma at T_c].

    Five pieces, by which of a, b the path visits before reaching c:
    neither; a only (either order a..c); b only; a then b then c with
    further revisits; b then a then c with further revisits.
    """
    a, b, la, lb = p.a, p.b, p.lam_a, p.lam_b
    r = lambda s, avoid, tgt, lam: lt_laplace_restricted(hf, s, avoid, tgt,
                                                         lam)
    ga = gamma_at_hit_from_b(hf, b, a, c, lb, la)  # from a, roles swapped
    gb = gamma_at_hit_from_b(hf, a, b, c, la, lb)
    p3 = lambda tgt, o1, o2: hit_prob3(hf, x, tgt, o1, o2)
    val = (p3(c, a, b)
           + p3(a, b, c) * r(a, b, c, la)
           + p3(b, a, c) * r(b, a, c, lb)
           + p3(a, b, c) * r(a, c, b, la) * gb
           + p3(b, a, c) * r(b, c, a, lb) * ga)
    return min(max(val, 0.0), 1.0)


class TwoPointExpectation(NamedTuple):
    restricted_c: float
    restricted_d: float
    total: float


def expect_gamma_two_point(hf: HFunction, p: PenalizationParams, x: float,
                           c: float, d: float) -> TwoPointExpectation:
    """Exact E_x[Gamma at T_c ^ T_{-d}] split by which side is hit.

    The restriction to {T_c first} is a two-by-two renewal elimination
    between the levels c and -d; both restricted pieces and their sum
    are returned because each has its own limit statement.
    """
    if c <= 0 or d <= 0:
        raise ValueError("two-point clock needs c, d > 0")
    e_x_c = expect_gamma_at_hit(hf, p, x, c)
    e_x_d = expect_gamma_at_hit(hf, p, x, -d)
    e_d_c = expect_gamma_at_hit(hf, p, -d, c)
    e_c_d = expect_gamma_at_hit(hf, p, c, -d)
    den = 1.0 - e_c_d * e_d_c
    if abs(den) < 1e-14:
        raise DegenerateConfigurationError("two-point renewal denominator "
                                           "underflow")
    rc = (e_x_c - e_x_d * e_d_c) / den
    rd = (e_x_d - e_x_c * e_c_d) / den
    return TwoPointExpectation(rc, rd, rc + rd)


def excursion_exponent(hf: HFunction, p: PenalizationParams,
                       c: float) -> float:
    """Lambda(c): the excursion-measure mass of {Gamma < 1} at level c.

    exp(-u Lambda(c)) is the survival factor of the weight across u
    units of local time at c.  Four pieces: excursions reaching a or b
    first, each either coming back with a discounted single-site weight
    or continuing through the second site.
    """
    a, b, la, lb = p.a, p.b, p.lam_a, p.lam_b
    n_a = excursion_rate3(hf, c, a, b)
    n_b = excursion_rate3(hf, c, b, a)
    r = lambda s, avoid, tgt, lam: lt_laplace_restricted(hf, s, avoid, tgt,
                                                         lam)
    ga = gamma_at_hit_from_b(hf, b, a, c, lb, la)
    gb = gamma_at_hit_from_b(hf, a, b, c, la, lb)
    val = (n_a * (hit_prob(hf, a, c, b) - r(a, b, c, la))
           + n_b * (hit_prob(hf, b, c, a) - r(b, a, c, lb))
           + n_a * (hit_prob(hf, a, b, c) - r(a, c, b, la) * gb)
           + n_b * (hit_prob(hf, b, a, c) - r(b, c, a, lb) * ga))
    return max(val, 0.0)


def expect_gamma_inverse_lt(hf: HFunction, p: PenalizationParams, x: float,
                            c: float, u: float) -> float:
    """Exact P_x[Gamma at the inverse local time eta_u^c]: the weight
    survives the trip to c, then u units of c-local time."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    return (math.exp(-u * excursion_exponent(hf, p, c))
            * expect_gamma_at_hit(hf, p, x, c))


def limit_normalizer(hf: HFunction, clock: ClockSpec) -> float:
    """The blow-up factor that renormalizes E[Gamma] at this clock."""
    if clock.kind == "exponential":
        return hf.r0(clock.q)
    if clock.kind == "hitting":
        return hB(hf, clock.c)
    if clock.kind == "two_point":
        return hC(hf, clock.c, -clock.d)
    if clock.kind == "inverse_lt":
        return hB(hf, clock.c)
    raise ValueError(f"unknown clock kind {clock.kind!r}")


def gamma_from_cd(c: float, d: float) -> float:
    """Direction parameter (d-c)/(c+d) of a two-point clock escape."""
    if c <= 0 or d <= 0:
        raise ValueError("c and d must be positive")
    return (d - c) / (c + d)


def limit_constants_exp_clock(hf: HFunction,
                              p: PenalizationParams) -> tuple[float, float]:
    """The two q -> 0 constants of the exponential-clock analysis:
    lim r_q(0) I_q = h(a-b)/(1+lam_a hB(a-b)) and
    lim J_q = 1/(1+lam_a hB(a-b))."""
    H = hB(hf, p.a - p.b)
    den = 1.0 + p.lam_a * H
    return hf.h(p.a - p.b) / den, 1.0 / den


class SweepRow(NamedTuple):
    parameter: float
    normalizer: float
    expectation: float
    normalized: float
    target: float
    gap: float


def exact_clock_sweep(hf: HFunction, p: PenalizationParams, x: float,
                      kind: str, ladder, u: float = 1.0,
                      d_over_c: float = 1.0) -> list[SweepRow]:
    """Convergence diagnostics for the three exact clock families.

    hitting:     normalized hB(c) P_x[Gamma_{T_c}]      -> phi^{(+1)}(x)
    two_point:   normalized hC(c,-d) restricted-to-c    -> ((1+g)/2) phi^{(+1)}(x)
                 with d = d_over_c * c and g = (d-c)/(c+d)
    inverse_lt:  normalized hB(c) P_x[Gamma_{eta_u^c}]  -> phi^{(+1)}(x)

    The exponential clock has no exact finite-q expectation; its sweep
    is Monte Carlo and lives with the simulation front end.
    """
    rows = []
    for c in ladder:
        if kind == "hitting":
            norm = hB(hf, c)
            val = expect_gamma_at_hit(hf, p, x, c)
            target = phi(hf, _with_gamma(p, 1.0 if c > 0 else -1.0), x)
        elif kind == "two_point":
            d = d_over_c * c
            g = gamma_from_cd(c, d)
            norm = hC(hf, c, -d)
            val = expect_gamma_two_point(hf, p, x, c, d).restricted_c
            target = (1.0 + g) / 2.0 * phi(hf, _with_gamma(p, 1.0), x)
        elif kind == "inverse_lt":
            norm = hB(hf, c)
            val = expect_gamma_inverse_lt(hf, p, x, c, u)
            target = phi(hf, _with_gamma(p, 1.0 if c > 0 else -1.0), x)
        else:
            raise ValueError(f"no exact sweep for clock kind {kind!r}")
        normalized = norm * val
        rows.append(SweepRow(c, norm, val, normalized, target,
                             abs(normalized - target) / target))
    return rows


def _with_gamma(p: PenalizationParams, gamma: float) -> PenalizationParams:
    if not math.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return PenalizationParams(p.a, p.b, p.lam_a, p.lam_b, gamma)
