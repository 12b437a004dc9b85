"""Closed-form hitting and local-time laws built from h.

Every operation here is a pure rational expression in values of the
renormalized zero resolvent h (and, for the finite-q laws, h_q and
r_q(0)).  The building blocks:

  hB(a)           expected local time at 0 before hitting a
  hit_prob        two-point first-hitting probability
  hC(a, b)        expected local time at 0 before hitting {a, b}
  hit_prob3       three-point first-hitting probability
  lt_laplace      E_start[exp(-lam L^site) at T_target]
  ...restricted   same but on the event that target beats a third point

All probabilities are clamped to [0, 1] when they stray by at most
CLAMP_TOL (quadrature fuzz); larger violations raise, because they mean
the h layer is broken.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateConfigurationError, NumericsError
from .resolvent import HFunction

CLAMP_TOL = 1e-9
# points closer than this are considered coincident and rejected
MIN_SEPARATION = 1e-9


def _require_distinct(*pts):
    vals = list(pts)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) < MIN_SEPARATION:
                raise DegenerateConfigurationError(
                    f"points {vals[i]} and {vals[j]} are not distinct")


def _clamp_prob(p: float, what: str) -> float:
    if p < -CLAMP_TOL or p > 1.0 + CLAMP_TOL:
        raise NumericsError(f"{what} = {p} is outside [0,1] by more than "
                            f"{CLAMP_TOL}; upstream quadrature is suspect")
    return min(max(p, 0.0), 1.0)


def hB(hf: HFunction, a: float) -> float:
    """h(a) + h(-a): mean local time at 0 accumulated before T_a."""
    if a == 0.0:
        raise ValueError("a must be nonzero")
    return hf.h(a) + hf.h(-a)


def hit_prob(hf: HFunction, x: float, a: float, b: float) -> float:
    """P_x(T_a < T_b)."""
    _require_distinct(a, b)
    h = hf.h
    raw = (h(b - a) + h(x - b) - h(x - a)) / hB(hf, a - b)
    return _clamp_prob(raw, "hit_prob")


def hC(hf: HFunction, a: float, b: float) -> float:
    """Mean local time at 0 accumulated before hitting a or b."""
    _require_distinct(a, b)
    h = hf.h
    num = ((h(b) + h(-a)) * h(a - b) + (h(a) + h(-b)) * h(b - a)
           + (h(a) - h(b)) * (h(-b) - h(-a)) - h(a - b) * h(b - a))
    return num / hB(hf, a - b)


def hit_prob3(hf: HFunction, x: float, a: float, b: float,
              c: float) -> float:
    """P_x(T_a < T_b ^ T_c)."""
    _require_distinct(a, b, c)
    den = 1.0 - hit_prob(hf, a, c, b) * hit_prob(hf, c, a, b)
    if abs(den) < 1e-14:
        raise DegenerateConfigurationError(
            "three-point configuration is numerically degenerate")
    num = hit_prob(hf, x, a, b) - hit_prob(hf, x, c, b) * hit_prob(hf, c, a, b)
    return _clamp_prob(num / den, "hit_prob3")


def exp_clock_law(hf: HFunction, q: float, x: float, lam: float) -> float:
    """P_x[exp(-lam L^0) at an independent Exp(q) time]."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    r0 = hf.r0(q)
    hq = hf.h_q(q, x)
    return (hq + (1.0 - hq / r0) / (lam + 1.0 / r0)) / r0


@dataclass(frozen=True)
class LocalTimeLaw:
    """Law of a stopped local time: an atom at 0 plus an exponential
    component; Laplace transform atom + (1-atom)/(1 + lam*exp_mean)."""

    atom_at_zero: float
    exp_mean: float

    def laplace(self, lam: float) -> float:
        return self.atom_at_zero + (1.0 - self.atom_at_zero) / (
            1.0 + lam * self.exp_mean)


def local_time_at_hit_law(hf: HFunction, x: float, zero_pt: float,
                          a: float) -> LocalTimeLaw:
    """Law of L^{zero_pt} at T_a started from x."""
    _require_distinct(zero_pt, a)
    if abs(x - a) < MIN_SEPARATION:
        atom = 1.0
    elif abs(x - zero_pt) < MIN_SEPARATION:
        atom = 0.0
    else:
        atom = hit_prob(hf, x, a, zero_pt)  # reach a before zero_pt
    return LocalTimeLaw(atom_at_zero=atom, exp_mean=hB(hf, a - zero_pt))


def lt_laplace(hf: HFunction, start: float, site: float, target: float,
               lam: float) -> float:
    """P_start[exp(-lam L^site) at T_target].

    Unrestricted version: the path runs until it hits target, discounting
    by the local time it spends at site.  start = site is allowed.
    """
    _require_distinct(site, target)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    h = hf.h
    num = 1.0 + lam * (h(site - target) + h(start - site) - h(start - target))
    return _clamp_prob(num / (1.0 + lam * hB(hf, target - site)),
                       "lt_laplace")


def lt_laplace_restricted(hf: HFunction, a: float, b: float, c: float,
                          lam_a: float) -> float:
    """P_a[exp(-lam_a L^a) at T_c; T_c < T_b].

    At lam_a = 0 the expression is 0/0; it collapses to the plain
    hitting probability, which is substituted exactly.
    """
    _require_distinct(a, b, c)
    if lam_a == 0.0:
        return hit_prob(hf, a, c, b)
    num = (lt_laplace(hf, a, a, c, lam_a)
           - lt_laplace(hf, a, a, b, lam_a) * lt_laplace(hf, b, a, c, lam_a))
    den = 1.0 - (lt_laplace(hf, c, a, b, lam_a)
                 * lt_laplace(hf, b, a, c, lam_a))
    if abs(den) < 1e-14:
        raise DegenerateConfigurationError("restricted Laplace denominator "
                                           "underflow")
    return _clamp_prob(num / den, "lt_laplace_restricted")


def gamma_via_one_site(hf: HFunction, x: float, a: float, b: float,
                       c: float, lam_a: float) -> float:
    """P_x[exp(-lam_a L^a) at T_c; a is hit first, then c before b]."""
    _require_distinct(a, b, c)
    if abs(x - b) < MIN_SEPARATION:
        return 0.0
    return hit_prob3(hf, x, a, b, c) * lt_laplace_restricted(hf, a, b, c,
                                                             lam_a)


def gamma_at_hit_from_b(hf: HFunction, a: float, b: float, c: float,
                        lam_a: float, lam_b: float) -> float:
    """P_b[Gamma at T_c] where Gamma discounts local time at a and b.

    Solves the two-site renewal system: from b the path either reaches c
    straight (avoiding a), or visits a first and the roles swap.
    """
    _require_distinct(a, b, c)
    r_b_direct = lt_laplace_restricted(hf, b, a, c, lam_b)
    r_b_to_a = lt_laplace_restricted(hf, b, c, a, lam_b)
    r_a_direct = lt_laplace_restricted(hf, a, b, c, lam_a)
    r_a_to_b = lt_laplace_restricted(hf, a, c, b, lam_a)
    den = 1.0 - r_b_to_a * r_a_to_b
    if abs(den) < 1e-14:
        raise DegenerateConfigurationError("two-site renewal denominator "
                                           "underflow")
    return _clamp_prob((r_b_direct + r_b_to_a * r_a_direct) / den,
                       "gamma_at_hit_from_b")


def gamma_via_both_sites(hf: HFunction, x: float, a: float, b: float,
                         c: float, lam_a: float, lam_b: float) -> float:
    """P_x[Gamma at T_c; a is hit first, then b before c].

    After the ordered visits x -> a -> b the remaining journey to c may
    keep revisiting both sites; that remainder is the two-site renewal
    value from b.
    """
    _require_distinct(a, b, c)
    return (hit_prob3(hf, x, a, b, c)
            * lt_laplace_restricted(hf, a, c, b, lam_a)
            * gamma_at_hit_from_b(hf, a, b, c, lam_a, lam_b))


def excursion_rate(hf: HFunction, a: float) -> float:
    """Excursion-measure rate n^0(T_a < T_0) = 1/hB(a)."""
    return 1.0 / hB(hf, a)


def excursion_rate3(hf: HFunction, c: float, a: float, b: float) -> float:
    """n^c(T_a < T_b ^ T_c) = P_c(T_a < T_b) / hC(a-c, b-c).

    Derived by splitting the first excursion from c that reaches {a, b}:
    the number of excursions before one reaches {a, b} is governed by
    the local-time budget hC, and the successful excursion lands on a
    rather than b with the two-point hitting probability.  Not a quoted
    formula; validated against excursion-counting Monte Carlo.
    """
    _require_distinct(a, b, c)
    return hit_prob(hf, c, a, b) / hC(hf, a - c, b - c)
