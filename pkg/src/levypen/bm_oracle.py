"""Closed-form Brownian ground truth (sigma = 1 unless stated).

Derivations, for the audit trail:

  r_q(x): the cosine integral (1/pi) int cos(lam x)/(q + lam^2/2) dlam
          is a standard residue evaluation, e^{-sqrt(2q)|x|}/sqrt(2q).
          General sigma rescales space: Psi = sigma^2 lam^2/2 matches a
          unit-sigma process run on x/sigma^2-scaled coordinates, giving
          r_q(x) = e^{-sqrt(2q)|x|/sigma}/(sigma sqrt(2q)).

  h(x):   lim_{q->0} (1 - e^{-sqrt(2q)|x|/sigma})/(sigma sqrt(2q))
          = |x|/sigma^2.

  hB(a):  h(a) + h(-a) = 2|a|/sigma^2.

  hC(a,b) for a > 0 > b: mean local time at 0 before exiting (b, a).
          Optional stopping on |B| - L gives E L_T = E|B_T|
          = a P(hit b) ... = 2 a|b|/(a + |b|) for sigma = 1; tested
          against the general five-term expression.

  hit_prob: gambler's ruin, P_x(T_a < T_b) = (b - x)/(b - a) for
          a < x < b, clamped for x outside the interval.
"""
from __future__ import annotations

import math


def oracle_rq(q: float, x: float, sigma: float = 1.0) -> float:
    if q <= 0:
        raise ValueError("q must be positive")
    s = math.sqrt(2.0 * q)
    return math.exp(-s * abs(x) / sigma) / (sigma * s)


def oracle_h(x: float, sigma: float = 1.0) -> float:
    return abs(x) / sigma ** 2


def oracle_hB(a: float, sigma: float = 1.0) -> float:
    return 2.0 * abs(a) / sigma ** 2


def oracle_hC(a: float, b: float, sigma: float = 1.0) -> float:
    """Mean local time at 0 before hitting a or b; 0 must lie strictly
    between them for a nonzero answer."""
    lo, hi = min(a, b), max(a, b)
    if lo >= 0.0 or hi <= 0.0:
        return 0.0
    return 2.0 * hi * (-lo) / (hi - lo) / sigma ** 2


def oracle_hit_prob(x: float, a: float, b: float) -> float:
    """P_x(T_a < T_b) by gambler's ruin (sigma-free)."""
    if a == b:
        raise ValueError("a and b must be distinct")
    lo, hi = min(a, b), max(a, b)
    if x <= lo:
        return 1.0 if a == lo else 0.0
    if x >= hi:
        return 1.0 if a == hi else 0.0
    p_hi = (x - lo) / (hi - lo)
    return p_hi if a == hi else 1.0 - p_hi
