"""Resolvent densities and the renormalized zero resolvent.

For a symmetric model the q-resolvent density is the cosine integral

    r_q(x) = (1/pi) int_0^inf cos(lam x) / (q + Psi(lam)) dlam,

and the renormalized zero resolvent is h(x) = lim_{q->0} (r_q(0) - r_q(-x)).
Computing that difference naively is hopeless at small q (r_q(0) diverges
like the recurrence makes it), so h_q is evaluated through the fused
integrand

    h_q(x) = (1/pi) int_0^inf (1 - cos(lam x)) / (q + Psi(lam)) dlam,

which stays positive and bounded as q -> 0.  The q -> 0 limit is taken
along a geometric grid with Aitken delta-squared acceleration; the
Brownian error decays only like sqrt(q), so the plain sequence would need
absurdly many halvings to reach 1e-6.

Oscillatory tails are handled by QUADPACK's Fourier integrator
(scipy.integrate.quad with weight='cos'); the head of the integral gets
explicit breakpoints at the cosine half-periods and around the small-q
shoulder of 1/(q+Psi).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ExtrapolationError, QuadratureError
from .models import ModelSpec, psi, second_moment

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    # the plain head integral stops where Psi >= tail_factor * q and the
    # remainder is delegated to the Fourier tail integrator
    tail_factor: float = 1e6
    limit: int = 400

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class ExtrapolationConfig:
    q0: float = 1.0
    k_max: int = 40
    stop_tol: float = 1e-8

    def __post_init__(self):
        if self.q0 <= 0 or self.stop_tol <= 0 or self.k_max < 2:
            raise ValueError("invalid extrapolation config")

    def grid(self):
        return [self.q0 * 2.0 ** (-k) for k in range(self.k_max + 1)]


def _shoulder(model: ModelSpec, q: float) -> float:
    """lam at which Psi crosses q: the integrand 1/(q+Psi) bends here,
    and all the q-dependence that drives the extrapolation lives below
    this scale."""
    lam = 1.0
    if psi(model, lam) > q:
        while psi(model, lam) > q and lam > 1e-12:
            lam *= 0.5
    else:
        while psi(model, lam) < q and lam < 1e9:
            lam *= 2.0
    return lam


def _head_cut(model: ModelSpec, q: float, x: float) -> float:
    """End of the explicitly integrated head for the fused integrand:
    a few cosine periods and comfortably past the q-shoulder."""
    return max(10.0, 6.0 * math.pi / abs(x), 4.0 * _shoulder(model, q))


def _head_points(model: ModelSpec, q: float, x: float, cut: float):
    """Breakpoints: cosine half-periods plus a dyadic ladder around the
    q-shoulder so the adaptive rule resolves the bend even when it sits
    at lam ~ 1e-6."""
    pts = set()
    step = math.pi / abs(x)
    k = 1
    while step * k < cut and k <= 16:
        pts.add(step * k)
        k += 1
    lam_q = _shoulder(model, q)
    for j in range(-2, 9):
        p = lam_q * 4.0 ** j
        if 0.0 < p < cut:
            pts.add(p)
    return sorted(pts)


def _quad(f, a, b, points=None, weight=None, wvar=None,
          epsabs=1e-10, epsrel=1e-8, limit=400, soft=False):
    kwargs = dict(epsabs=epsabs, limit=limit)
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
        kwargs["limlst"] = 200
    else:
        kwargs["epsrel"] = epsrel
        if points:
            kwargs["points"] = points
    with np.errstate(over="ignore", invalid="ignore"):
        out = integrate.quad(f, a, b, full_output=1, **kwargs)
    val, err = out[0], out[1]
    if len(out) > 3 and not soft:  # explanation string appended on trouble
        # accept if the achieved error estimate is still tolerable
        if not (err < 1e-7 * max(1.0, abs(val))):
            raise QuadratureError(
                f"quadrature did not converge: {out[3]}", err_estimate=err)
    return val, err


def _flat_tail(model: ModelSpec, q: float, cut: float,
               cfg: QuadratureConfig, epsrel: float):
    """int_cut^inf dlam / (q + Psi) via the substitution u = 1/lam.

    QAGI's rational map mishandles this integrand once cut grows past
    ~2e4 (roundoff failure, or worse, a silently wrong "divergent"
    answer with a small error estimate).  On (0, 1/cut] the transformed
    integrand is bounded (Gaussian part) or has an integrable u^(alpha-2)
    endpoint power (stable part), both of which the finite-interval
    adaptive rule resolves to machine precision.
    """
    def g(u):
        return 1.0 / ((q + psi(model, 1.0 / u)) * u * u)

    return _quad(g, 0.0, 1.0 / cut, epsabs=cfg.abs_tol, epsrel=epsrel,
                 limit=cfg.limit)


def _r0_pi(model: ModelSpec, q: float, cfg: QuadratureConfig,
           epsrel: float):
    """pi * r_q(0) = int_0^inf dlam/(q+Psi), split at the q-shoulder so
    both pieces are smooth, monotone and well-scaled even when the
    shoulder sits at lam ~ 1e-6."""
    def f(lam):
        return 1.0 / (q + psi(model, lam))

    s = _shoulder(model, q)
    cut = max(10.0, 4.0 * s)
    pts = [p for p in (s * 4.0 ** j for j in range(-2, 9)) if p < cut]
    head, e1 = _quad(f, 0.0, cut, points=pts,
                     epsabs=cfg.abs_tol, epsrel=epsrel, limit=cfg.limit)
    tail, e2 = _flat_tail(model, q, cut, cfg, epsrel)
    return head + tail, e1 + e2


def resolvent_density_with_err(model: ModelSpec, q: float, x: float,
                               cfg: QuadratureConfig | None = None):
    """r_q(x) and an error estimate.

    x = 0 is a plain decaying integral; x != 0 goes entirely to the
    QUADPACK Fourier integrator, which is built for cos-weighted
    semi-infinite integrals of smooth decaying functions.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    cfg = cfg or QuadratureConfig()
    x = abs(float(x))  # symmetric model: r_q is even

    def f(lam):
        return 1.0 / (q + psi(model, lam))

    if x == 0.0:
        val, err = _r0_pi(model, q, cfg, cfg.rel_tol)
        return val / math.pi, err / math.pi
    # the Fourier integrator controls absolute error; when the value is
    # huge (small q) asking for 1e-10 absolute is beyond float64, so
    # scale the request by a cheap magnitude estimate
    scale = f(0.0)  # = 1/q >= r_q(0)-ish magnitude ceiling
    epsabs = max(cfg.abs_tol, 1e-13 * min(scale, 1e12))
    val, err = _quad(f, 0.0, np.inf, weight="cos", wvar=x,
                     epsabs=epsabs, limit=cfg.limit)
    return val / math.pi, err / math.pi


def resolvent_density(model: ModelSpec, q: float, x: float,
                      cfg: QuadratureConfig | None = None) -> float:
    return resolvent_density_with_err(model, q, x, cfg)[0]


def _h_q_fused(model, q, x, cfg):
    def f(lam):
        return 1.0 / (q + psi(model, lam))

    cut = _head_cut(model, q, x)
    head, _ = _quad(lambda lam: (1.0 - math.cos(lam * x)) * f(lam),
                    0.0, cut, points=_head_points(model, q, x, cut),
                    epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.limit)
    t_flat, _ = _flat_tail(model, q, cut, cfg, cfg.rel_tol)
    t_osc, _ = _quad(f, cut, np.inf, weight="cos", wvar=x,
                     epsabs=max(cfg.abs_tol, 1e-14 * t_flat), limit=cfg.limit)
    return (head + t_flat - t_osc) / math.pi


def _h_q_difference(model, q, x, cfg):
    # For large |x| the difference r_q(0) - r_q(x) is well-conditioned
    # (h_q is itself of order r_q(0)); ask for a tight relative tolerance
    # so the r_q(0) magnitude does not bleed absolute error into h_q,
    # accepting QUADPACK's best effort as long as it achieved 1e-9.
    def f(lam):
        return 1.0 / (q + psi(model, lam))

    r0pi, e0 = _r0_pi(model, q, cfg, 1e-11)
    if not e0 < 1e-9 * r0pi:
        raise QuadratureError("r_q(0) quadrature too noisy for the "
                              "difference route", err_estimate=e0)
    epsabs = max(cfg.abs_tol, 1e-13 * r0pi)
    rxpi, _ = _quad(f, 0.0, np.inf, weight="cos", wvar=x,
                    epsabs=epsabs, limit=cfg.limit)
    return max(r0pi - rxpi, 0.0) / math.pi


# above this |x| the fused head would carry too many cosine periods for
# the adaptive rule; the difference route is accurate there because
# h_q(x)/r_q(0) is no longer small
_FUSED_X_MAX = 64.0


def h_q(model: ModelSpec, q: float, x: float,
        cfg: QuadratureConfig | None = None) -> float:
    """h_q(x) = r_q(0) - r_q(-x), evaluated without cancellation."""
    if q <= 0:
        raise ValueError("q must be positive")
    cfg = cfg or QuadratureConfig()
    x = abs(float(x))
    if x == 0.0:
        return 0.0
    if x <= _FUSED_X_MAX:
        return _h_q_fused(model, q, x, cfg)
    return _h_q_difference(model, q, x, cfg)


def _aitken(seq):
    """One Aitken delta-squared pass; drops two entries."""
    out = []
    for i in range(len(seq) - 2):
        s0, s1, s2 = seq[i], seq[i + 1], seq[i + 2]
        den = s2 - 2.0 * s1 + s0
        if abs(den) < 64.0 * _EPS * (abs(s0) + abs(s2) + 1e-300):
            out.append(s2)
        else:
            out.append(s0 - (s1 - s0) ** 2 / den)
    return out


def _asymptotic_suffix(seq):
    """Index where the sequence's differences start shrinking for good.

    Early h_q iterates can grow geometrically (large |x|: h_q ~ r_q(0)
    until q reaches 1/x^2 scale); Aitken applied across that transient
    happily extrapolates to nonsense, so acceleration only sees the
    suffix with contracting differences.
    """
    diffs = [abs(b - a) for a, b in zip(seq, seq[1:])]
    start = 0
    for i in range(1, len(diffs)):
        if diffs[i] > diffs[i - 1] * 1.01:
            start = i
    return start


def _accelerate(seq):
    """Iterated Aitken on the contracting suffix; returns (best limit
    estimate, convergence gap)."""
    last = seq[-1]
    gap = abs(seq[-1] - seq[-2]) if len(seq) > 1 else math.inf
    cur = list(seq[_asymptotic_suffix(seq):])
    if len(cur) < 4:
        return last, gap
    # the remaining tail of a geometric sequence with ratio <= 1/sqrt(2)
    # is at most ~3.5x the last difference; allow generous slack before
    # declaring an accelerated value implausible
    slack = 50.0 * gap + 1e3 * _EPS * abs(last)
    best = last
    for _ in range(3):
        if len(cur) < 3:
            break
        cur = _aitken(cur)
        g = abs(cur[-1] - cur[-2]) if len(cur) >= 2 else gap
        if g < gap and abs(cur[-1] - last) <= slack:
            best, gap = cur[-1], g
    return best, gap


def _extrapolate(values_fn, extrap: ExtrapolationConfig):
    """Limit of values_fn(q) along the geometric q-grid with Aitken
    acceleration; returns (limit, gap, n_evals)."""
    grid = extrap.grid()
    seq = []
    best, gap = math.nan, math.inf
    for k, qk in enumerate(grid):
        seq.append(values_fn(qk))
        if k >= 4:
            best, gap = _accelerate(seq)
            if gap < extrap.stop_tol:
                return best, gap, k + 1
    if gap < 100.0 * extrap.stop_tol:
        # tolerate a slightly ragged tail: the accelerated sequence has
        # stopped improving but is demonstrably stable
        return best, gap, len(grid)
    raise ExtrapolationError(
        f"q->0 extrapolation stalled (gap {gap:.3e})",
        last_iterates=(seq[-2], seq[-1]))


class HFunction:
    """Evaluator for r_q, h_q, h and h^gamma with a thread-safe h cache.

    h(0) = 0 exactly; h is even for every catalog model, so the cache is
    keyed on |x| rounded to 1e-12.
    """

    def __init__(self, model: ModelSpec,
                 quad: QuadratureConfig | None = None,
                 extrap: ExtrapolationConfig | None = None):
        self.model = model
        self.quad = quad or QuadratureConfig()
        self.extrap = extrap or ExtrapolationConfig()
        self.m2 = second_moment(model)
        self._cache: dict[float, float] = {}
        self._gaps: dict[float, float] = {}
        self._lock = threading.Lock()

    # -- finite q ----------------------------------------------------
    def resolvent_density(self, q: float, x: float) -> float:
        return resolvent_density(self.model, q, x, self.quad)

    def r0(self, q: float) -> float:
        return resolvent_density(self.model, q, 0.0, self.quad)

    def h_q(self, q: float, x: float) -> float:
        return h_q(self.model, q, x, self.quad)

    def hB_q(self, q: float, a: float) -> float:
        hq = self.h_q(q, a)  # even model: h_q(a) = h_q(-a)
        return 2.0 * hq - hq * hq / self.r0(q)

    def hitting_laplace(self, q: float, x: float) -> float:
        return self.resolvent_density(q, x) / self.r0(q)

    def hitting_laplace_two_point(self, q: float, x: float,
                                  a: float, b: float) -> float:
        """P_x[e^{-q T_a}; T_a < T_b] at finite q."""
        if a == b:
            raise ValueError("a and b must be distinct")
        hq = lambda y: self.h_q(q, y)
        num = (hq(b - a) + hq(x - b) - hq(x - a)
               - hq(x - b) * hq(b - a) / self.r0(q))
        return num / self.hB_q(q, a - b)

    # -- q -> 0 limit -------------------------------------------------
    def h(self, x: float) -> float:
        x = abs(float(x))
        if x == 0.0:
            return 0.0
        key = round(x, 12)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        if x > 1e6 and math.isfinite(self.m2):
            # slope asymptote; quadrature accuracy degrades with the
            # oscillation frequency long before x gets here
            val, gap = x / self.m2, math.inf
        else:
            val, gap, _ = _extrapolate(lambda q: self.h_q(q, x), self.extrap)
        with self._lock:
            self._cache[key] = val
            self._gaps[key] = gap
        return val

    def h_err_estimate(self, x: float) -> float:
        """Extrapolation gap recorded for the last evaluation at x."""
        self.h(x)
        return self._gaps.get(round(abs(float(x)), 12), 0.0)

    def h_gamma(self, gamma: float, x: float) -> float:
        if abs(gamma) > 1.0:
            raise ValueError("gamma must lie in [-1, 1]")
        base = self.h(x)
        if not math.isfinite(self.m2):
            return base
        return base + gamma * float(x) / self.m2

    def hB(self, a: float) -> float:
        """h(a) + h(-a): even models make this 2 h(a)."""
        return 2.0 * self.h(a)

    def hB_limit_of_hq(self, a: float) -> float:
        """q -> 0 limit of hB_q(a), extrapolated independently of h."""
        val, _, _ = _extrapolate(lambda q: self.hB_q(q, a), self.extrap)
        return val


def h(model: ModelSpec, x: float,
      quad: QuadratureConfig | None = None,
      extrap: ExtrapolationConfig | None = None) -> float:
    """One-shot renormalized zero resolvent; prefer HFunction for bulk."""
    return HFunction(model, quad, extrap).h(x)


def h_gamma(model: ModelSpec, gamma: float, x: float,
            quad: QuadratureConfig | None = None,
            extrap: ExtrapolationConfig | None = None) -> float:
    return HFunction(model, quad, extrap).h_gamma(gamma, x)


def hitting_laplace(model: ModelSpec, q: float, x: float,
                    cfg: QuadratureConfig | None = None) -> float:
    """P_x[e^{-q T_0}] = r_q(-x) / r_q(0)."""
    cfg = cfg or QuadratureConfig()
    return (resolvent_density(model, q, x, cfg)
            / resolvent_density(model, q, 0.0, cfg))


def hB_q(model: ModelSpec, q: float, a: float,
         cfg: QuadratureConfig | None = None) -> float:
    return HFunction(model, cfg).hB_q(q, a)


def hitting_laplace_two_point(model: ModelSpec, q: float, x: float,
                              a: float, b: float,
                              cfg: QuadratureConfig | None = None) -> float:
    return HFunction(model, cfg).hitting_laplace_two_point(q, x, a, b)
