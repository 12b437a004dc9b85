"""Catalog of symmetric recurrent Levy processes.

A model is identified by its characteristic exponent Psi, defined through
E_0[exp(i lam X_t)] = exp(-t Psi(lam)).  Only symmetric centered processes
are admitted, so Psi is real, even and nonnegative and the process is
recurrent.  Admissibility further requires that 1/(q + Psi(lam)) is
integrable over the line for every q > 0, which gives bounded continuous
resolvent densities and makes every point regular for itself; for the
stable family this forces alpha > 1.

Catalog:
  bm        Psi(lam) = sigma^2 lam^2 / 2
  stable    Psi(lam) = |lam|^alpha, alpha in (1, 2]   (unit scale)
  bm_jumps  Psi(lam) = sigma^2 lam^2 / 2
                       + rate * (1 - exp(-jump_std^2 lam^2 / 2))
            (Brownian part plus compound-Poisson Gaussian jumps)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KIND_BM = "bm"
KIND_STABLE = "stable"
KIND_BM_JUMPS = "bm_jumps"
_KINDS = (KIND_BM, KIND_STABLE, KIND_BM_JUMPS)


@dataclass(frozen=True)
class ModelSpec:
    """An admissible process family member.

    Construction validates admissibility and raises ValueError for
    anything asymmetric, drifted, or failing the resolvent integrability
    requirement (e.g. stable alpha <= 1).
    """

    kind: str
    sigma: float = 1.0
    alpha: float = 1.5
    jump_rate: float = 0.0
    jump_std: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == KIND_BM:
            if not self.sigma > 0:
                raise ValueError("bm requires sigma > 0")
        elif self.kind == KIND_STABLE:
            if not 1.0 < self.alpha <= 2.0:
                raise ValueError(
                    "stable requires alpha in (1, 2]: alpha <= 1 breaks "
                    "integrability of 1/(q+Psi) and point regularity"
                )
        else:
            if not self.sigma > 0:
                raise ValueError("bm_jumps requires sigma > 0")
            if self.jump_rate < 0:
                raise ValueError("bm_jumps requires jump_rate >= 0")
            if not self.jump_std > 0:
                raise ValueError("bm_jumps requires jump_std > 0")

    @staticmethod
    def brownian(sigma: float = 1.0) -> "ModelSpec":
        return ModelSpec(kind=KIND_BM, sigma=sigma)

    @staticmethod
    def stable(alpha: float) -> "ModelSpec":
        return ModelSpec(kind=KIND_STABLE, alpha=alpha)

    @staticmethod
    def brownian_with_jumps(sigma: float, jump_rate: float,
                            jump_std: float) -> "ModelSpec":
        return ModelSpec(kind=KIND_BM_JUMPS, sigma=sigma,
                         jump_rate=jump_rate, jump_std=jump_std)


def psi(model: ModelSpec, lam):
    """Characteristic exponent Psi(lam).  Accepts scalars or arrays."""
    lam = np.asarray(lam, dtype=float) if not np.isscalar(lam) else lam
    if model.kind == KIND_BM:
        return 0.5 * model.sigma ** 2 * lam * lam
    if model.kind == KIND_STABLE:
        return np.abs(lam) ** model.alpha
    gauss = 0.5 * model.sigma ** 2 * lam * lam
    jumps = model.jump_rate * (-np.expm1(-0.5 * model.jump_std ** 2 * lam * lam))
    return gauss + jumps


def second_moment(model: ModelSpec) -> float:
    """E[X_1^2]; +inf when the Levy measure has infinite second moment.

    bm: sigma^2; bm_jumps: sigma^2 + rate*jump_std^2 (compound-Poisson
    variance accumulates at rate*E[J^2] per unit time); stable alpha < 2:
    +inf; alpha = 2 is Brownian motion with sigma^2 = 2.
    """
    if model.kind == KIND_BM:
        return model.sigma ** 2
    if model.kind == KIND_BM_JUMPS:
        return model.sigma ** 2 + model.jump_rate * model.jump_std ** 2
    if model.alpha == 2.0:
        return 2.0
    return math.inf


@dataclass(frozen=True)
class ConditionAReport:
    """Result of the resolvent-integrability check.

    tail_exponent is the numerically estimated decay power p of
    1/(q+Psi(lam)) ~ lam^{-p}; the integral converges iff p > 1.
    """

    passes: bool
    tail_exponent: float
    q: float
    note: str = ""


def condition_a_from_psi(psi_fn, q: float,
                         probe: float = 1e6) -> ConditionAReport:
    """Check integrability of 1/(q+Psi) given a raw exponent callable.

    The tail exponent is measured by a log-log finite difference of
    q+Psi at large lam; useful for diagnosing hypothetical exponents
    that the catalog refuses to construct.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    lo, hi = probe, probe * 8.0
    p = (math.log(q + psi_fn(hi)) - math.log(q + psi_fn(lo))) / math.log(hi / lo)
    return ConditionAReport(passes=p > 1.0, tail_exponent=p, q=q,
                            note="" if p > 1.0 else
                            "tail of 1/(q+Psi) decays too slowly to integrate")


def check_condition_A(model: ModelSpec, q: float) -> ConditionAReport:
    """Admissibility report for a catalog model at a given q > 0."""
    return condition_a_from_psi(lambda lam: float(psi(model, lam)), q)
