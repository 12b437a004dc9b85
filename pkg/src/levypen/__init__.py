"""Two-point local-time penalization calculus for recurrent Levy processes.

The package computes resolvent densities by quadrature, the renormalized
zero resolvent h by extrapolation in the killing rate, the two-point
hitting / local-time calculus built from h, the penalization weight phi,
and Monte Carlo verification of the clock limits.
"""
from .errors import (
    DegenerateConfigurationError,
    ExtrapolationError,
    LevypenError,
    NumericsError,
    QuadratureError,
)
from .models import (
    KIND_BM,
    KIND_BM_JUMPS,
    KIND_STABLE,
    ConditionAReport,
    ModelSpec,
    check_condition_A,
    condition_a_from_psi,
    psi,
    second_moment,
)
from .resolvent import (
    ExtrapolationConfig,
    HFunction,
    QuadratureConfig,
    h,
    h_gamma,
    hB_q,
    h_q,
    hitting_laplace,
    hitting_laplace_two_point,
    resolvent_density,
)
from .hitting import (
    LocalTimeLaw,
    exp_clock_law,
    excursion_rate,
    excursion_rate3,
    gamma_at_hit_from_b,
    gamma_via_both_sites,
    gamma_via_one_site,
    hB,
    hC,
    hit_prob,
    hit_prob3,
    local_time_at_hit_law,
    lt_laplace,
    lt_laplace_restricted,
)
from .montecarlo import (
    Estimate,
    McSweepRow,
    PathState,
    SimConfig,
    bias_budget,
    clock_time_laplace,
    estimate_weighted,
    exp_clock_sweep_mc,
    hit_prob_empirical,
    local_time_at_hit_sample,
    local_time_sample,
    realize_clock,
    step,
    two_point_estimates,
    verify_martingale,
)
from .penalization import (
    ClockSpec,
    PenalizationParams,
    SweepRow,
    TwoPointExpectation,
    WeightState,
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

__version__ = "0.1.0"

__all__ = [
    "ClockSpec",
    "ConditionAReport",
    "DegenerateConfigurationError",
    "Estimate",
    "ExtrapolationConfig",
    "ExtrapolationError",
    "HFunction",
    "KIND_BM",
    "KIND_BM_JUMPS",
    "KIND_STABLE",
    "LevypenError",
    "LocalTimeLaw",
    "McSweepRow",
    "ModelSpec",
    "NumericsError",
    "PathState",
    "PenalizationParams",
    "QuadratureConfig",
    "QuadratureError",
    "SimConfig",
    "SweepRow",
    "TwoPointExpectation",
    "WeightState",
    "bias_budget",
    "check_condition_A",
    "condition_a_from_psi",
    "clock_time_laplace",
    "estimate_weighted",
    "exact_clock_sweep",
    "exp_clock_sweep_mc",
    "excursion_exponent",
    "excursion_rate",
    "excursion_rate3",
    "exp_clock_law",
    "expect_gamma_at_hit",
    "expect_gamma_inverse_lt",
    "expect_gamma_two_point",
    "gamma_at_hit_from_b",
    "gamma_from_cd",
    "gamma_via_both_sites",
    "gamma_via_one_site",
    "h",
    "hB",
    "hB_q",
    "h_q",
    "hC",
    "h_gamma",
    "hit_prob",
    "hit_prob3",
    "hit_prob_empirical",
    "hitting_laplace",
    "hitting_laplace_two_point",
    "limit_constants_exp_clock",
    "limit_normalizer",
    "local_time_at_hit_law",
    "local_time_at_hit_sample",
    "local_time_sample",
    "lt_laplace",
    "lt_laplace_restricted",
    "martingale_value",
    "phi",
    "psi",
    "realize_clock",
    "reduce_one_point",
    "resolvent_density",
    "second_moment",
    "step",
    "two_point_estimates",
    "verify_martingale",
]
