"""Shared fixtures: reusable h-functions and a synthetic-h stub.

HFunction instances cache extrapolated h values, so sharing them across
a session keeps the exact-layer tests fast.  The SyntheticH stub feeds
the calculus identities arbitrary admissible h shapes (even, vanishing
at zero, subadditive, linear growth) without any quadrature, which is
what the property-based tests want.
"""

import math

import pytest

from levypen import HFunction, ModelSpec, PenalizationParams


class SyntheticH:
    """Duck-typed stand-in for HFunction with a closed-form h.

    h(x) = slope*|x| + curve*(1 - exp(-|x|)) is even, zero at zero,
    concave-increasing in |x|, hence subadditive -- the properties the
    calculus layer actually relies on.  m2 = 1/slope matches the linear
    growth rate h(x)/|x| -> 1/m2.
    """

    def __init__(self, slope=1.0, curve=0.0):
        self.slope = slope
        self.curve = curve
        self.m2 = math.inf if slope == 0.0 else 1.0 / slope

    def h(self, x):
        ax = abs(float(x))
        return self.slope * ax + self.curve * (1.0 - math.exp(-ax))

    def h_gamma(self, gamma, x):
        if abs(gamma) > 1.0:
            raise ValueError("gamma must lie in [-1, 1]")
        if not math.isfinite(self.m2):
            return self.h(x)
        return self.h(x) + gamma * float(x) / self.m2

    def hB(self, a):
        return 2.0 * self.h(a)


@pytest.fixture(scope="session")
def hf_bm():
    return HFunction(ModelSpec.brownian())


@pytest.fixture(scope="session")
def hf_stable():
    return HFunction(ModelSpec.stable(1.5))


@pytest.fixture(scope="session")
def pen_unit():
    """The workhorse configuration: sites 0 and 1, unit rates, no tilt."""
    return PenalizationParams(a=0.0, b=1.0, lam_a=1.0, lam_b=1.0, gamma=0.0)
