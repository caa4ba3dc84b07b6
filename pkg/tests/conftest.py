"""Shared fixtures: flagship problem specs, the desk-scale plan, and the
converged ground states (session-scoped: the solves are the expensive part).
"""

import numpy as np
import pytest

from bnls.ground_state import solve_ground_state
from bnls.problem import Family, ProblemSpec
from bnls.radial import build_plan, hankel_inverse


@pytest.fixture(scope="session")
def spec_local():
    return ProblemSpec(family=Family.LOCAL, dim=5, b=-0.5, q=2.5)


@pytest.fixture(scope="session")
def spec_choquard():
    return ProblemSpec(family=Family.CHOQUARD, dim=5, b=-0.5, p=2.5, alpha=2.0)


@pytest.fixture(scope="session")
def plan512():
    return build_plan(5, 512, 30.0)


@pytest.fixture(scope="session")
def gs_local(spec_local, plan512):
    return solve_ground_state(spec_local, plan512)


@pytest.fixture(scope="session")
def gs_choquard(spec_choquard, plan512):
    return solve_ground_state(spec_choquard, plan512)


def gaussian(plan, amplitude=1.0, width=1.0):
    """The standard test field A * exp(-(r/w)^2) as a position Field."""
    return plan.position_field(amplitude * np.exp(-(plan.nodes / width) ** 2))


def random_band_limited(plan, rng, n_modes=24, amplitude=1.0):
    """Seeded random smooth radial field built from low spectral modes."""
    coef = rng.standard_normal(n_modes) * np.exp(-np.arange(n_modes) / 6.0)
    F = np.zeros(plan.size, dtype=complex)
    F[:n_modes] = coef
    vals = hankel_inverse(plan, plan.spectral_field(F)).values.real
    peak = float(np.max(np.abs(vals)))
    return plan.position_field(amplitude * vals / peak)


# Hand-checked Strichartz admissibility table for N=5 (qt, r, s, expected).
# The scaling relation is N(1/2 - 1/r) = 4/qt + s with 2N/(N-2s) <= r < 10.
ADMISSIBLE_PAIRS = [
    (np.inf, 2.0, 0.0, True),     # 5(1/2-1/2) = 0 = 0
    (4.0, 10.0 / 3.0, 0.0, True),  # 5(1/2-3/10) = 1 = 4/4
    (8.0, 2.5, 0.0, True),        # 5(1/2-2/5) = 1/2 = 4/8
    (16.0, 20.0 / 9.0, 0.0, True),  # 5(1/2-9/20) = 1/4 = 4/16
    (np.inf, 2.5, 0.5, True),     # 5(1/2-2/5) = 1/2 = 0 + 1/2; r = 10/4 lower bound
    (8.0, 10.0 / 3.0, 0.5, True),  # 5(1/2-3/10) = 1 = 4/8 + 1/2
    (2.0, 10.0, 0.0, False),      # r = 10 violates the strict bound r < 2N/(N-4)
    (1.5, 4.0, 0.0, False),       # qt < 2
    (4.0, 1.9, 0.0, False),       # r < 2
    (4.0, 10.0 / 3.0, 0.5, False),  # relation off by 1/2
    (np.inf, 2.0, 0.5, False),    # r = 2 below the lower bound 10/4
    (4.0, 3.3, 0.0, False),       # relation 0.98485 != 1
]
