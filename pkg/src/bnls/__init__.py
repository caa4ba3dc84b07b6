"""Radial spectral solver and variational toolkit for the focusing
inhomogeneous biharmonic NLS (|x|^{2b} power nonlinearity) and its
Choquard/Hartree variant.

Layout:
    problem      exponent algebra: critical indices, windows, thresholds
    radial       Bessel-zero grid, discrete Hankel transform, multipliers
    functionals  mass / energy / constraint / GN ratio / ME-MG thresholds
    ground_state Petviashvili iteration and certification
    evolution    Strang splitting, free propagator, virial identity
    diagnostics  cutoffs, Morawetz quantity, evacuation, space-time fits
    io / cli     TOML configs, CSV series, binary snapshots, manifests
"""

from .errors import (
    BnlsError,
    CertificationFailure,
    InvalidSpec,
    NoConvergence,
    NonFinite,
)
from .problem import (
    Family,
    ProblemSpec,
    derive_exponents,
    theorem_window,
    threshold_root,
    validate_spec,
)
from .radial import Field, RadialPlan, build_plan, hankel_forward, hankel_inverse
from .functionals import (
    constraint_K,
    energy,
    functional_report,
    gn_ratio,
    kinetic,
    mass,
    me_mg,
    potential,
    riesz_convolve,
)
from .ground_state import GroundStateResult, certify, solve_ground_state

__version__ = "0.1.0"

__all__ = [
    "BnlsError", "CertificationFailure", "InvalidSpec", "NoConvergence",
    "NonFinite",
    "Family", "ProblemSpec", "derive_exponents", "theorem_window",
    "threshold_root", "validate_spec",
    "Field", "RadialPlan", "build_plan", "hankel_forward", "hankel_inverse",
    "constraint_K", "energy", "functional_report", "gn_ratio", "kinetic",
    "mass", "me_mg", "potential", "riesz_convolve",
    "GroundStateResult", "certify", "solve_ground_state",
    "__version__",
]
