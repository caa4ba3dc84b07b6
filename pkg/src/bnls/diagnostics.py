"""Proof quantities as measurements: cutoffs, localized virial,
coercivity, evacuation scans and the T^{1/3} space-time bound fit.

The cutoff pair (psi_R, f_R) follows the usual truncation scheme:
psi_R is 1 on the half ball and 0 outside the ball; the Morawetz weight
f_R equals r^2/2 on the half ball (so the localized virial matches the
global one there) and its radial derivative ramps smoothly to 0 at R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    MissingDiagnostic,
    NonFinite,
    NotApplicable,
    RangeError,
    RunTooShort,
)
from .functionals import grad_norm_sq, kinetic, lr_norm, mass, me_mg, potential
from .problem import Family, ProblemSpec, derive_exponents
from .radial import (
    Field,
    RadialPlan,
    hankel_forward,
    radial_derivative,
    radial_integral,
)

__all__ = [
    "CutoffProfile",
    "CoercivityReport",
    "SpacetimeFit",
    "build_cutoffs",
    "local_mass",
    "morawetz_M",
    "strauss_tail",
    "coercivity_check",
    "evacuation_scan",
    "spacetime_bound_fit",
]


def _smoothstep5(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep: 0 -> 1 on [0,1] with two vanishing derivatives."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)


def _smoothstep3(t: np.ndarray) -> np.ndarray:
    """Cubic smoothstep: 0 -> 1 on [0,1] with vanishing end derivatives."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 2 * (3.0 - 2.0 * t)


@dataclass
class CutoffProfile:
    """psi_R and the Morawetz weight f_R sampled on the plan nodes.

    psi: 1 for r <= R/2, 0 for r >= R, quintic-smoothstep blend between.
    f_R = R^2 f(r/R) with f(s) = s^2/2 for s <= 1/2 and f constant
    beyond s = 1; the derivative ramps down by the cubic smoothstep, so
    f_R' = r on the half ball, f_R' <= r everywhere, f_R' = 0 for
    r >= R, and f_R'' <= 1 everywhere.  (The textbook normalization
    "f = 1 outside" is unreachable under f' <= r; the constant value is
    f(1) = 1/4 and only f' enters any measured quantity.)
    """

    R: float
    psi: np.ndarray
    fR: np.ndarray
    fR_prime: np.ndarray


def build_cutoffs(plan: RadialPlan, R: float) -> CutoffProfile:
    """Sample the cutoff pair for radius R on the plan nodes."""
    if not 0 < R < plan.r_max:
        raise RangeError(f"need 0 < R < r_max={plan.r_max}, got R={R}")
    s = plan.nodes / R
    t = 2.0 * s - 1.0                       # ramp coordinate on [1/2, 1]
    psi = np.where(s <= 0.5, 1.0, np.where(s >= 1.0, 0.0,
                                           1.0 - _smoothstep5(t)))
    # scaled derivative g(s) = f'(s): s on [0,1/2], ramp to 0 at 1
    g = np.where(s <= 0.5, s, np.where(s >= 1.0, 0.0,
                                       0.5 * (1.0 - _smoothstep3(t))))
    # f(s): s^2/2 inner; on the ramp integrate g: f(1/2) + s/2 - 1/2 int S3
    # with int_0^T S3 = T^3 - T^4/2 evaluated at T = 2s-1 (half from ds = dt/2)
    tt = np.clip(t, 0.0, 1.0)
    ramp_int = 0.125 + 0.5 * (s - 0.5) - 0.25 * (tt ** 3 - 0.5 * tt ** 4)
    f = np.where(s <= 0.5, 0.5 * s ** 2, np.where(s >= 1.0, 0.25, ramp_int))
    return CutoffProfile(R=R, psi=psi, fR=R ** 2 * f, fR_prime=R * g)


def local_mass(plan: RadialPlan, u: Field, prof: CutoffProfile) -> float:
    """int psi_R |u|^2 dx; complements int (1-psi_R)|u|^2 to the mass."""
    return radial_integral(plan, prof.psi * np.abs(u.values) ** 2)


def morawetz_M(plan: RadialPlan, u: Field, prof: CutoffProfile) -> float:
    """Localized virial 2 int f_R'(r) Im(u_r ubar) dx."""
    du = radial_derivative(plan, u).values
    val = 2.0 * radial_integral(plan,
                                prof.fR_prime * np.imag(du * np.conj(u.values)))
    if not math.isfinite(val):
        raise NonFinite("morawetz_M is not finite")
    bound = 2.0 * float(np.max(prof.fR_prime)) * \
        math.sqrt(grad_norm_sq(plan, u) * mass(plan, u))
    if abs(val) > 1.05 * bound + 1e-12:
        raise NonFinite(
            f"morawetz_M {val:.3e} violates the Cauchy-Schwarz bound {bound:.3e}")
    return val


def strauss_tail(plan: RadialPlan, u: Field, R: float) -> float:
    """sup over r > R/2 of r^{(N-1)/2} |u| (radial Strauss-type monitor)."""
    sel = plan.nodes > 0.5 * R
    if not np.any(sel):
        raise RangeError(f"no nodes beyond R/2 = {0.5 * R}")
    return float(np.max(plan.nodes[sel] ** ((plan.dim - 1) / 2)
                        * np.abs(u.values[sel])))


@dataclass
class CoercivityReport:
    lhs: float                 # localized constraint K(psi_R u)
    rhs_base: float            # the quantity delta' multiplies
    delta_prime: float         # measured lhs / rhs_base
    holds: bool
    commutator_R: float        # |Delta(psi_R u)|^2 - |psi_R Delta u|^2 at R
    commutator_2R: Optional[float]
    commutator_ratio: Optional[float]  # expected ~4 from the R^{-2} scaling


def _commutator(plan: RadialPlan, u: Field, prof: CutoffProfile) -> float:
    cut = plan.position_field(prof.psi * u.values)
    F = hankel_forward(plan, u)
    lap = plan.spectral_field(-plan.rho ** 2 * F.values)
    from .radial import hankel_inverse
    lap_u = hankel_inverse(plan, lap).values
    term2 = radial_integral(plan, np.abs(prof.psi * lap_u) ** 2)
    return kinetic(plan, cut) - term2


def coercivity_check(spec: ProblemSpec, plan: RadialPlan, u: Field,
                     R: float, gs) -> CoercivityReport:
    """Localized coercivity of the constraint below threshold.

    lhs = |Delta(psi_R u)|^2 - (D/2q) P[psi_R u]; it should dominate a
    positive multiple of the potential-type base.  delta' is measured,
    not derived.  Raises NotApplicable when ME or MG is not < 1.
    """
    pair = me_mg(spec, plan, u, gs)
    if not pair.negative_energy:
        if pair.me is None or pair.me >= 1 or pair.mg >= 1:
            raise NotApplicable(
                f"coercivity needs ME, MG < 1 (got ME={pair.me}, MG={pair.mg})")
    elif pair.mg >= 1:
        raise NotApplicable(f"coercivity needs MG < 1 (got MG={pair.mg})")
    prof = build_cutoffs(plan, R)
    cut = plan.position_field(prof.psi * u.values)
    d = derive_exponents(spec)
    expo = spec.nonlinearity_exponent()
    pot = potential(spec, plan, cut)
    lhs = kinetic(plan, cut) - d.D / (2 * expo) * pot
    if spec.family is Family.LOCAL:
        rhs_base = pot
    else:
        N, a, b2 = plan.dim, spec.alpha, 2 * spec.b
        rhs_base = lr_norm(plan, cut, 2 * N * spec.p / (N + a + b2)) ** 2
    delta_prime = lhs / rhs_base if rhs_base > 0 else math.inf
    comm_R = _commutator(plan, u, prof)
    comm_2R = ratio = None
    if 2 * R < plan.r_max:
        comm_2R = _commutator(plan, u, build_cutoffs(plan, 2 * R))
        if comm_2R != 0:
            ratio = comm_R / comm_2R
    return CoercivityReport(lhs=lhs, rhs_base=rhs_base,
                            delta_prime=delta_prime, holds=lhs > 0,
                            commutator_R=comm_R, commutator_2R=comm_2R,
                            commutator_ratio=ratio)


def evacuation_scan(series, R: float, eps: float):
    """Times where the recorded local mass at radius R dips below eps.

    Returns (times, running_min) with running_min the cumulative minimum
    curve of local_mass(R) over the series.
    """
    if not series:
        raise MissingDiagnostic("empty series")
    try:
        vals = [rec.local_mass[R] for rec in series]
    except KeyError:
        raise MissingDiagnostic(
            f"local_mass at R={R} was not recorded (cutoff_R)") from None
    times = [rec.t for rec, v in zip(series, vals) if v < eps]
    running_min = list(np.minimum.accumulate(vals))
    return times, running_min


@dataclass
class SpacetimeFit:
    exponent: float
    r2: float


def spacetime_bound_fit(series) -> SpacetimeFit:
    """Growth exponent of the cumulative potential integral.

    Fits log(int_0^T P dt) vs log T by least squares over the second
    half of the run; sublinear exponents (<= ~1/3 for the continuum
    flow) witness the space-time bound.  Raises RunTooShort for runs
    with T < 20, too few samples, or a vanishing integrand.
    """
    if len(series) < 8:
        raise RunTooShort(f"need >= 8 records, got {len(series)}")
    t = np.array([rec.t for rec in series])
    p = np.array([rec.potential for rec in series])
    if t[-1] < 20:
        raise RunTooShort(f"need T >= 20, got T={t[-1]:g}")
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(t))))
    sel = t >= 0.5 * t[-1]
    if np.count_nonzero(sel) < 4 or np.any(cum[sel] <= 0):
        raise RunTooShort("cumulative potential integral not fittable")
    x = np.log(t[sel])
    y = np.log(cum[sel])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SpacetimeFit(exponent=float(slope), r2=r2)
