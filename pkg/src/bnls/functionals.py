"""Conserved and variational quantities: mass, energy, constraint, ratios.

Sign convention: the conserved energy of the focusing flow is
kinetic MINUS the potential term over q (resp. p).  The minus sign is
the one consistent with the action, the Pohozaev chain and what the time
integrator actually conserves; see the README notes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonFinite, SpecMismatch, ZeroField
from .problem import DerivedExponents, Family, ProblemSpec, derive_exponents
from .radial import (
    Field,
    RadialPlan,
    Space,
    apply_multiplier,
    hankel_forward,
    hankel_inverse,
    radial_integral,
    spectral_integral,
)

__all__ = [
    "FunctionalReport",
    "ThresholdPair",
    "mass",
    "kinetic",
    "grad_norm_sq",
    "potential",
    "riesz_convolve",
    "energy",
    "constraint_K",
    "gn_ratio",
    "me_mg",
    "lr_norm",
    "boundary_mass",
    "functional_report",
]


def mass(plan: RadialPlan, u: Field) -> float:
    """M[u] = int |u|^2 dx."""
    _require_position(u)
    return radial_integral(plan, np.abs(u.values) ** 2)


def kinetic(plan: RadialPlan, u: Field) -> float:
    """|Delta u|_2^2 via the rho^4 multiplier."""
    F = hankel_forward(plan, u) if u.space is Space.POSITION else u
    return spectral_integral(plan, plan.rho ** 4 * np.abs(F.values) ** 2)


def grad_norm_sq(plan: RadialPlan, u: Field) -> float:
    """|grad u|_2^2 (diagnostic only)."""
    F = hankel_forward(plan, u) if u.space is Space.POSITION else u
    return spectral_integral(plan, plan.rho ** 2 * np.abs(F.values) ** 2)


def riesz_convolve(plan: RadialPlan, g: np.ndarray, alpha: float,
                   far_field: bool = True) -> np.ndarray:
    """I_alpha * g for real radial samples g, via the rho^{-alpha} multiplier.

    The multiplier acts in the Fourier-Bessel basis, i.e. with an implicit
    Dirichlet wall at r_max, while the true convolution carries a slow
    r^{alpha-N} far field.  With far_field=True the constant harmonic lift
    c_alpha * (int g dx) * r_max^{alpha-N} is added back; for alpha = 2
    (inverse Laplacian) this is exact up to the tail of g beyond r_max,
    and for other alpha it is the leading multipole of the missing tail.
    The corrected operator is still symmetric, since the correction is
    rank one with equal left and right factors.
    """
    G = hankel_forward(plan, plan.position_field(g))
    out = hankel_inverse(plan, apply_multiplier(plan, G, plan.rho ** (-alpha)))
    out = out.values.real
    if far_field:
        N = plan.dim
        c = math.gamma((N - alpha) / 2) / \
            (2 ** alpha * math.pi ** (N / 2) * math.gamma(alpha / 2))
        out = out + c * radial_integral(plan, g) * plan.r_max ** (alpha - N)
    return out


def potential(spec: ProblemSpec, plan: RadialPlan, u: Field) -> float:
    """The potential integral P[u] of the active family (nonnegative)."""
    _require_position(u)
    r = plan.nodes
    absu = np.abs(u.values)
    if spec.family is Family.LOCAL:
        if spec.q is None:
            raise SpecMismatch("local family needs q")
        dens = r ** (2 * spec.b) * absu ** (2 * spec.q)
        return radial_integral(plan, dens)
    if spec.p is None or spec.alpha is None:
        raise SpecMismatch("Choquard family needs p and alpha")
    g = r ** spec.b * absu ** spec.p
    conv = riesz_convolve(plan, g, spec.alpha)
    val = radial_integral(plan, conv * g)
    if not math.isfinite(val):
        raise NonFinite("Choquard potential is not finite")
    return val


def energy(spec: ProblemSpec, plan: RadialPlan, u: Field,
           pot: Optional[float] = None) -> float:
    """E[u] = |Delta u|^2 - P[u]/q (local) or - P[u]/p (Choquard)."""
    if pot is None:
        pot = potential(spec, plan, u)
    expo = spec.nonlinearity_exponent()
    return kinetic(plan, u) - pot / expo


def constraint_K(spec: ProblemSpec, plan: RadialPlan, u: Field,
                 pot: Optional[float] = None) -> float:
    """K[u] = |Delta u|^2 - (D/2q) P[u] (B/2p for Choquard); zero at Q."""
    if pot is None:
        pot = potential(spec, plan, u)
    d = derive_exponents(spec)
    expo = spec.nonlinearity_exponent()
    return kinetic(plan, u) - d.D / (2 * expo) * pot


def gn_ratio(spec: ProblemSpec, plan: RadialPlan, u: Field) -> float:
    """P[u] / (|u|^E |Delta u|^D); bounded by the sharp constant."""
    m = mass(plan, u)
    if m == 0.0:
        raise ZeroField("gn_ratio undefined at u = 0")
    d = derive_exponents(spec)
    kin = kinetic(plan, u)
    pot = potential(spec, plan, u)
    return pot / (m ** (d.E / 2) * kin ** (d.D / 2))


@dataclass(frozen=True)
class ThresholdPair:
    """Scale-invariant dichotomy quantities relative to the ground state.

    When the energy is negative the ME power is not real; the pair is
    then tagged below_threshold_negative_energy and me is None.
    """

    me: Optional[float]
    mg: float
    negative_energy: bool


def me_mg(spec: ProblemSpec, plan: RadialPlan, u: Field, gs) -> ThresholdPair:
    """ME and MG of u normalized by the converged ground state gs.

    The normalizing integrals are re-evaluated from gs.profile with the
    same plan quadrature as u, so the ratios are consistent at the
    discrete level (u = Q gives exactly (1, 1) up to round-off).
    """
    d = derive_exponents(spec)
    s = d.s_c
    m_u = mass(plan, u)
    k_u = kinetic(plan, u)
    e_u = energy(spec, plan, u)
    m_q = mass(plan, gs.profile)
    k_q = kinetic(plan, gs.profile)
    e_q = energy(spec, plan, gs.profile)
    mg = (math.sqrt(k_u) ** s * math.sqrt(m_u) ** (2 - s)) / \
         (math.sqrt(k_q) ** s * math.sqrt(m_q) ** (2 - s))
    if e_u < 0:
        return ThresholdPair(me=None, mg=mg, negative_energy=True)
    me = (e_u ** s * m_u ** (2 - s)) / (e_q ** s * m_q ** (2 - s))
    return ThresholdPair(me=me, mg=mg, negative_energy=False)


def lr_norm(plan: RadialPlan, u: Field, r_exp: float) -> float:
    """Grid L^r norm (quadrature power mean)."""
    _require_position(u)
    if math.isinf(r_exp):
        return float(np.max(np.abs(u.values)))
    return radial_integral(plan, np.abs(u.values) ** r_exp) ** (1.0 / r_exp)


def boundary_mass(plan: RadialPlan, u: Field, frac: float = 0.9) -> float:
    """Mass sitting beyond frac * r_max (domain-truncation diagnostic)."""
    _require_position(u)
    sel = plan.nodes > frac * plan.r_max
    return float(np.dot(plan.weights[sel], np.abs(u.values[sel]) ** 2))


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    energy: float
    kinetic: float
    potential: float
    action: float
    constraint: float
    gn_ratio: float
    me: Optional[float]
    mg: Optional[float]
    boundary_mass: float
    negative_energy: bool = False


def functional_report(spec: ProblemSpec, plan: RadialPlan, u: Field,
                      gs=None) -> FunctionalReport:
    """One-stop evaluation of every scalar functional of u."""
    d = derive_exponents(spec)
    expo = spec.nonlinearity_exponent()
    m = mass(plan, u)
    kin = kinetic(plan, u)
    pot = potential(spec, plan, u)
    e = kin - pot / expo
    K = kin - d.D / (2 * expo) * pot
    ratio = pot / (m ** (d.E / 2) * kin ** (d.D / 2)) if m > 0 else math.nan
    me_val = mg_val = None
    neg = False
    if gs is not None:
        pair = me_mg(spec, plan, u, gs)
        me_val, mg_val, neg = pair.me, pair.mg, pair.negative_energy
    return FunctionalReport(mass=m, energy=e, kinetic=kin, potential=pot,
                            action=m + e, constraint=K, gn_ratio=ratio,
                            me=me_val, mg=mg_val, boundary_mass=boundary_mass(plan, u),
                            negative_energy=neg)


def _require_position(u: Field) -> None:
    if u.space is not Space.POSITION:
        raise SpecMismatch("functional expects a position-space field")
