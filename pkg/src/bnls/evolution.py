"""Time integration by Strang splitting with exact substeps.

Both substeps are exact flows: the linear part is diagonal in the
spectral frame (multiplier e^{i t rho^4}), and the nonlinear part is a
pointwise gauge rotation u -> u e^{-i dt V} with V real and a function
of |u| only, so freezing V during the rotation is exact.  There is no
CFL constraint from Delta^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import NonFinite
from .functionals import (
    boundary_mass,
    constraint_K,
    kinetic,
    lr_norm,
    mass,
    potential,
    riesz_convolve,
)
from .problem import Family, ProblemSpec, derive_exponents
from .radial import (
    Field,
    RadialPlan,
    Space,
    apply_multiplier,
    hankel_forward,
    hankel_inverse,
    radial_derivative,
    radial_integral,
)

__all__ = [
    "Outcome",
    "RunConfig",
    "TimeSeriesRecord",
    "EvolveResult",
    "linear_propagate",
    "nonlinear_potential",
    "step_strang",
    "evolve",
    "virial_global",
    "virial_rhs_global",
]


class Outcome(Enum):
    COMPLETED = "Completed"
    BLOWUP_SUSPECTED = "BlowupSuspected"
    NON_FINITE = "NonFinite"


@dataclass(frozen=True)
class RunConfig:
    """Everything a single evolution run needs besides (spec, plan, u0)."""

    dt: float
    t_end: float
    snapshot_every: int = 0          # 0 disables intermediate snapshots
    diagnostics_every: int = 10
    blowup_kinetic_factor: float = 1e4
    sup_norm_ceiling: float = 1e6
    morawetz_R: tuple = ()
    cutoff_R: tuple = ()
    lr_exponents: tuple = ()
    linear_only: bool = False        # zero-nonlinearity switch (free flow)

    def __post_init__(self):
        if not (0 < self.dt <= 0.5):
            raise ValueError(f"need 0 < dt <= 0.5, got {self.dt}")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if self.blowup_kinetic_factor <= 0 or self.sup_norm_ceiling <= 0:
            raise ValueError("blow-up guards must be positive")
        if self.diagnostics_every < 1:
            raise ValueError("diagnostics_every must be >= 1")


@dataclass
class TimeSeriesRecord:
    t: float
    mass: float
    energy: float
    kinetic: float
    potential: float
    constraint: float
    virial: float                    # M with the global weight a = r^2/2
    sup_norm: float
    boundary_mass: float
    morawetz: dict                   # R -> M_R (localized weight f_R)
    local_mass: dict                 # R -> int psi_R |u|^2 dx
    lr_norms: dict                   # r-exponent -> grid L^r norm


@dataclass
class EvolveResult:
    series: list
    snapshots: list                  # (t, Field) pairs
    outcome: Outcome
    trigger: Optional[str] = None    # what tripped a non-Completed outcome
    trigger_time: Optional[float] = None


# phase multipliers e^{i (dt/2) rho^4} keyed by the owning plan; the plan
# reference is kept in the value so a recycled id cannot alias a new plan
_phase_cache: dict = {}


def _half_kick_phase(plan: RadialPlan, dt: float) -> np.ndarray:
    key = (id(plan), float(dt))
    hit = _phase_cache.get(key)
    if hit is not None and hit[0] is plan:
        return hit[1]
    phase = np.exp(0.5j * dt * plan.rho ** 4)
    _phase_cache[key] = (plan, phase)
    return phase


def linear_propagate(plan: RadialPlan, u: Field, t: float) -> Field:
    """Exact free flow e^{it Delta^2} u (mass- and kinetic-preserving)."""
    F = hankel_forward(plan, u)
    F = apply_multiplier(plan, F, np.exp(1j * t * plan.rho ** 4))
    return hankel_inverse(plan, F)


def nonlinear_potential(spec: ProblemSpec, plan: RadialPlan,
                        values: np.ndarray) -> np.ndarray:
    """The real rotation rate V(u): |x|^{2b}|u|^{2(q-1)} for the local
    family, (I_alpha * |x|^b|u|^p) |x|^b |u|^{p-2} for Choquard."""
    r = plan.nodes
    a = np.abs(values)
    if spec.family is Family.LOCAL:
        return r ** (2 * spec.b) * a ** (2 * (spec.q - 1))
    g = r ** spec.b * a ** spec.p
    return riesz_convolve(plan, g, spec.alpha) * r ** spec.b * a ** (spec.p - 2)


def step_strang(spec: ProblemSpec, plan: RadialPlan, u: Field,
                dt: float, *, linear_only: bool = False) -> Field:
    """One Strang step L(dt/2) N(dt) L(dt/2).

    The rotation sign e^{-i dt V} is the one for which the scheme
    conserves the minus-convention energy to O(dt^2): the equation is
    i du/dt = -Delta^2 u + V u, so the gauge substep is u e^{-i dt V}.
    """
    if u.space is not Space.POSITION:
        raise NonFinite("step_strang expects a position-space field")
    phase = _half_kick_phase(plan, dt)
    F = hankel_forward(plan, u)
    v = hankel_inverse(plan, apply_multiplier(plan, F, phase)).values
    if not linear_only:
        V = nonlinear_potential(spec, plan, v)
        v = v * np.exp(-1j * dt * V)
    F = hankel_forward(plan, plan.position_field(v))
    return hankel_inverse(plan, apply_multiplier(plan, F, phase))


def virial_global(plan: RadialPlan, u: Field) -> float:
    """M(t) for the unbounded weight a = r^2/2: 2 int r Im(u_r ubar) dx."""
    du = radial_derivative(plan, u).values
    integrand = plan.nodes * np.imag(du * np.conj(u.values))
    return 2.0 * radial_integral(plan, integrand)


def virial_rhs_global(spec: ProblemSpec, plan: RadialPlan, u: Field) -> float:
    """dM/dt for a = r^2/2 reduces to -8 K[u] (all tail terms vanish)."""
    return -8.0 * constraint_K(spec, plan, u)


def _record(spec, plan, u, t, cfg, profiles) -> TimeSeriesRecord:
    from .diagnostics import local_mass as _local_mass, morawetz_M

    pot = 0.0 if cfg.linear_only else potential(spec, plan, u)
    expo = spec.nonlinearity_exponent()
    kin = kinetic(plan, u)
    d = derive_exponents(spec)
    return TimeSeriesRecord(
        t=t,
        mass=mass(plan, u),
        energy=kin - pot / expo,
        kinetic=kin,
        potential=pot,
        constraint=kin - d.D / (2 * expo) * pot,
        virial=virial_global(plan, u),
        sup_norm=float(np.max(np.abs(u.values))),
        boundary_mass=boundary_mass(plan, u),
        morawetz={R: morawetz_M(plan, u, profiles[R]) for R in cfg.morawetz_R},
        local_mass={R: _local_mass(plan, u, profiles[R]) for R in cfg.cutoff_R},
        lr_norms={r: lr_norm(plan, u, r) for r in cfg.lr_exponents},
    )


def evolve(spec: ProblemSpec, plan: RadialPlan, u0: Field,
           cfg: RunConfig) -> EvolveResult:
    """March u0 to t_end, recording diagnostics and guarding blow-up.

    Outcomes classify, they do not raise: BlowupSuspected when the
    kinetic energy exceeds blowup_kinetic_factor x its initial value or
    the sup norm passes the ceiling; NonFinite on NaN/Inf.  The series
    collected so far is always returned.
    """
    from .diagnostics import build_cutoffs

    profiles = {R: build_cutoffs(plan, R)
                for R in set(cfg.morawetz_R) | set(cfg.cutoff_R)}
    n_steps = int(round(cfg.t_end / cfg.dt))
    u = u0.copy()
    kin0 = kinetic(plan, u)
    series = [_record(spec, plan, u, 0.0, cfg, profiles)]
    snapshots = [(0.0, u.copy())]
    outcome = Outcome.COMPLETED
    trigger = None
    trigger_time = None
    for n in range(1, n_steps + 1):
        t = n * cfg.dt
        try:
            u = step_strang(spec, plan, u, cfg.dt,
                            linear_only=cfg.linear_only)
        except (NonFinite, FloatingPointError):
            outcome, trigger, trigger_time = Outcome.NON_FINITE, "step", t
            break
        if not np.all(np.isfinite(u.values)):
            outcome, trigger, trigger_time = Outcome.NON_FINITE, "field", t
            break
        sup = float(np.max(np.abs(u.values)))
        kin = kinetic(plan, u)
        if kin > cfg.blowup_kinetic_factor * kin0 or sup > cfg.sup_norm_ceiling:
            outcome = Outcome.BLOWUP_SUSPECTED
            trigger = (f"kinetic {kin:.3e} > {cfg.blowup_kinetic_factor:g} x "
                       f"kinetic(0)" if kin > cfg.blowup_kinetic_factor * kin0
                       else f"sup norm {sup:.3e}")
            trigger_time = t
            series.append(_record(spec, plan, u, t, cfg, profiles))
            snapshots.append((t, u.copy()))
            break
        if n % cfg.diagnostics_every == 0 or n == n_steps:
            series.append(_record(spec, plan, u, t, cfg, profiles))
        if cfg.snapshot_every and (n % cfg.snapshot_every == 0 or n == n_steps):
            snapshots.append((t, u.copy()))
    if snapshots[-1][0] != series[-1].t and outcome is Outcome.COMPLETED:
        snapshots.append((series[-1].t, u.copy()))
    return EvolveResult(series=series, snapshots=snapshots, outcome=outcome,
                        trigger=trigger, trigger_time=trigger_time)
