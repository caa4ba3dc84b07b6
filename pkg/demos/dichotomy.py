"""Below/above-threshold dichotomy at the flagship local parameters.

A small multiple of the ground state (0.1 Q) disperses: the mass inside
the ball of radius 5 drains away.  A large multiple (1.5 Q) has negative
energy and trips the blow-up guard almost immediately.

Runtime: ~4 min (dominated by the T = 25 dispersive run).  Run from the
repository root:

    python3 demos/dichotomy.py
"""

from bnls.evolution import RunConfig, evolve
from bnls.functionals import me_mg
from bnls.ground_state import solve_ground_state
from bnls.problem import Family, ProblemSpec
from bnls.radial import build_plan


def main():
    spec = ProblemSpec(Family.LOCAL, 5, -0.5, q=2.5)
    plan = build_plan(5, 1024, 60.0)
    gs = solve_ground_state(spec, plan)

    u0 = plan.position_field(0.1 * gs.profile.values)
    pair = me_mg(spec, plan, u0, gs)
    print(f"u0 = 0.1 Q:  ME = {pair.me:.4g}, MG = {pair.mg:.4g} "
          "(below threshold)")
    cfg = RunConfig(dt=1e-3, t_end=25.0, diagnostics_every=500,
                    cutoff_R=(5.0,))
    result = evolve(spec, plan, u0, cfg)
    first, last = result.series[0], result.series[-1]
    print(f"   outcome {result.outcome.value}, "
          f"mass defect {abs(last.mass - first.mass) / first.mass:.2e}")
    print(f"   local mass in B(5): {first.local_mass[5.0]:.4e} -> "
          f"{last.local_mass[5.0]:.4e} "
          f"({last.local_mass[5.0] / first.local_mass[5.0]:.1%} left)")

    v0 = plan.position_field(1.5 * gs.profile.values)
    pair = me_mg(spec, plan, v0, gs)
    print(f"u0 = 1.5 Q:  MG = {pair.mg:.4g}, negative energy: "
          f"{pair.negative_energy}")
    blow = evolve(spec, plan, v0, RunConfig(dt=1e-3, t_end=10.0))
    print(f"   outcome {blow.outcome.value} (trigger: {blow.trigger} "
          f"at t = {blow.trigger_time:g})")


if __name__ == "__main__":
    main()
