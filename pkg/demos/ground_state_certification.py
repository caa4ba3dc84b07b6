"""Solve and certify the ground states of both families at the flagship
parameters, then print the certification identities.

Runtime: ~30 s.  Run from the repository root:

    python3 demos/ground_state_certification.py
"""

from bnls.ground_state import certify, solve_ground_state
from bnls.problem import Family, ProblemSpec, derive_exponents, theorem_window
from bnls.radial import build_plan


def main():
    plan = build_plan(5, 512, 30.0)
    for spec in (ProblemSpec(Family.LOCAL, 5, -0.5, q=2.5),
                 ProblemSpec(Family.CHOQUARD, 5, -0.5, p=2.5, alpha=2.0)):
        d = derive_exponents(spec)
        print(f"== {spec.family.value} family ==")
        win = theorem_window(spec)
        print(f"   scaling index s_c = {d.s_c:.6g}, "
              f"exponent window ({win.lower:.6g}, {win.upper:.6g})")
        gs = solve_ground_state(spec, plan)
        print(f"   Petviashvili residual   {gs.residual:.3e}")
        print(f"   mass {gs.mass:.6f}   kinetic {gs.kinetic:.6f}   "
              f"energy {gs.energy:.6f}")
        rep = certify(spec, plan, gs)
        print(f"   |K(Q)|/kinetic          {rep.constraint_over_kinetic:.3e}")
        print(f"   Pohozaev defects        {rep.pohozaev_defect_1:.3e}  "
              f"{rep.pohozaev_defect_2:.3e}")
        print(f"   sharp-constant defect   {rep.sharp_constant_defect:.3e}")
        print(f"   norm-ratio defect       {rep.norm_ratio_defect:.3e}")
        print()


if __name__ == "__main__":
    main()
