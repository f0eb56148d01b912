"""Step-halving study for one conditional solution.

For each step h prints the largest unit-window residual of the field
equations (both particles), a(0), and the ratios between successive steps.

    python3 scripts/refinement_study.py --T -200 --steps 0.5 0.25 0.125 0.0625
"""

import argparse

import numpy as np

from fst.asymptotics import AsymptoticData
from fst.dynamics import residual_profile
from fst.solver import SolverConfig, solve_conditional


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=-200.0)
    ap.add_argument("--steps", type=float, nargs="+", default=[0.5, 0.25, 0.125, 0.0625, 0.03125])
    ap.add_argument("--data", type=float, nargs=6, default=[1.0, -1.0, -0.4, 0.4, 1.0, 1.0],
                    metavar=("X", "Y", "U", "V", "KA", "KB"))
    args = ap.parse_args()

    data = AsymptoticData(*args.data)
    prev = None
    print(f"{'h':>9} {'residual':>10} {'ratio':>6} {'a(0)':>20} {'sweeps':>6}")
    for h in args.steps:
        sol = solve_conditional(data, args.T, SolverConfig(step=h, tol_fix=1e-12, max_picard=100))
        res = max(np.max(np.abs(residual_profile(sol.pair, p, start, sol.t_end, 1.0, h)[1]))
                  for p, start in (("a", sol.T), ("b", sol.T_plus)))
        ratio = f"{prev / res:6.1f}" if prev else " " * 6
        print(f"{h:9.5f} {res:10.3e} {ratio} {sol.pair.a.eval(0.0)[0]:20.15f} {sol.picard_iterations:6d}")
        prev = res


if __name__ == "__main__":
    main()
