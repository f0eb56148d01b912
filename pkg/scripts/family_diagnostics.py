"""Solve a family from a config and run every estimate check on it.

    python3 scripts/family_diagnostics.py configs/asymmetric.json --report out/report.json
"""

import argparse

from fst.cli import load_config, plot_decay
from fst.diagnostics import run_all
from fst.errors import ScheduleExhausted
from fst.solver import solve_global


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--report", default=None, help="write the JSON report here")
    ap.add_argument("--svg", default=None, help="write the decay plot here")
    args = ap.parse_args()

    cfg = load_config(args.config)
    try:
        run = solve_global(cfg.data, cfg.solver)
    except ScheduleExhausted as e:
        # the checks only need the members, converged or not
        run = e.run
    print("T     :", [round(s.T, 3) for s in run.family])
    print("delta :", [f"{d:.3e}" for d in run.deltas])
    rep = run_all(run, cfg.data, cfg.diagnostics)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:14s} margin {c.worst_margin:+.3e}")
    print({k: round(v, 5) for k, v in rep.constants.items() if isinstance(v, float)})
    if args.report:
        rep.write(args.report)
    if args.svg:
        plot_decay(rep, args.svg)


if __name__ == "__main__":
    main()
