"""Solve the family T_n = 2^n T0 until successive members agree to tol_global.

Prints one line per member (T, Picard sweeps, seconds, delta, peak RSS) and
writes the run summary as JSON.

    python3 scripts/family_convergence.py configs/symmetric_default_schedule.json \
        --json out/family.json
"""

import argparse
import json
import logging
import resource
import time

from fst.cli import load_config
from fst.errors import ScheduleExhausted
from fst.solver import solve_global


class _MemberLog(logging.Handler):
    def emit(self, record):
        msg = record.getMessage()
        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
        print(f"[{time.strftime('%H:%M:%S')}] {msg}  (peak RSS {rss:.0f} MB)", flush=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--json", default=None, help="write deltas and timings here")
    ap.add_argument("--step", type=float, default=None, help="override the solver step")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.step:
        cfg.solver.step = args.step
    log = logging.getLogger("fst.solver")
    log.setLevel(logging.INFO)
    log.addHandler(_MemberLog())

    t0 = time.perf_counter()
    try:
        run = solve_global(cfg.data, cfg.solver)
    except ScheduleExhausted as e:
        run = e.run
    elapsed = time.perf_counter() - t0
    d = run.deltas
    decreasing = all(b < a for a, b in zip(d, d[1:]))
    print(f"converged={run.converged} members={len(run.family)} seconds={elapsed:.0f}")
    print(f"deltas strictly decreasing: {decreasing}; final delta {d[-1] if d else float('nan'):.4e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"T": [s.T for s in run.family], "delta": d, "converged": run.converged,
                       "seconds": [s.seconds for s in run.family], "total_seconds": elapsed,
                       "picard_iterations": [s.picard_iterations for s in run.family],
                       "step": cfg.solver.step, "tol_global": cfg.solver.tol_global}, fh, indent=1)


if __name__ == "__main__":
    main()
