"""Command-line front end.

    fst solve --config PATH [--out DIR]
    fst check --traj PATH --config PATH [--out DIR]
    fst cone  --traj PATH --t VALUE --sign adv|ret --vertex a|b [--config PATH]

Exit codes: 0 success, 1 usage or configuration error, 2 no convergence (or
failing checks for ``check``), 3 numerical failure inside the solver.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .asymptotics import AsymptoticData, tail_coefficients
from .diagnostics import DiagnosticsConfig, DiagnosticsReport, check_pair
from .errors import ConfigError, DegenerateVelocities, FSTError, ScheduleExhausted
from .lightcone import ConeQuery, solve_cone
from .solver import GlobalRun, SolverConfig, solve_global
from .trajectory import Trajectory, TrajectoryPair, closed_form, pair_from_csv, read_csv, write_csv

log = logging.getLogger("fst")

EXIT_OK, EXIT_CONFIG, EXIT_NOCONV, EXIT_NUMERIC = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")
PLOTS = ("trajectories", "gaps", "decay")
DATA_KEYS = ("x_minus_inf", "y_minus_inf", "u_minus_inf", "v_minus_inf", "kappa_a", "kappa_b")


@dataclass
class OutputConfig:
    directory: str = "out"
    formats: list = field(default_factory=lambda: list(FORMATS))
    plots: list = field(default_factory=lambda: list(PLOTS))


@dataclass
class RunConfig:
    data: AsymptoticData
    solver: SolverConfig
    diagnostics: DiagnosticsConfig
    output: OutputConfig


def _line_of(text: str, key: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return i
    return None


def _where(path, text, key):
    ln = _line_of(text, key)
    return f"{path}:{ln}" if ln else str(path)


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration; ConfigError names file and line."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e.strerror})") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: invalid JSON ({e.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(raw) - {"data", "solver", "diagnostics", "output"}
    if unknown:
        k = sorted(unknown)[0]
        raise ConfigError(f"{_where(path, text, k)}: unknown block {k!r}")
    if "data" not in raw:
        raise ConfigError(f"{path}: missing 'data' block")

    blocks = {"data": raw["data"], "solver": raw.get("solver", {}),
              "diagnostics": raw.get("diagnostics", {}), "output": raw.get("output", {})}
    for name, blk in blocks.items():
        if not isinstance(blk, dict):
            raise ConfigError(f"{_where(path, text, name)}: '{name}' must be an object")

    d = blocks["data"]
    for k in d:
        if k not in DATA_KEYS:
            raise ConfigError(f"{_where(path, text, k)}: unknown data key {k!r}")
    for k in DATA_KEYS:
        if k not in d:
            raise ConfigError(f"{_where(path, text, 'data')}: data block misses {k!r}")
        if not isinstance(d[k], (int, float)) or isinstance(d[k], bool) or not math.isfinite(d[k]):
            raise ConfigError(f"{_where(path, text, k)}: {k} must be a finite number")
    try:
        data = AsymptoticData(*(float(d[k]) for k in DATA_KEYS))
    except DegenerateVelocities as e:
        raise ConfigError(f"{_where(path, text, 'u_minus_inf')}: scattering requires "
                          f"-1 < u_minus_inf < v_minus_inf < 1 ({e})") from None
    except ValueError as e:
        raise ConfigError(f"{_where(path, text, 'kappa_a')}: {e}") from None

    def sub(block, cls):
        try:
            return cls.from_dict(blocks[block])
        except (ConfigError, TypeError, ValueError) as e:
            bad = next((k for k in blocks[block] if k in str(e)), block)
            raise ConfigError(f"{_where(path, text, bad)}: {block}: {e}") from None

    solver = sub("solver", SolverConfig)
    diagnostics = sub("diagnostics", DiagnosticsConfig)
    out = blocks["output"]
    for k in out:
        if k not in OutputConfig.__dataclass_fields__:
            raise ConfigError(f"{_where(path, text, k)}: unknown output key {k!r}")
    output = OutputConfig(**out)
    for f in output.formats:
        if f not in FORMATS:
            raise ConfigError(f"{_where(path, text, 'formats')}: format {f!r} not in {FORMATS}")
    for p in output.plots:
        if p not in PLOTS:
            raise ConfigError(f"{_where(path, text, 'plots')}: plot {p!r} not in {PLOTS}")
    return RunConfig(data, solver, diagnostics, output)


def _threads(n: int) -> int:
    cap = os.environ.get("FST_THREADS")
    if cap:
        try:
            return max(1, min(n, int(cap)))
        except ValueError:
            raise ConfigError(f"FST_THREADS must be an integer, got {cap!r}") from None
    return n


# --- plots --------------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_trajectories(pair: TrajectoryPair, data: AsymptoticData, t_end: float, path):
    plt = _pyplot()
    t = pair.a.times
    t = t[t <= t_end + 1e-9]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(pair.a.eval(t)[0], t, label="a")
    ax.plot(pair.b.eval(t)[0], t, label="b")
    ta = t[t < -1]
    if ta.size:
        ax.plot(closed_form(tail_coefficients(data, "a"), ta)[0], ta, "--", lw=0.8, label="x")
        ax.plot(closed_form(tail_coefficients(data, "b"), ta)[0], ta, "--", lw=0.8, label="y")
    ax.set_xlabel("position")
    ax.set_ylabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_gaps(run: GlobalRun, data: AsymptoticData, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    xa, yb = tail_coefficients(data, "a"), tail_coefficients(data, "b")
    for sol in run.family:
        t = -np.geomspace(-sol.T, 2.0, 200)
        ax.loglog(-t, np.abs(sol.pair.a.eval(t)[0] - closed_form(xa, t)[0]) + 1e-300,
                  label=f"|a-x|, T={sol.T:.4g}")
    t = -np.geomspace(-run.family[-1].T, 2.0, 200)
    ax.loglog(-t, np.abs(run.final_pair.b.eval(t)[0] - closed_form(yb, t)[0]) + 1e-300, "k:",
              label="|b-y|, last T")
    ax.set_xlabel("|t|")
    ax.set_ylabel("distance to asymptote")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_decay(report: DiagnosticsReport, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    tab = report.samples.get("aterms")
    if tab:
        for n in ("A1", "A2", "A3", "A4", "A5"):
            t = np.concatenate([np.asarray(x) for x in tab["t"]])
            v = np.concatenate([np.asarray(x) for x in tab[n]])
            ax.loglog(-t, v + 1e-300, ".", ms=2, label=n)
    orte = report.samples.get("orte")
    if orte:
        t = np.concatenate([np.asarray(x) for x in orte["t_a"]])
        v = np.concatenate([np.asarray(x) for x in orte["a_minus_x"]])
        ax.loglog(-t, v + 1e-300, ".", ms=2, label="|a-x|")
    ax.set_xlabel("|t|")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# --- commands -----------------------------------------------------------------

def _convergence_json(run: GlobalRun) -> dict:
    return {"schema_version": 1, "converged": run.converged,
            "T": [s.T for s in run.family], "delta": run.deltas,
            "picard_iterations": [s.picard_iterations for s in run.family],
            "final_update_norm": [s.final_update_norm for s in run.family],
            "margin": run.family[0].margin if run.family else None,
            "closeness": run.closeness}


def cmd_solve(config_path, out_dir=None) -> int:
    cfg = load_config(config_path)
    cfg.solver.threads = _threads(cfg.solver.threads)
    out = Path(out_dir or cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    code = EXIT_OK
    try:
        run = solve_global(cfg.data, cfg.solver, workers=_threads(os.cpu_count() or 1))
    except ScheduleExhausted as e:
        log.error("%s", e)
        run, code = e.run, EXIT_NOCONV
    if run is None or not run.family:
        return code
    pair = run.final_pair
    if "csv" in cfg.output.formats:
        write_csv(pair, out / "trajectory.csv")
    if "json" in cfg.output.formats:
        with open(out / "convergence.json", "w") as fh:
            json.dump(_convergence_json(run), fh, indent=1)
    if "svg" in cfg.output.formats:
        if "trajectories" in cfg.output.plots:
            plot_trajectories(pair, cfg.data, cfg.solver.t_end, out / "trajectories.svg")
        if "gaps" in cfg.output.plots:
            plot_gaps(run, cfg.data, out / "gaps.svg")
    print(f"T = {[round(s.T, 6) for s in run.family]}")
    print(f"delta = {run.deltas}  converged = {run.converged}")
    return code


def cmd_check(traj_path, config_path, out_dir=None) -> int:
    cfg = load_config(config_path)
    pair = pair_from_csv(traj_path, cfg.data, step=None)
    report = check_pair(pair, cfg.data, cfg.solver.t_end, cfg.diagnostics)
    out = Path(out_dir or cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    report.write(out / "report.json")
    if "svg" in cfg.output.formats and "decay" in cfg.output.plots:
        plot_decay(report, out / "decay.svg")
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:14s} margin {c.worst_margin:+.3e}")
    return EXIT_OK if report.all_passed else EXIT_NOCONV


def _pair_without_config(path) -> TrajectoryPair:
    # without asymptotic data the motion before the first row is taken as uniform
    t, a, ad, b, bd = read_csv(path)
    h = (t[-1] - t[0]) / (len(t) - 1)
    ta = Trajectory(t[0], h, a, ad, (a[0] - ad[0] * t[0], ad[0], 0.0))
    tb = Trajectory(t[0], h, b, bd, (b[0] - bd[0] * t[0], bd[0], 0.0))
    return TrajectoryPair(ta, tb)


def cmd_cone(traj_path, t: float, sign: str, vertex: str, config_path=None) -> int:
    if config_path:
        cfg = load_config(config_path)
        pair = pair_from_csv(traj_path, cfg.data)
    else:
        pair = _pair_without_config(traj_path)
    res = solve_cone(pair, ConeQuery(vertex, sign, float(t)))
    print(json.dumps({"vertex": vertex, "sign": sign, "t": float(t),
                      "cone_time": res.cone_time, "separation": res.separation,
                      "derivative": res.derivative, "residual": res.residual,
                      "iterations": res.iterations, "other_velocity": res.other_velocity}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fst", description="Two-body scattering solver and estimate checks")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the family of conditional problems")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("check", help="run the estimate checks on a trajectory CSV")
    p.add_argument("--traj", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("cone", help="advanced or retarded time for one vertex")
    p.add_argument("--traj", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--sign", choices=["adv", "ret"], required=True)
    p.add_argument("--vertex", choices=["a", "b"], required=True)
    p.add_argument("--config", default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return cmd_solve(args.config, args.out)
        if args.command == "check":
            return cmd_check(args.traj, args.config, args.out)
        return cmd_cone(args.traj, args.t, args.sign, args.vertex, args.config)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        # schema problems in CSV input, bad query arguments
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FSTError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
