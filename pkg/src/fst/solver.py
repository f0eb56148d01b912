"""Conditional solutions by waveform relaxation, and the T -> -inf family.

A conditional solution for start time T has a(T), a'(T) taken from the
asymptote x and b pinned to the asymptote y on [T-, T+], where T± are the
cone times of the event (T, x(T)) on y.  After T (for a) and T+ (for b)
both particles obey the field equations.  Each Picard sweep integrates both
particles against the previous iterate with RK4 in (position, momentum).
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import _kernels as K
from .asymptotics import AsymptoticData, find_T0, gap, strip_endpoints, tail_coefficients
from .errors import ConfigError, NonScattering, PicardDivergence, ScheduleExhausted
from .trajectory import (Trajectory, TrajectoryPair, closed_form, pair_norm_distance,
                         probe_times)

log = logging.getLogger(__name__)

SWEEPS = ("jacobi", "gauss-seidel")
SEEDS = ("warm", "cold")


@dataclass
class SolverConfig:
    step: float = 1e-2
    t_end: float = 0.0
    margin: float | None = None       # None: 2*(a-b)(t_end)/(1-V) from the seed
    tol_fix: float = 1e-10
    max_picard: int = 60
    damping: float = 1.0
    min_damping: float = 1.0 / 16
    tol_cone: float = 1e-12
    max_cone_iter: int = 500
    sep_floor: float = 1e-6
    T_schedule: list[float] | None = None   # None: 2^n * T0
    schedule_ratio: float = 2.0
    schedule_length: int = 16
    tol_global: float = 1e-3
    quad_step: float | None = None    # None: same as step
    sweep: str = "jacobi"
    family_seed: str = "warm"
    t0_slack: float = 0.1
    t0_floor: float = -1e7
    threads: int = 1                  # >1 runs the two Jacobi sweeps concurrently

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError("step must be positive")
        if self.margin is not None and self.margin < 0:
            raise ConfigError("margin must be non-negative")
        if not 0 < self.damping <= 1:
            raise ConfigError("damping must lie in (0, 1]")
        if self.tol_fix < 0 or self.tol_global < 0 or self.tol_cone <= 0:
            raise ConfigError("tolerances must be non-negative (tol_cone positive)")
        if self.max_picard < 1:
            raise ConfigError("max_picard must be at least 1")
        if self.sweep not in SWEEPS:
            raise ConfigError(f"sweep must be one of {SWEEPS}")
        if self.family_seed not in SEEDS:
            raise ConfigError(f"family_seed must be one of {SEEDS}")
        if self.T_schedule is not None:
            ts = [float(t) for t in self.T_schedule]
            if not ts or any(b >= a for a, b in zip(ts, ts[1:])):
                raise ConfigError("T_schedule must be non-empty and strictly decreasing")
            self.T_schedule = ts
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.schedule_ratio <= 1 or self.schedule_length < 1:
            raise ConfigError("schedule_ratio must exceed 1 and schedule_length be >= 1")

    @property
    def quadrature_step(self) -> float:
        return self.quad_step or self.step

    @classmethod
    def from_dict(cls, d: dict) -> SolverConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class ConditionalSolution:
    pair: TrajectoryPair
    T: float
    T_minus: float
    T_plus: float
    picard_iterations: int
    final_update_norm: float
    t_end: float
    margin: float
    update_norms: list[float] = field(default_factory=list)
    damping: float = 1.0
    seconds: float = 0.0

    def window(self) -> tuple[float, float]:
        return self.T, self.t_end


@dataclass
class GlobalRun:
    family: list[ConditionalSolution]
    deltas: list[float]
    converged: bool
    schedule: list[float]
    closeness: list[dict] = field(default_factory=list)

    @property
    def final_pair(self) -> TrajectoryPair:
        return self.family[-1].pair


def check_scattering(data: AsymptoticData, T: float):
    """Raise NonScattering unless x-y >= mu*T and x'-y' <= mu at T."""
    (xa, va), (xb, vb) = (closed_form(tail_coefficients(data, p), T) for p in ("a", "b"))
    mu = data.mu
    if not (xa - xb >= mu * T and va - vb <= mu):
        raise NonScattering(
            f"at T={T!r}: x-y={float(xa - xb):.6g} (need >= {mu * T:.6g}), "
            f"x'-y'={float(va - vb):.6g} (need <= {mu:.6g})")


def integrate_state(x0: float, v0: float, t0: float, step: float, n: int, other: Trajectory,
                    direction: float, kappa: float, tol_cone: float = 1e-12,
                    max_cone_iter: int = 500, sep_floor: float = 1e-6):
    """RK4 in (position, momentum) against a frozen partner trajectory.

    ``direction`` is +1 when the moving particle is the right one.  Returns
    node times, positions and velocities.
    """
    pos = np.empty(n)
    vel = np.empty(n)
    pos[0] = x0
    vel[0] = v0
    K.sweep(t0, step, pos, vel, t0, x0, K.momentum_of(v0), 1, other.kernel, direction,
            float(kappa), tol_cone, max_cone_iter, sep_floor)
    return t0 + step * np.arange(n), pos, vel


class _Problem:
    """Grid, pinned data and kernel plumbing for one start time T."""

    def __init__(self, data: AsymptoticData, T: float, cfg: SolverConfig, margin: float):
        self.data, self.T, self.cfg = data, T, cfg
        self.h = cfg.step
        self.T_minus, self.T_plus = strip_endpoints(data, T)
        self.ca = tail_coefficients(data, "a")
        self.cb = tail_coefficients(data, "b")
        self.margin = margin
        self.n = int(round((cfg.t_end + margin - T) / self.h)) + 1
        if self.n < 3:
            raise ConfigError("grid has fewer than three nodes")
        self.times = T + self.h * np.arange(self.n)
        self.k_pin = int(math.floor((self.T_plus - T) / self.h + 1e-9))
        self.xT, self.vT = (float(z) for z in closed_form(self.ca, T))
        self.yp, self.wp = (float(z) for z in closed_form(self.cb, self.T_plus))
        self.pin_pos, self.pin_vel = closed_form(self.cb, self.times[: self.k_pin + 1])

    def pinned_arrays(self):
        pa = np.empty(self.n)
        va = np.empty(self.n)
        pb = np.empty(self.n)
        vb = np.empty(self.n)
        pa[0], va[0] = self.xT, self.vT
        pb[: self.k_pin + 1] = self.pin_pos
        vb[: self.k_pin + 1] = self.pin_vel
        return pa, va, pb, vb

    def march(self):
        """Forward pass with each particle's future continued linearly."""
        pa, va, pb, vb = self.pinned_arrays()
        cfg = self.cfg
        K.march(self.T, self.h, pa, va, pb, vb, self.k_pin, self.T_plus, self.yp,
                K.momentum_of(self.wp), (*self.ca, self.T), (*self.cb, self.T_plus),
                float(self.data.kappa_a), float(self.data.kappa_b), cfg.tol_cone,
                cfg.max_cone_iter, cfg.sep_floor)
        return pa, va, pb, vb

    def pair(self, pa, va, pb, vb, extrapolation: float) -> TrajectoryPair:
        a = Trajectory(self.T, self.h, pa, va, self.ca, self.T, extrapolation)
        b = Trajectory(self.T, self.h, pb, vb, self.cb, self.T_plus, extrapolation)
        return TrajectoryPair(a, b, self.data.kappa_a, self.data.kappa_b)

    def sweep_a(self, frozen_b: Trajectory):
        pa = np.empty(self.n)
        va = np.empty(self.n)
        pa[0], va[0] = self.xT, self.vT
        cfg = self.cfg
        K.sweep(self.T, self.h, pa, va, self.T, self.xT, K.momentum_of(self.vT), 1,
                frozen_b.kernel, 1.0, float(self.data.kappa_a), cfg.tol_cone,
                cfg.max_cone_iter, cfg.sep_floor)
        return pa, va

    def sweep_b(self, frozen_a: Trajectory):
        pb = np.empty(self.n)
        vb = np.empty(self.n)
        pb[: self.k_pin + 1] = self.pin_pos
        vb[: self.k_pin + 1] = self.pin_vel
        cfg = self.cfg
        K.sweep(self.T, self.h, pb, vb, self.T_plus, self.yp, K.momentum_of(self.wp),
                self.k_pin + 1, frozen_a.kernel, -1.0, float(self.data.kappa_b),
                cfg.tol_cone, cfg.max_cone_iter, cfg.sep_floor)
        return pb, vb


def _extrapolation(pa, va, pb, vb) -> float:
    # room for cones issued from the last node
    V = max(np.max(np.abs(va)), np.max(np.abs(vb)))
    return 4.0 * (pa[-1] - pb[-1]) / (1.0 - V) + 10.0


def auto_margin(data: AsymptoticData, T: float, cfg: SolverConfig) -> float:
    """2*(a-b)(t_end)/(1-V) measured on the forward-march seed, rounded up to
    whole time units so that grids of different steps end at the same time
    (the linear continuation beyond the grid would otherwise move with h)."""
    if cfg.margin is not None:
        return cfg.margin
    if data.kappa_a == 0.0 and data.kappa_b == 0.0:
        # free lines need no cones, and they cross soon after t_end
        return 0.0
    prob = _Problem(data, T, cfg, 0.0)
    pa, va, pb, vb = prob.march()
    V = max(np.max(np.abs(va)), np.max(np.abs(vb)))
    return float(math.ceil(2.0 * (pa[-1] - pb[-1]) / (1.0 - V)))


def solve_conditional(data: AsymptoticData, T: float, cfg: SolverConfig,
                      seed: TrajectoryPair | None = None, margin: float | None = None
                      ) -> ConditionalSolution:
    """Waveform relaxation for start time ``T``.

    The first iterate is ``seed`` sampled on the new grid if given, otherwise
    a single forward march in which each particle sees the other's future
    as a straight continuation.
    """
    t_start = time.perf_counter()
    check_scattering(data, T)
    if margin is None:
        margin = auto_margin(data, T, cfg)
    prob = _Problem(data, T, cfg, margin)
    if seed is not None:
        pa, va, pb, vb = prob.pinned_arrays()
        sa = seed.a.eval(prob.times[1:])
        pa[1:], va[1:] = sa
        k = prob.k_pin + 1
        pb[k:], vb[k:] = seed.b.eval(prob.times[k:])
    else:
        pa, va, pb, vb = prob.march()
    ext = _extrapolation(pa, va, pb, vb)
    frozen = prob.pair(pa, va, pb, vb, ext)
    probe = probe_times(T, prob.times[-1], prob.h)

    damping = cfg.damping
    norms: list[float] = []
    rising = 0
    pool = ThreadPoolExecutor(2) if (cfg.threads > 1 and cfg.sweep == "jacobi") else None
    for it in range(1, cfg.max_picard + 1):
        if pool is not None:
            fut = pool.submit(prob.sweep_b, frozen.a)
        na, nva = prob.sweep_a(frozen.b)
        if damping < 1.0:
            na = damping * na + (1 - damping) * frozen.a.positions
            nva = damping * nva + (1 - damping) * frozen.a.velocities
        if pool is not None:
            nb, nvb = fut.result()
        elif cfg.sweep == "gauss-seidel":
            nb, nvb = prob.sweep_b(Trajectory(T, prob.h, na, nva, prob.ca, T, ext))
        else:
            nb, nvb = prob.sweep_b(frozen.a)
        if damping < 1.0:
            nb = damping * nb + (1 - damping) * frozen.b.positions
            nvb = damping * nvb + (1 - damping) * frozen.b.velocities
        new = prob.pair(na, nva, nb, nvb, ext)
        d = pair_norm_distance(new, frozen, probe)
        norms.append(d)
        log.debug("T=%g picard %d update %.3e", T, it, d)
        frozen = new
        if d < cfg.tol_fix:
            break
        rising = rising + 1 if len(norms) > 1 and d > norms[-2] else 0
        if rising >= 5:
            if damping / 2 < cfg.min_damping:
                raise PicardDivergence(f"update norm grew for 5 iterations at T={T!r} "
                                       f"(damping {damping:g})")
            damping /= 2
            rising = 0
            log.info("T=%g: halving damping to %g", T, damping)
    if pool is not None:
        pool.shutdown()
    return ConditionalSolution(frozen, T, prob.T_minus, prob.T_plus, len(norms), norms[-1],
                               cfg.t_end, margin, norms, damping, time.perf_counter() - t_start)


def default_schedule(data: AsymptoticData, cfg: SolverConfig) -> list[float]:
    if cfg.T_schedule is not None:
        return list(cfg.T_schedule)
    T0 = find_T0(data, cfg.step, cfg.t0_floor, cfg.t0_slack)
    return [T0 * cfg.schedule_ratio ** n for n in range(cfg.schedule_length)]


def closeness_samples(sol: ConditionalSolution, data: AsymptoticData, n: int = 16) -> dict:
    """|a-x|*|t|/ln|t| and |b-y|*|t|/ln|t| on [T, T/10] (log spaced)."""
    T = sol.T
    hi = T / 10.0
    if hi >= -math.e:
        hi = min(-math.e, 0.5 * (T + sol.T_plus)) if T < -math.e else T
    t = -np.geomspace(-T, -hi, n) if hi > T else np.array([T])
    a = sol.pair.a.eval(t)[0]
    b = sol.pair.b.eval(t)[0]
    x = closed_form(tail_coefficients(data, "a"), t)[0]
    y = closed_form(tail_coefficients(data, "b"), t)[0]
    w = np.abs(t) / np.log(np.abs(t))
    return {"T": T, "t": t.tolist(), "ratio_a": (np.abs(a - x) * w).tolist(),
            "ratio_b": (np.abs(b - y) * w).tolist()}


def solve_global(data: AsymptoticData, cfg: SolverConfig, workers: int = 1) -> GlobalRun:
    """Solve for each T in the schedule until successive members are closer than tol_global.

    Successive members are compared with ``pair_norm_distance`` on nodes and
    midpoints of [T_n, t_end].  With ``family_seed="warm"`` each member starts
    from the previous one; with "cold" members are independent and may run
    on ``workers`` threads.
    """
    schedule = default_schedule(data, cfg)
    for T in schedule:
        check_scattering(data, T)
    margin = auto_margin(data, schedule[0], cfg)
    family: list[ConditionalSolution] = []
    deltas: list[float] = []
    t_stop = cfg.t_end

    def delta(p, q):
        lo = min(p.T, q.T)
        k = math.floor((t_stop - lo) / cfg.step + 1e-9)
        return pair_norm_distance(p.pair, q.pair, probe_times(lo, lo + k * cfg.step, cfg.step))

    if cfg.family_seed == "cold" and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            family = list(ex.map(lambda T: solve_conditional(data, T, cfg, margin=margin), schedule))
        for p, q in zip(family, family[1:]):
            deltas.append(delta(p, q))
        n_used = len(family)
        for i, dl in enumerate(deltas):
            if dl < cfg.tol_global:
                n_used = i + 2
                break
        family, deltas = family[:n_used], deltas[: n_used - 1]
    else:
        for T in schedule:
            seed = family[-1].pair if (family and cfg.family_seed == "warm") else None
            sol = solve_conditional(data, T, cfg, seed=seed, margin=margin)
            log.info("T=%g: %d Picard sweeps, update %.2e, %.1fs", T, sol.picard_iterations,
                     sol.final_update_norm, sol.seconds)
            if family:
                deltas.append(delta(family[-1], sol))
                log.info("delta = %.3e", deltas[-1])
            family.append(sol)
            if deltas and deltas[-1] < cfg.tol_global:
                break
    converged = bool(deltas) and deltas[-1] < cfg.tol_global
    if not deltas and math.isinf(cfg.tol_global):
        converged = True
    run = GlobalRun(family, deltas, converged, schedule[: len(family)],
                    [closeness_samples(s, data) for s in family])
    if not converged:
        raise ScheduleExhausted(run)
    return run
