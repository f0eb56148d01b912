"""Trajectories on a uniform grid with closed-form tails to the left.

Nodes are ``grid_start + k*step``.  Between nodes positions are cubic Hermite
interpolants of the stored (position, velocity) samples; to the left of
``pinned`` (by default the first node) the closed form
``c0 + c1*t + clog*ln|t|`` is used instead, and to the right of the last node
the motion is continued linearly for at most ``extrapolation`` time units.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K
from .asymptotics import AsymptoticData, strip_endpoints, tail_coefficients
from .errors import (CrossedTrajectories, IncompatibleDomains, NonUniformStep, OutOfDomain,
                     SuperluminalSample, TailMismatch)

TAIL_TOL = 1e-12
CSV_HEADER = ["t", "a", "adot", "b", "bdot"]


def closed_form(tail, t):
    """Position and velocity of ``c0 + c1*t + clog*ln|t|`` (array friendly)."""
    c0, c1, cl = tail
    t = np.asarray(t, dtype=float)
    if cl == 0.0:
        return c0 + c1 * t, c1 + 0.0 * t
    return c0 + c1 * t + cl * np.log(np.abs(t)), c1 + cl / t


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid_start: float
    step: float
    positions: np.ndarray
    velocities: np.ndarray
    tail: tuple[float, float, float]
    pinned: float | None = None
    extrapolation: float = 0.0
    tail_tol: float = field(default=TAIL_TOL, repr=False)

    def __post_init__(self):
        pos = np.ascontiguousarray(self.positions, dtype=float)
        vel = np.ascontiguousarray(self.velocities, dtype=float)
        pos.flags.writeable = False
        vel.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "tail", tuple(float(c) for c in self.tail))
        if self.pinned is None:
            object.__setattr__(self, "pinned", float(self.grid_start))
        self._validate()

    def _validate(self):
        if not self.step > 0:
            raise NonUniformStep("step must be positive")
        if self.positions.shape != self.velocities.shape or self.positions.ndim != 1:
            raise ValueError("positions and velocities must be 1-d arrays of equal length")
        if len(self.positions) < 2:
            raise ValueError("a trajectory needs at least two nodes")
        if self.extrapolation < 0:
            raise ValueError("extrapolation width must be non-negative")
        bad = np.flatnonzero(~(np.abs(self.velocities) < 1.0))
        if bad.size:
            k = bad[0]
            raise SuperluminalSample(
                f"|velocity| >= 1 at node {k} (t={self.times[k]!r}, v={self.velocities[k]!r})")
        # nodes at or left of the pinned time must reproduce the tail
        k_last = int(math.floor((self.pinned - self.grid_start) / self.step + 1e-9))
        k_last = min(max(k_last, 0), len(self.positions) - 1)
        t = self.times[: k_last + 1]
        xp, xv = closed_form(self.tail, t)
        dev = max(np.max(np.abs(xp - self.positions[: k_last + 1]) / np.maximum(1.0, np.abs(xp))),
                  np.max(np.abs(xv - self.velocities[: k_last + 1])))
        if dev > self.tail_tol:
            raise TailMismatch(f"samples deviate from the tail by {dev:.3e} (tolerance {self.tail_tol:g})")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def grid_end(self) -> float:
        return self.grid_start + (self.n - 1) * self.step

    @property
    def domain_end(self) -> float:
        return self.grid_end + self.extrapolation

    @cached_property
    def times(self) -> np.ndarray:
        return self.grid_start + self.step * np.arange(self.n)

    @cached_property
    def kernel(self):
        c0, c1, cl = self.tail
        return (float(self.grid_start), float(self.step), self.positions, self.velocities,
                c0, c1, cl, float(self.pinned), self.n, float(self.domain_end))

    def eval(self, t):
        """(position, velocity) at ``t``; scalars in, scalars out."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(ts > self.domain_end):
            raise OutOfDomain(f"t={ts.max()!r} is beyond the domain end {self.domain_end!r}")
        pos, vel = K.traj_eval_many(self.kernel, np.ascontiguousarray(ts))
        if np.ndim(t) == 0:
            return float(pos[0]), float(vel[0])
        return pos.reshape(np.shape(t)), vel.reshape(np.shape(t))

    def negated(self) -> Trajectory:
        c0, c1, cl = self.tail
        return Trajectory(self.grid_start, self.step, -self.positions, -self.velocities,
                          (-c0, -c1, -cl), self.pinned, self.extrapolation, self.tail_tol)

    def with_samples(self, positions, velocities) -> Trajectory:
        return Trajectory(self.grid_start, self.step, positions, velocities, self.tail,
                          self.pinned, self.extrapolation, self.tail_tol)

    @classmethod
    def from_function(cls, f, grid_start, grid_end, step, tail=None, **kw) -> Trajectory:
        """Sample ``f(t) -> (pos, vel)`` on a grid; the tail defaults to the line
        through the first node."""
        n = int(round((grid_end - grid_start) / step)) + 1
        t = grid_start + step * np.arange(n)
        pos, vel = (np.broadcast_to(np.asarray(x, dtype=float), t.shape) for x in f(t))
        if tail is None:
            tail = (pos[0] - vel[0] * t[0], vel[0], 0.0)
        return cls(grid_start, step, pos, vel, tail, **kw)


class TrajectoryBuilder:
    """Collects nodes one at a time; ``freeze`` checks everything again."""

    def __init__(self, grid_start: float, step: float, tail, pinned=None,
                 extrapolation: float = 0.0, tail_tol: float = TAIL_TOL):
        if not step > 0:
            raise NonUniformStep("step must be positive")
        self.grid_start = grid_start
        self.step = step
        self.tail = tail
        self.pinned = pinned
        self.extrapolation = extrapolation
        self.tail_tol = tail_tol
        self._pos: list[float] = []
        self._vel: list[float] = []

    def append_node(self, pos: float, vel: float, t: float | None = None):
        expected = self.grid_start + len(self._pos) * self.step
        if t is not None and abs(t - expected) > 1e-9 * self.step * max(1.0, abs(expected)):
            raise NonUniformStep(f"node at t={t!r}, expected t={expected!r}")
        if not abs(vel) < 1.0:
            raise SuperluminalSample(f"|velocity| >= 1 at t={expected!r}: {vel!r}")
        self._pos.append(float(pos))
        self._vel.append(float(vel))

    def freeze(self) -> Trajectory:
        return Trajectory(self.grid_start, self.step, np.array(self._pos), np.array(self._vel),
                          self.tail, self.pinned, self.extrapolation, self.tail_tol)


@dataclass(frozen=True, eq=False)
class TrajectoryPair:
    a: Trajectory
    b: Trajectory
    kappa_a: float = 0.0
    kappa_b: float = 0.0

    def __post_init__(self):
        t = self.a.times
        t = t[t <= self.b.domain_end]
        gap = self.a.eval(t)[0] - self.b.eval(t)[0]
        if gap.size and not np.all(gap > 0):
            k = int(np.argmin(gap))
            raise CrossedTrajectories(f"a - b = {gap[k]!r} at t={t[k]!r}")

    @property
    def domain_end(self) -> float:
        return min(self.a.domain_end, self.b.domain_end)

    def mirrored(self) -> TrajectoryPair:
        """Reflection x -> -x, which swaps the roles of a and b."""
        return TrajectoryPair(self.b.negated(), self.a.negated(), self.kappa_b, self.kappa_a)


def asymptotic_trajectory(data: AsymptoticData, particle: str, positions, velocities,
                          grid_start: float, step: float, pinned=None,
                          extrapolation: float = 0.0) -> Trajectory:
    return Trajectory(grid_start, step, positions, velocities, tail_coefficients(data, particle),
                      pinned, extrapolation)


def probe_times(grid_start: float, grid_end: float, step: float) -> np.ndarray:
    """Grid nodes plus midpoints."""
    n = int(round((grid_end - grid_start) / step))
    return grid_start + 0.5 * step * np.arange(2 * n + 1)


def pair_norm_distance(p1: TrajectoryPair, p2: TrajectoryPair, probe_grid=None) -> float:
    """max(|a1(0)-a2(0)|, |b1(0)-b2(0)|, sup|a1'-a2'|, sup|b1'-b2'|) on the probe grid.

    The default probe is nodes plus midpoints of the finer grid over
    [earliest grid start, earliest grid end].  Left of both grids the pairs
    run on their tails, whose difference is not sampled.
    """
    end = min(p1.domain_end, p2.domain_end)
    if end < 0.0:
        raise IncompatibleDomains(f"t=0 is outside the common domain (ends at {end!r})")
    if probe_grid is None:
        start = min(p1.a.grid_start, p2.a.grid_start, p1.b.grid_start, p2.b.grid_start)
        stop = min(p1.a.grid_end, p2.a.grid_end, p1.b.grid_end, p2.b.grid_end)
        step = min(p1.a.step, p2.a.step)
        probe_grid = probe_times(start, start + step * math.floor((stop - start) / step + 1e-9), step)
    probe = np.asarray(probe_grid, dtype=float)
    if probe.size and probe.max() > end:
        raise IncompatibleDomains(f"probe reaches t={probe.max()!r} beyond the common domain")
    d = max(abs(p1.a.eval(0.0)[0] - p2.a.eval(0.0)[0]), abs(p1.b.eval(0.0)[0] - p2.b.eval(0.0)[0]))
    if probe.size:
        d = max(d, float(np.max(np.abs(p1.a.eval(probe)[1] - p2.a.eval(probe)[1]))),
                float(np.max(np.abs(p1.b.eval(probe)[1] - p2.b.eval(probe)[1]))))
    return d


def write_csv(pair: TrajectoryPair, path, t_max: float | None = None):
    """One row per node of a's grid; ``repr`` keeps floats round-trip exact."""
    t = pair.a.times
    if t_max is not None:
        t = t[t <= t_max + 1e-9 * pair.a.step]
    m = len(t)
    # write stored node values so the file round-trips bit for bit
    a, ad = pair.a.positions[:m], pair.a.velocities[:m]
    if pair.b.grid_start == pair.a.grid_start and pair.b.step == pair.a.step and pair.b.n >= m:
        b, bd = pair.b.positions[:m], pair.b.velocities[:m]
    else:
        b, bd = pair.b.eval(t)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for row in zip(t, a, ad, b, bd):
            w.writerow([repr(float(x)) for x in row])


def read_csv(path):
    """Columns t, a, adot, b, bdot as float arrays.  Raises ValueError on schema problems."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise ValueError(f"{path}: header must be {','.join(CSV_HEADER)}")
    body = rows[1:]
    for i, r in enumerate(body, start=2):
        if len(r) != 5:
            raise ValueError(f"{path}:{i}: expected 5 columns, got {len(r)}")
    try:
        arr = np.array([[float(x) for x in r] for r in body], dtype=float)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from None
    if len(arr) < 2:
        raise ValueError(f"{path}: need at least two rows")
    return arr.T


def pair_from_csv(path, data: AsymptoticData, step: float | None = None,
                  extrapolation: float = 0.0) -> TrajectoryPair:
    """Rebuild a solver pair; b is taken as pinned to its asymptote up to T+."""
    t, a, ad, b, bd = read_csv(path)
    steps = np.diff(t)
    h = (t[-1] - t[0]) / (len(t) - 1) if step is None else step
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(t[0])):
        raise NonUniformStep(f"{path}: rows are not uniformly spaced")
    T = float(t[0])
    _, t_plus = strip_endpoints(data, T)
    ta = Trajectory(T, h, a, ad, tail_coefficients(data, "a"), None, extrapolation)
    tb = Trajectory(T, h, b, bd, tail_coefficients(data, "b"), t_plus, extrapolation)
    return TrajectoryPair(ta, tb, data.kappa_a, data.kappa_b)
