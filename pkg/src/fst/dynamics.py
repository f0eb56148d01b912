"""Right-hand sides of the two-body equations and the integrated forms used for checks.

Particle a obeys

    d/dt [a'/sqrt(1-a'^2)] = kappa_a/2 * [ (1+b'(t2-))/(1-b'(t2-)) / (a(t)-b(t2-))^2
                                          + (1-b'(t2+))/(1+b'(t2+)) / (a(t)-b(t2+))^2 ]

and b the mirror image with an overall minus sign, cones t1± on a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import _kernels as K
from .asymptotics import AsymptoticData, tail_coefficients
from .errors import SuperluminalInput
from .lightcone import MAX_ITER, TOL_CONE, ConeResult
from .trajectory import TrajectoryPair

SEP_FLOOR = 1e-6


def momentum_from_velocity(v):
    v = np.asarray(v, dtype=float)
    if np.any(~(np.abs(v) < 1.0)):
        raise SuperluminalInput("|v| must be < 1")
    p = v / np.sqrt(1.0 - v * v)
    return float(p) if p.ndim == 0 else p


def velocity_from_momentum(p):
    p = np.asarray(p, dtype=float)
    v = p / np.sqrt(1.0 + p * p)
    return float(v) if v.ndim == 0 else v


def rk4_momentum_step(dpdt, t: float, x: float, p: float, h: float) -> tuple[float, float]:
    """One classical RK4 step of x' = v(p), p' = dpdt(t, x) in plain Python.

    Same stages as the compiled solver kernel; used as a reference and for
    forces that are not of FST type.
    """
    k1x = velocity_from_momentum(p)
    k1p = dpdt(t, x)
    k2x = velocity_from_momentum(p + 0.5 * h * k1p)
    k2p = dpdt(t + 0.5 * h, x + 0.5 * h * k1x)
    k3x = velocity_from_momentum(p + 0.5 * h * k2p)
    k3p = dpdt(t + 0.5 * h, x + 0.5 * h * k2x)
    k4x = velocity_from_momentum(p + h * k3p)
    k4p = dpdt(t + h, x + h * k3x)
    return (x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p))


def integrate_momentum(dpdt, x0: float, v0: float, t0: float, h: float, n: int):
    """``n`` RK4 steps from (x0, v0); returns node times, positions, velocities."""
    t = t0 + h * np.arange(n + 1)
    xs = np.empty(n + 1)
    vs = np.empty(n + 1)
    x, p = x0, momentum_from_velocity(v0)
    xs[0], vs[0] = x, v0
    for k in range(n):
        x, p = rk4_momentum_step(dpdt, t[k], x, p, h)
        xs[k + 1], vs[k + 1] = x, velocity_from_momentum(p)
    return t, xs, vs


def _orient(pair: TrajectoryPair, particle: str):
    if particle == "a":
        return pair.a, pair.b, 1.0, pair.kappa_a
    if particle == "b":
        return pair.b, pair.a, -1.0, pair.kappa_b
    raise ValueError(f"particle must be 'a' or 'b', got {particle!r}")


@dataclass(frozen=True)
class ForceEval:
    dpdt: float
    acc: float
    adv_term: float
    ret_term: float
    cone_adv: ConeResult
    cone_ret: ConeResult


@dataclass(frozen=True)
class ForceTable:
    """Vectorised force data; ``ret``/``adv`` columns refer to the other particle."""
    t: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    dpdt: np.ndarray
    acc: np.ndarray
    t_ret: np.ndarray
    sep_ret: np.ndarray
    w_ret: np.ndarray
    res_ret: np.ndarray
    t_adv: np.ndarray
    sep_adv: np.ndarray
    w_adv: np.ndarray
    res_adv: np.ndarray


def force_table(pair: TrajectoryPair, particle: str, times, tol_cone: float = TOL_CONE,
                sep_floor: float = SEP_FLOOR) -> ForceTable:
    own, other, d, kappa = _orient(pair, particle)
    ts = np.ascontiguousarray(np.atleast_1d(np.asarray(times, dtype=float)))
    tab = K.force_table(own.kernel, other.kernel, ts, d, float(kappa), tol_cone, MAX_ITER, sep_floor)
    vel = tab[:, 1]
    return ForceTable(ts, tab[:, 0], vel, tab[:, 2], (1.0 - vel ** 2) ** 1.5 * tab[:, 2],
                      tab[:, 3], tab[:, 4], tab[:, 5], tab[:, 6],
                      tab[:, 8], tab[:, 9], tab[:, 10], tab[:, 11])


def force_on(pair: TrajectoryPair, particle: str, t: float, tol_cone: float = TOL_CONE,
             sep_floor: float = SEP_FLOOR) -> ForceEval:
    own, other, d, kappa = _orient(pair, particle)
    ft = force_table(pair, particle, [t], tol_cone, sep_floor)
    vv = ft.vel[0]
    w_m, w_p = ft.w_ret[0], ft.w_adv[0]
    ret = d * 0.5 * kappa * (1 + d * w_m) / (1 - d * w_m) / ft.sep_ret[0] ** 2
    adv = d * 0.5 * kappa * (1 - d * w_p) / (1 + d * w_p) / ft.sep_adv[0] ** 2
    cone_ret = ConeResult(ft.t_ret[0], ft.sep_ret[0], (1 - d * vv) / (1 - d * w_m), ft.res_ret[0], 0, w_m)
    cone_adv = ConeResult(ft.t_adv[0], ft.sep_adv[0], (1 + d * vv) / (1 + d * w_p), ft.res_adv[0], 0, w_p)
    return ForceEval(ft.dpdt[0], ft.acc[0], adv, ret, cone_adv, cone_ret)


def acceleration(pair: TrajectoryPair, particle: str, times, tol_cone: float = TOL_CONE,
                 sep_floor: float = SEP_FLOOR, at_pin: str | None = None) -> np.ndarray:
    """Acceleration along the trajectory as it is actually defined: the tail's
    closed form left of the pinned time, the field equation from there on.

    The two sides generally disagree at the pinned time.  ``at_pin`` ("left" or
    "right") picks a one-sided value for times within roundoff of it.
    """
    own, _, _, _ = _orient(pair, particle)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty_like(ts)
    slack = 1e-9 * max(1.0, abs(own.pinned))
    if at_pin == "right":
        left = ts < own.pinned - slack
    elif at_pin == "left":
        left = ts <= own.pinned + slack
    else:
        left = ts < own.pinned
    cl = own.tail[2]
    out[left] = -cl / ts[left] ** 2
    if np.any(~left):
        out[~left] = force_table(pair, particle, ts[~left], tol_cone, sep_floor).acc
    return out


def _simpson_nodes(T: float, t: float, quad_step: float):
    n = max(2, 2 * math.ceil((t - T) / (2.0 * quad_step)))
    return np.linspace(T, t, n + 1)


def integrated_velocity_residual(pair: TrajectoryPair, particle: str, T: float, t: float,
                                 quad_step: float, tol_cone: float = TOL_CONE) -> float:
    """v(t) - v(T) - int_T^t (1-v^2)^{3/2} * force ds by composite Simpson."""
    own, _, _, _ = _orient(pair, particle)
    if t == T:
        return 0.0
    s = _simpson_nodes(T, t, quad_step)
    ft = force_table(pair, particle, s, tol_cone)
    return float(own.eval(t)[1] - own.eval(T)[1] - simpson(ft.acc, x=s))


def residual_profile(pair: TrajectoryPair, particle: str, start: float, stop: float,
                     window: float = 1.0, quad_step: float = 1e-2, tol_cone: float = TOL_CONE):
    """Integrated residual over consecutive windows of length ``window`` in [start, stop].

    Returns (window_end_times, residuals).  Shares one force evaluation across
    windows; ``window/quad_step`` is rounded up to an even count.
    """
    own, _, _, _ = _orient(pair, particle)
    m = max(2, 2 * math.ceil(window / (2.0 * quad_step)))
    nw = int(math.floor((stop - start) / window + 1e-9))
    if nw < 1:
        return np.empty(0), np.empty(0)
    s = start + (window / m) * np.arange(nw * m + 1)
    ft = force_table(pair, particle, s, tol_cone)
    acc = ft.acc
    # Simpson per window, vectorised: weights 1 4 2 4 ... 4 1
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    idx = np.arange(nw)[:, None] * m + np.arange(m + 1)[None, :]
    integrals = (acc[idx] * w).sum(axis=1) * (window / m) / 3.0
    v = ft.vel
    ends = s[m::m]
    return ends, v[m::m] - v[:-1:m] - integrals


@dataclass(frozen=True)
class WfintTerms:
    t: float
    A1: float
    A2: float
    A3: float
    A4: float
    A5: float
    lhs: float  # a_T(t) - x(t)

    @property
    def lhs_gap(self) -> float:
        return abs(self.lhs)

    @property
    def sum_bound(self) -> float:
        return abs(self.A1) + abs(self.A2) + abs(self.A3) + abs(self.A4) + abs(self.A5)

    @property
    def identity_residual(self) -> float:
        """(a_T - x) - (A1 - A2 + A3 + A4 + A5); zero up to discretisation."""
        return self.lhs - (self.A1 - self.A2 + self.A3 + self.A4 + self.A5)


def _bracket_data(pair: TrajectoryPair, s, tol_cone: float, ret_side: str):
    """Per-time ingredients of the A-terms for particle a: the brackets F, G,
    their analytic time derivatives and the cone separations."""
    ft = force_table(pair, "a", s, tol_cone)
    av, aa = ft.vel, ft.acc
    out = {}
    for key, sg, tc, w, sep, side in (("ret", -1.0, ft.t_ret, ft.w_ret, ft.sep_ret, ret_side),
                                      ("adv", 1.0, ft.t_adv, ft.w_adv, ft.sep_adv, "right")):
        bacc = acceleration(pair, "b", tc, tol_cone, at_pin=side)
        tdot = (1.0 + sg * av) / (1.0 + sg * w)
        wd = bacc * tdot
        P = (1.0 - av ** 2) ** 1.5
        Pd = -3.0 * av * aa * np.sqrt(1.0 - av ** 2)
        rel = av - w
        # g = (1 - sg*w)/rel; sg = -1 gives the (1 + w) bracket
        g = (1.0 - sg * w) / rel
        gd = (-sg * wd * rel - (1.0 - sg * w) * (aa - wd)) / rel ** 2
        Q = (1.0 - w ** 2) / rel ** 2
        Qd = (-2.0 * w * wd * rel - 2.0 * (1.0 - w ** 2) * (aa - wd)) / rel ** 3
        out[key] = dict(F=P * g, Fd=Pd * g + P * gd, G=P * Q, Gd=Pd * Q + P * Qd, S=sep)
    return ft, out


def _cumulative_simpson(y, h):
    """Composite Simpson integrals from the first node to every even-indexed node."""
    pairs = (h / 3.0) * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    return np.concatenate(([0.0], np.cumsum(pairs)))


def wfint_series(pair: TrajectoryPair, data: AsymptoticData, T: float, ts, quad_step: float,
                 particle: str = "a", tol_cone: float = TOL_CONE) -> list[WfintTerms]:
    """A1..A5 at several t >= T from one quadrature pass.

    For particle b the terms are those of the reflected problem (a <-> -b),
    started at T+, where b leaves its pinned strip.  Sample times are moved
    to the nearest even quadrature node.
    """
    if particle == "b":
        return wfint_series(pair.mirrored(), data.mirrored(), pair.b.pinned, ts, quad_step,
                            "a", tol_cone)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < T):
        raise ValueError("sample times must satisfy t >= T")
    kappa = pair.kappa_a
    eta1 = data.eta1
    L = data.log_constant
    tail = tail_coefficients(data, "a")
    t_max = float(ts.max())

    # b's acceleration jumps where it leaves its strip; the retarded cone time
    # crosses that point at s* = t1+(T+), so Simpson runs on each side separately
    cuts = [T]
    if pair.b.pinned is not None and t_max > T:
        xb = pair.b.eval(pair.b.pinned)[0]
        s_star = K.cone(pair.a.kernel, float(pair.b.pinned), xb, -1.0, 1.0, tol_cone, MAX_ITER)[0]
        if T < s_star < t_max:
            cuts.append(s_star)
    cuts.append(t_max)

    pieces = []
    I4 = I5 = I5r = 0.0
    for j, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        m = max(2, 2 * math.ceil((hi - lo) / (2.0 * quad_step)))
        hq = (hi - lo) / m
        s = lo + hq * np.arange(m + 1)
        ft, br = _bracket_data(pair, s, tol_cone, "left" if j == 0 and len(cuts) > 2 else "right")
        logS = {k: np.log(br[k]["S"]) for k in br}
        f4 = br["ret"]["Gd"] * logS["ret"] + br["adv"]["Gd"] * logS["adv"]
        f5 = br["ret"]["Fd"] / br["ret"]["S"] + br["adv"]["Fd"] / br["adv"]["S"]
        c4 = I4 + _cumulative_simpson(f4, hq)
        c5 = I5 + _cumulative_simpson(f5, hq)
        c5r = I5r + _cumulative_simpson(s * f5, hq)
        I4, I5, I5r = c4[-1], c5[-1], c5r[-1]
        Gsum = br["ret"]["G"] * logS["ret"] + br["adv"]["G"] * logS["adv"]
        pieces.append(dict(s=s[::2], pos=ft.pos[::2], c4=c4, c5=c5, c5r=c5r, G=Gsum[::2], lo=lo, hi=hi,
                           FT=br["ret"]["F"][0] / br["ret"]["S"][0] + br["adv"]["F"][0] / br["adv"]["S"][0]))

    FT = pieces[0]["FT"]

    def a2(pc, k):
        return 0.5 * kappa * pc["G"][k] - eta1 * math.log(abs(pc["s"][k])) - 0.5 * eta1 * L

    A3 = a2(pieces[0], 0)
    out = []
    for t in ts:
        pc = pieces[-1] if t >= pieces[-1]["lo"] else pieces[0]
        ds = pc["s"][1] - pc["s"][0]
        k = int(round((t - pc["lo"]) / ds)) if ds > 0 else 0
        k = min(max(k, 0), len(pc["s"]) - 1)
        tk = float(pc["s"][k])
        A4 = 0.5 * kappa * pc["c4"][k]
        A5 = 0.5 * kappa * (tk * pc["c5"][k] - pc["c5r"][k])
        A1 = 0.5 * kappa * FT * (tk - T) - eta1 * (tk - T) / T
        x_t = tail[0] + tail[1] * tk + tail[2] * math.log(abs(tk))
        out.append(WfintTerms(tk, A1, a2(pc, k), A3, A4, A5, pc["pos"][k] - x_t))
    return out


def wfint_terms(pair: TrajectoryPair, data: AsymptoticData, T: float, t: float, quad_step: float,
                particle: str = "a", tol_cone: float = TOL_CONE) -> WfintTerms:
    """The five terms of a_T(t) - x(t) = A1 - A2 + A3 + A4 + A5 at a single t."""
    return wfint_series(pair, data, T, [t], quad_step, particle, tol_cone)[0]
