"""Compiled inner loops: dense evaluation, light-cone fixed points, forces, RK4 sweeps.

Trajectories cross into this module as plain tuples

    (t0, h, pos, vel, c0, c1, clog, pinned, n, tmax)

with nodes ``t0 + k*h`` for ``k < n``, the closed form ``c0 + c1*t + clog*ln|t|``
used for ``t <= pinned``, linear extrapolation past the last valid node, and
queries beyond ``tmax`` rejected.

Particle direction flag ``d``: +1 for the right particle (a), -1 for the left
one (b).  Cone sign ``sigma``: +1 advanced, -1 retarded.
"""

import math

import numpy as np
from numba import njit

from .errors import DomainExceeded, NoConvergence, SeparationUnderflow

EPS = 2.220446049250313e-16


@njit(cache=True, nogil=True)
def _closed(c0, c1, cl, t):
    if cl != 0.0:
        return c0 + c1 * t + cl * math.log(abs(t)), c1 + cl / t
    return c0 + c1 * t, c1


@njit(cache=True, nogil=True)
def _hermite(s, hh, p0, m0, p1, m1):
    s2 = s * s
    s3 = s2 * s
    p = ((2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * hh * m0
         + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * hh * m1)
    v = ((6.0 * s2 - 6.0 * s) * (p0 - p1) / hh + (3.0 * s2 - 4.0 * s + 1.0) * m0
         + (3.0 * s2 - 2.0 * s) * m1)
    return p, v


@njit(cache=True, nogil=True)
def traj_eval(tr, t):
    t0, h, pos, vel, c0, c1, cl, pinned, n, tmax = tr
    if t <= pinned:
        return _closed(c0, c1, cl, t)
    if t > tmax:
        raise DomainExceeded("query beyond the evaluable domain")
    t_last = t0 + (n - 1) * h
    if t >= t_last:
        if pinned >= t_last:
            pp, vp = _closed(c0, c1, cl, pinned)
            return pp + vp * (t - pinned), vp
        return pos[n - 1] + vel[n - 1] * (t - t_last), vel[n - 1]
    k = int(math.floor((t - t0) / h))
    if k > n - 2:
        k = n - 2
    if k < 0:
        k = 0
    tk = t0 + k * h
    if pinned > tk:
        # cell holding the pinned time: interpolate from the closed-form state there
        pp, vp = _closed(c0, c1, cl, pinned)
        hh = (tk + h) - pinned
        return _hermite((t - pinned) / hh, hh, pp, vp, pos[k + 1], vel[k + 1])
    return _hermite((t - tk) / h, h, pos[k], vel[k], pos[k + 1], vel[k + 1])


@njit(cache=True, nogil=True)
def traj_eval_many(tr, ts):
    m = ts.shape[0]
    pos = np.empty(m)
    vel = np.empty(m)
    for i in range(m):
        pos[i], vel[i] = traj_eval(tr, ts[i])
    return pos, vel


@njit(cache=True, nogil=True)
def velocity_of(p):
    return p / math.sqrt(1.0 + p * p)


@njit(cache=True, nogil=True)
def momentum_of(v):
    return v / math.sqrt(1.0 - v * v)


@njit(cache=True, nogil=True)
def _tol(tol, s, xv):
    # a few ulps of the operands: an absolute 1e-12 is unreachable once |s| ~ 1e4
    return max(tol, 8.0 * EPS * max(abs(s), abs(xv)))


@njit(cache=True, nogil=True)
def cone_from(other, t, xv, d, sigma, s, tol, maxit):
    """Solve s = t + sigma*d*(xv - other(s)) by plain fixed-point iteration from ``s``.

    Returns (s, separation, other_vel_at_s, residual, iterations).
    """
    for it in range(1, maxit + 1):
        xo, _ = traj_eval(other, s)
        s_new = t + sigma * d * (xv - xo)
        step = abs(s_new - s)
        s = s_new
        if step <= _tol(tol, s, xv):
            xo, wo = traj_eval(other, s)
            res = abs(s - t - sigma * d * (xv - xo))
            return s, d * (xv - xo), wo, res, it
    raise NoConvergence("light-cone iteration did not converge")


@njit(cache=True, nogil=True)
def cone_newton(other, t, xv, d, sigma, s, tol, maxit):
    """Same root as ``cone_from``, reached by Newton steps on
    g(s) = s - t - sigma*d*(xv - other(s)); g' = 1 + sigma*d*other'(s) >= 1 - V."""
    sd = sigma * d
    for it in range(1, maxit + 1):
        xo, wo = traj_eval(other, s)
        g = s - t - sd * (xv - xo)
        s_new = s - g / (1.0 + sd * wo)
        step = abs(s_new - s)
        s = s_new
        if step <= _tol(tol, s, xv):
            xo, wo = traj_eval(other, s)
            res = abs(s - t - sd * (xv - xo))
            return s, d * (xv - xo), wo, res, it
    raise NoConvergence("light-cone iteration did not converge")


@njit(cache=True, nogil=True)
def cone(other, t, xv, d, sigma, tol, maxit):
    """Cone time seeded with s0 = t + sigma*d*(xv - other(t))."""
    xo, _ = traj_eval(other, t)
    return cone_from(other, t, xv, d, sigma, t + sigma * d * (xv - xo), tol, maxit)


@njit(cache=True, nogil=True)
def _bracket(d, kappa, sm, wm, sp, wp, sep_floor):
    if sm < sep_floor or sp < sep_floor:
        raise SeparationUnderflow("separation below floor")
    dw_m = d * wm
    dw_p = d * wp
    return d * 0.5 * kappa * ((1.0 + dw_m) / (1.0 - dw_m) / (sm * sm)
                              + (1.0 - dw_p) / (1.0 + dw_p) / (sp * sp))


@njit(cache=True, nogil=True)
def dpdt(other, t, xv, d, kappa, tol, maxit, sep_floor):
    if kappa == 0.0:
        return 0.0
    _, sm, wm, _, _ = cone(other, t, xv, d, -1.0, tol, maxit)
    _, sp, wp, _, _ = cone(other, t, xv, d, 1.0, tol, maxit)
    return _bracket(d, kappa, sm, wm, sp, wp, sep_floor)


@njit(cache=True, nogil=True)
def _dpdt_warm(other, t, xv, d, kappa, seeds, tol, maxit, sep_floor):
    # seeds = (ret, adv) cone times from a nearby evaluation; nan means cold start
    if kappa == 0.0:
        return 0.0, seeds
    xo, _ = traj_eval(other, t)
    s_m = seeds[0] if seeds[0] == seeds[0] else t - d * (xv - xo)
    s_p = seeds[1] if seeds[1] == seeds[1] else t + d * (xv - xo)
    tm, sm, wm, _, _ = cone_newton(other, t, xv, d, -1.0, s_m, tol, maxit)
    tp, sp, wp, _, _ = cone_newton(other, t, xv, d, 1.0, s_p, tol, maxit)
    return _bracket(d, kappa, sm, wm, sp, wp, sep_floor), (tm, tp)


@njit(cache=True, nogil=True)
def force_table(own, other, times, d, kappa, tol, maxit, sep_floor):
    """Force and cone data at each time, vertex taken from ``own``.

    Columns: 0 pos, 1 vel, 2 dpdt, 3 t_ret, 4 sep_ret, 5 w_ret, 6 res_ret,
    7 it_ret, 8 t_adv, 9 sep_adv, 10 w_adv, 11 res_adv, 12 it_adv.
    """
    m = times.shape[0]
    out = np.empty((m, 13))
    for i in range(m):
        t = times[i]
        xv, vv = traj_eval(own, t)
        sm_t, sm, wm, rm, im = cone(other, t, xv, d, -1.0, tol, maxit)
        sp_t, sp, wp, rp, ip = cone(other, t, xv, d, 1.0, tol, maxit)
        if sm < sep_floor or sp < sep_floor:
            raise SeparationUnderflow("separation below floor")
        dw_m = d * wm
        dw_p = d * wp
        f = d * 0.5 * kappa * ((1.0 + dw_m) / (1.0 - dw_m) / (sm * sm)
                               + (1.0 - dw_p) / (1.0 + dw_p) / (sp * sp))
        out[i, 0] = xv
        out[i, 1] = vv
        out[i, 2] = f
        out[i, 3] = sm_t
        out[i, 4] = sm
        out[i, 5] = wm
        out[i, 6] = rm
        out[i, 7] = im
        out[i, 8] = sp_t
        out[i, 9] = sp
        out[i, 10] = wp
        out[i, 11] = rp
        out[i, 12] = ip
    return out


@njit(cache=True, nogil=True)
def _kadd(x, c, dx):
    # compensated summation, keeps straight lines exact over ~1e5 steps
    y = dx - c
    s = x + y
    c = (s - x) - y
    return s, c


@njit(cache=True, nogil=True)
def rk4_warm(other, t, x, p, h, d, kappa, seeds, tol, maxit, sep_floor):
    """One classical RK4 step of (position, momentum); returns (dx, dp, seeds)."""
    k1x = velocity_of(p)
    k1p, s1 = _dpdt_warm(other, t, x, d, kappa, seeds, tol, maxit, sep_floor)
    k2x = velocity_of(p + 0.5 * h * k1p)
    k2p, s2 = _dpdt_warm(other, t + 0.5 * h, x + 0.5 * h * k1x, d, kappa, s1, tol, maxit, sep_floor)
    k3x = velocity_of(p + 0.5 * h * k2p)
    k3p, s3 = _dpdt_warm(other, t + 0.5 * h, x + 0.5 * h * k2x, d, kappa, s2, tol, maxit, sep_floor)
    k4x = velocity_of(p + h * k3p)
    k4p, s4 = _dpdt_warm(other, t + h, x + h * k3x, d, kappa, s3, tol, maxit, sep_floor)
    dx = h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    dp = h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return dx, dp, s4


@njit(cache=True, nogil=True)
def rk4_step(other, t, x, p, h, d, kappa, tol, maxit, sep_floor):
    nan = np.nan
    dx, dp, _ = rk4_warm(other, t, x, p, h, d, kappa, (nan, nan), tol, maxit, sep_floor)
    return dx, dp


@njit(cache=True, nogil=True)
def sweep(t0, h, pos, vel, t_start, x_start, p_start, k_first, other, d, kappa,
          tol, maxit, sep_floor):
    """Integrate from ``t_start`` (state x_start, p_start) across the grid.

    Nodes ``< k_first`` are left untouched; ``t0 + k_first*h`` is the first
    node strictly after (or at) ``t_start``.
    """
    n = pos.shape[0]
    x = x_start
    p = p_start
    cx = 0.0
    cp = 0.0
    t = t_start
    seeds = (np.nan, np.nan)
    for k in range(k_first, n):
        t_next = t0 + k * h
        step = t_next - t
        if step > 0.0:
            dx, dp, seeds = rk4_warm(other, t, x, p, step, d, kappa, seeds, tol, maxit,
                                     sep_floor)
            x, cx = _kadd(x, cx, dx)
            p, cp = _kadd(p, cp, dp)
        t = t_next
        pos[k] = x
        vel[k] = velocity_of(p)


@njit(cache=True, nogil=True)
def march(t0, h, pa, va, pb, vb, k_pin, t_plus, xb_plus, pb_plus,
          ca, cb, kappa_a, kappa_b, tol, maxit, sep_floor):
    """Single forward pass for both particles, advanced data extrapolated.

    ``pa[0], va[0]`` hold a's start state; ``pb[:k_pin+1]`` hold the pinned
    strip of b.  ``ca``/``cb`` are the tail tuples (c0, c1, clog, pinned).
    """
    n = pa.shape[0]
    big = np.inf
    xa = pa[0]
    qa = momentum_of(va[0])
    cxa = 0.0
    cqa = 0.0
    xb = xb_plus
    qb = pb_plus
    cxb = 0.0
    cqb = 0.0
    for k in range(n - 1):
        t = t0 + k * h
        t_next = t0 + (k + 1) * h
        kb_known = max(k, k_pin) + 1
        trb = (t0, h, pb, vb, cb[0], cb[1], cb[2], cb[3], kb_known, big)
        dx, dq = rk4_step(trb, t, xa, qa, t_next - t, 1.0, kappa_a, tol, maxit, sep_floor)
        xa, cxa = _kadd(xa, cxa, dx)
        qa, cqa = _kadd(qa, cqa, dq)
        pa[k + 1] = xa
        va[k + 1] = velocity_of(qa)
        if k + 1 > k_pin:
            t_from = t if t > t_plus else t_plus
            tra = (t0, h, pa, va, ca[0], ca[1], ca[2], ca[3], k + 2, big)
            step = t_next - t_from
            if step > 0.0:
                dx, dq = rk4_step(tra, t_from, xb, qb, step, -1.0, kappa_b, tol, maxit, sep_floor)
                xb, cxb = _kadd(xb, cxb, dx)
                qb, cqb = _kadd(qb, cqb, dq)
            pb[k + 1] = xb
            vb[k + 1] = velocity_of(qb)
