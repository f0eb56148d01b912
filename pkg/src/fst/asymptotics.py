"""Scattering data, logarithmic asymptotes and the choice of the first cut-off time.

Particle ``"a"`` is the right-hand charge with asymptote
``x(t) = x_minus_inf + u_minus_inf*t - eta1*ln|t|``; particle ``"b"`` the left one
with ``y(t) = y_minus_inf + v_minus_inf*t + eta2*ln|t|``.  Both are defined for
``t < -1`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy.optimize import brentq

from .errors import DegenerateVelocities, DomainError, NoValidT0

PARTICLES = ("a", "b")


def compute_etas(kappa_a: float, kappa_b: float, u: float, v: float) -> tuple[float, float]:
    """Amplitudes of the logarithmic corrections of both asymptotes."""
    if not (-1.0 < u < v < 1.0):
        raise DegenerateVelocities(
            f"need -1 < u_minus_inf < v_minus_inf < 1, got u={u!r}, v={v!r}")
    if kappa_a < 0 or kappa_b < 0:
        raise ValueError("coupling constants must be non-negative")
    du2 = (u - v) ** 2
    eta1 = kappa_a * (1.0 - u * u) ** 1.5 * (1.0 - v * v) / du2
    eta2 = kappa_b * (1.0 - v * v) ** 1.5 * (1.0 - u * u) / du2
    return eta1, eta2


@dataclass(frozen=True)
class AsymptoticData:
    x_minus_inf: float
    y_minus_inf: float
    u_minus_inf: float
    v_minus_inf: float
    kappa_a: float
    kappa_b: float
    eta1: float = field(init=False)
    eta2: float = field(init=False)

    def __post_init__(self):
        e1, e2 = compute_etas(self.kappa_a, self.kappa_b, self.u_minus_inf, self.v_minus_inf)
        object.__setattr__(self, "eta1", e1)
        object.__setattr__(self, "eta2", e2)

    @property
    def mu(self) -> float:
        """Half the asymptotic relative velocity; negative."""
        return 0.5 * (self.u_minus_inf - self.v_minus_inf)

    @property
    def log_constant(self) -> float:
        """ln((u-v)^2 / (1-v^2)), the offset shared by the A2/A3 terms."""
        u, v = self.u_minus_inf, self.v_minus_inf
        return math.log((u - v) ** 2 / (1.0 - v * v))

    def mirrored(self) -> AsymptoticData:
        """Data of the reflected problem t -> t, (a, b) -> (-b, -a)."""
        return AsymptoticData(-self.y_minus_inf, -self.x_minus_inf, -self.v_minus_inf,
                              -self.u_minus_inf, self.kappa_b, self.kappa_a)

    def with_couplings(self, kappa_a: float, kappa_b: float) -> AsymptoticData:
        return replace(self, kappa_a=kappa_a, kappa_b=kappa_b)


def tail_coefficients(data: AsymptoticData, particle: str) -> tuple[float, float, float]:
    """(c0, c1, clog) with asymptote ``c0 + c1*t + clog*ln|t|``."""
    if particle == "a":
        return data.x_minus_inf, data.u_minus_inf, -data.eta1
    if particle == "b":
        return data.y_minus_inf, data.v_minus_inf, data.eta2
    raise ValueError(f"particle must be 'a' or 'b', got {particle!r}")


def asymptote_eval(data: AsymptoticData, particle: str, t: float) -> tuple[float, float, float]:
    """Position, velocity and acceleration of the asymptote at ``t < -1``."""
    if not t < -1.0:
        raise DomainError(f"asymptotes are defined for t < -1 only, got t={t!r}")
    c0, c1, cl = tail_coefficients(data, particle)
    return c0 + c1 * t + cl * math.log(-t), c1 + cl / t, -cl / (t * t)


def _closed(c, t):
    c0, c1, cl = c
    if cl == 0.0:
        return c0 + c1 * t, c1
    return c0 + c1 * t + cl * math.log(abs(t)), c1 + cl / t


def gap(data: AsymptoticData, t: float) -> float:
    """x(t) - y(t)."""
    return _closed(tail_coefficients(data, "a"), t)[0] - _closed(tail_coefficients(data, "b"), t)[0]


def strip_endpoints(data: AsymptoticData, T: float) -> tuple[float, float]:
    """(T-, T+): where b's asymptote meets the light cones of (T, x(T)).

    Raises ``DomainError`` when T+ would leave the region t < -1 on which a
    curved asymptote is defined, or where its speed would reach 1.
    """
    ca = tail_coefficients(data, "a")
    cb = tail_coefficients(data, "b")
    xT = _closed(ca, T)[0]

    def h_ret(s):
        return s - T + (xT - _closed(cb, s)[0])

    def h_adv(s):
        return s - T - (xT - _closed(cb, s)[0])

    g = xT - _closed(cb, T)[0]
    if g <= 0:
        raise DomainError("asymptotes are not ordered x > y at T")
    # retarded root lies in [T - g/(1-V), T]; y's speed only drops towards -inf
    lo = T - g
    while h_ret(lo) > 0:
        lo = T - 2 * (T - lo)
    t_minus = brentq(h_ret, lo, T, xtol=1e-14, rtol=1e-15)

    if cb[2] != 0.0:
        # y' = v + eta2/s reaches -1 at s = -eta2/(1+v)
        hi = min(-1.0, -cb[2] / (1.0 + cb[1]))
        if hi <= T or h_adv(hi) <= 0:
            raise DomainError("advanced strip endpoint leaves the asymptotic region")
    else:
        hi = T + g
        while h_adv(hi) < 0:
            hi = T + 2 * (hi - T)
    t_plus = brentq(h_adv, T, hi, xtol=1e-14, rtol=1e-15)
    return t_minus, t_plus


def _t0_ok(data: AsymptoticData, T: float, slack: float) -> bool:
    u, v, e1, e2, mu = data.u_minus_inf, data.v_minus_inf, data.eta1, data.eta2, data.mu
    # gap monotone on (-inf, T]: T left of the vertex of (u-v)t - (e1+e2)ln|t|
    if (e1 + e2) > 0 and T > (e1 + e2) / (u - v):
        return False
    if gap(data, T) <= 0:
        return False
    # |x'| is largest at T (x' increases towards T)
    if abs(u - e1 / T) >= 1:
        return False
    # scattering margins with slack; both improve monotonically as T -> -inf
    if gap(data, T) < (1 + slack) * mu * T:
        return False
    if (u - e1 / T) - (v + e2 / T) > (1 + slack) * mu:
        return False
    try:
        _, t_plus = strip_endpoints(data, T)
    except DomainError:
        return False
    # y' decreases in t, so its minimum over t' <= T+ sits at T+
    if e2 > 0 and abs(v + e2 / t_plus) >= 1:
        return False
    return True


def find_T0(data: AsymptoticData, step: float, floor: float = -1e7, slack: float = 0.1) -> float:
    """Largest grid-aligned ``T0 = k*step < -1`` valid for every T <= T0.

    Valid means: x > y and the gap is decreasing in t; |x'| < 1 on (-inf, T0];
    |y'| < 1 up to T0+; and the scattering margins x-y >= (1+slack)*mu*T,
    x'-y' <= (1+slack)*mu.  All conditions are monotone in T for the closed
    forms, so the threshold is located by integer bisection on the grid.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    k_hi = math.ceil(-1.0 / step - 1e-9) - 1
    k_lo = math.floor(floor / step)
    if k_lo > k_hi or not _t0_ok(data, k_lo * step, slack):
        raise NoValidT0(f"no admissible T0 above floor {floor}")
    if _t0_ok(data, k_hi * step, slack):
        return k_hi * step
    while k_hi - k_lo > 1:
        mid = (k_hi + k_lo) // 2
        if _t0_ok(data, mid * step, slack):
            k_lo = mid
        else:
            k_hi = mid
    return k_lo * step
