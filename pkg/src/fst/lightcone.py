"""Advanced and retarded times.

For a vertex on a at time t the cone times t2± solve ``s = t ± (a(t) - b(s))``;
for a vertex on b, t1± solve ``s = t ± (a(s) - b(t))``.  Both are plain
fixed-point iterations whose contraction rate is the other particle's speed.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels as K
from .trajectory import TrajectoryPair

SIGNS = {"adv": 1.0, "advanced": 1.0, "+": 1.0, "ret": -1.0, "retarded": -1.0, "-": -1.0}
TOL_CONE = 1e-12
MAX_ITER = 500


@dataclass(frozen=True)
class ConeQuery:
    source: str  # vertex particle, "a" or "b"
    sign: str    # "adv" or "ret"
    t: float

    def __post_init__(self):
        if self.source not in ("a", "b"):
            raise ValueError(f"source must be 'a' or 'b', got {self.source!r}")
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be 'adv' or 'ret', got {self.sign!r}")

    @property
    def sigma(self) -> float:
        return SIGNS[self.sign]


@dataclass(frozen=True)
class ConeResult:
    cone_time: float
    separation: float
    derivative: float
    residual: float
    iterations: int
    other_velocity: float = float("nan")


def _orient(pair: TrajectoryPair, source: str):
    if source == "a":
        return pair.a, pair.b, 1.0
    return pair.b, pair.a, -1.0


def solve_cone(pair: TrajectoryPair, q: ConeQuery, tol_cone: float = TOL_CONE,
               max_iter: int = MAX_ITER) -> ConeResult:
    own, other, d = _orient(pair, q.source)
    xv, vv = own.eval(q.t)
    s, sep, w, res, it = K.cone(other.kernel, float(q.t), xv, d, q.sigma, tol_cone, max_iter)
    sd = q.sigma * d
    # differentiate s = t + sd*(own(t) - other(s))
    deriv = (1.0 + sd * vv) / (1.0 + sd * w)
    return ConeResult(s, sep, deriv, res, it, w)


def cone_iterates(pair: TrajectoryPair, q: ConeQuery, n: int) -> list[float]:
    """The first ``n`` fixed-point iterates, seed included (for contraction checks)."""
    own, other, d = _orient(pair, q.source)
    xv, _ = own.eval(q.t)
    sd = q.sigma * d
    s = q.t + sd * (xv - other.eval(q.t)[0])
    out = [s]
    for _ in range(n - 1):
        s = q.t + sd * (xv - other.eval(s)[0])
        out.append(s)
    return out


def cone_bounds_check(pair: TrajectoryPair, res: ConeResult, t: float, V: float,
                      rtol: float = 1e-12) -> bool:
    """(a(t)-b(t))/2 <= separation <= (a(t)-b(t))/(1-V)."""
    g = pair.a.eval(t)[0] - pair.b.eval(t)[0]
    lo = 0.5 * g
    hi = g / (1.0 - V)
    return lo * (1 - rtol) <= res.separation <= hi * (1 + rtol)
