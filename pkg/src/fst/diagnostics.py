"""Numerical checks of the a-priori estimates on a family of conditional solutions.

Each estimate of the form ``|q(t)| <= C * model(t)`` is checked by fitting C
on some samples and testing the frozen C (times ``headroom``) on disjoint
samples.  With a family of solutions the even-numbered members are fitted and
the odd-numbered ones validated, so what is tested is uniformity in T.  A
single pair falls back to a split in time: fit on the half of the (log) window
next to t0, validate on the remote half.

Report layout (``schema_version`` 1)::

    {"schema_version": 1,
     "checks":    [{"name", "anchor", "window", "fitted_constants",
                    "worst_margin", "pass"}, ...],
     "constants": {"mu", "V", "D", "C_<check>", ...},
     "samples":   {"<check>": {"t": [...], "<series>": [...]}, ...}}

``worst_margin`` is positive when a check holds with room to spare.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .asymptotics import AsymptoticData, tail_coefficients
from .dynamics import force_table, residual_profile, wfint_series, integrated_velocity_residual
from .errors import EmptySamples, InsufficientFamily
from .lightcone import TOL_CONE
from .trajectory import TrajectoryPair, closed_form

SCHEMA_VERSION = 1
FREE_TOL = 1e-10  # without coupling, left sides below this are roundoff of exact zeros

MODELS = {
    "C_over_t": lambda t: 1.0 / np.abs(t),
    "C_logt_over_t": lambda t: np.log(np.abs(t)) / np.abs(t),
    "C_over_sqrt_t": lambda t: 1.0 / np.sqrt(np.abs(t)),
}


def _model(name):
    try:
        return MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


def fit_bound(samples, model: str) -> tuple[float, float]:
    """C = max value/model(t) over the samples, and the worst violation on them (0)."""
    t, v = _as_samples(samples)
    C = float(np.max(v / _model(model)(t)))
    return C, bound_violation((t, v), model, C)


def bound_violation(samples, model: str, C: float) -> float:
    """max over samples of value/(C*model(t)) - 1; positive means the bound fails."""
    t, v = _as_samples(samples)
    r = v / _model(model)(t)
    if C <= 0:
        return float("inf") if np.any(r > 0) else 0.0
    return float(np.max(r) / C - 1.0)


def _as_samples(samples):
    if isinstance(samples, tuple) and len(samples) == 2:
        t, v = (np.asarray(x, dtype=float) for x in samples)
    else:
        arr = np.asarray(list(samples), dtype=float)
        if arr.size == 0:
            raise EmptySamples("no samples to fit")
        t, v = arr[:, 0], arr[:, 1]
    if t.size == 0:
        raise EmptySamples("no samples to fit")
    if t.size < 10:
        raise EmptySamples(f"need at least 10 samples, got {t.size}")
    if np.any(np.abs(t) <= 1):
        raise ValueError("bound models need |t| > 1")
    return t, v


@dataclass
class DiagnosticsConfig:
    t0: float | None = None           # None: T0/2 for a family, T/8 for a single pair
    headroom: float = 1.25            # validation allows C_fit * headroom
    fit_fraction: float = 0.5         # single pair: share of the log-time window (next to t0) used for fitting
    samples_per_member: int = 120
    wfint_samples: int = 24
    identity_tol: float = 1e-6
    residual_tol: float = 1e-6
    residual_window: float = 1.0
    eta_stability: float = 0.2
    V_stability: float = 0.05
    ratio_factor: float = 1.5
    quad_step: float | None = None
    models: dict = field(default_factory=lambda: {
        "geschw": "C_over_t", "orte": "C_logt_over_t", "apunkt": "C_over_t",
        "eta": "C_over_t", "aterms": "C_over_sqrt_t", "a5": "C_over_t"})

    @classmethod
    def from_dict(cls, d: dict) -> DiagnosticsConfig:
        from .errors import ConfigError
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown diagnostics keys: {sorted(unknown)}")
        cfg = cls(**d)
        for k, m in cfg.models.items():
            if m not in MODELS:
                raise ConfigError(f"diagnostics model for {k!r} must be one of {sorted(MODELS)}")
        return cfg


@dataclass
class Check:
    name: str
    anchor: str
    window: list
    fitted_constants: dict
    worst_margin: float
    passed: bool

    def as_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass
class DiagnosticsReport:
    checks: list[Check]
    constants: dict
    samples: dict

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION,
                "checks": [c.as_dict() for c in self.checks],
                "constants": self.constants,
                "samples": _jsonable(self.samples)}

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, allow_nan=True)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    return x


@dataclass
class Member:
    T: float
    T_plus: float
    pair: TrajectoryPair


class _Samples:
    """(t, value, fit-flag) triples collected for one bound check."""

    def __init__(self):
        self.t, self.v, self.f = [], [], []

    def add(self, t, v, fit):
        t = np.atleast_1d(t)
        self.t.append(t)
        self.v.append(np.atleast_1d(v))
        self.f.append(np.broadcast_to(fit, t.shape))

    def arrays(self):
        return np.concatenate(self.t), np.concatenate(self.v), np.concatenate(self.f)


class _Runner:
    def __init__(self, members, data, cfg: DiagnosticsConfig, t_end, step):
        self.members, self.data, self.cfg = members, data, cfg
        self.t_end = t_end
        self.step = step
        self.quad = cfg.quad_step or step
        first = members[0]
        self.family = len(members) > 1
        # a lone pair gets a longer window: it has to supply both fit and validation data
        self.t0 = cfg.t0 if cfg.t0 is not None else first.T / (2.0 if self.family else 8.0)
        # b starts where it leaves its strip, so its window is scaled the same way
        self.t0_b = self.t0 * first.T_plus / first.T
        self.checks: list[Check] = []
        self.constants = {"mu": data.mu, "eta1": data.eta1, "eta2": data.eta2,
                          "t0": self.t0, "t0_b": self.t0_b}
        self.samples: dict = {}
        self.xa = tail_coefficients(data, "a")
        self.yb = tail_coefficients(data, "b")
        self.free = data.kappa_a == 0.0 and data.kappa_b == 0.0

    def clean(self, x):
        """Zero out roundoff when there is no interaction (strict signs become equalities)."""
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < FREE_TOL, 0.0, x) if self.free else x

    # --- sampling helpers -------------------------------------------------
    def start(self, mb, particle):
        return mb.T if particle == "a" else max(mb.T, mb.T_plus)

    def stop(self, particle):
        return self.t0 if particle == "a" else self.t0_b

    def window_times(self, mb, particle, n=None):
        lo, hi = self.start(mb, particle), self.stop(particle)
        n = n or self.cfg.samples_per_member
        if not lo < hi:
            return np.empty(0)
        return -np.geomspace(-lo, -hi, n)

    def fit_flags(self, t, i, particle):
        if self.family:
            # interleaved: each validation member sits beside fitted ones in T
            return np.full(np.shape(t), i % 2 == 0)
        # one pair: a_T - x vanishes at T and grows towards t0, so the part of the
        # window next to t0 is fitted and the remote part validated (log scale)
        lo = np.log(-self.start(self.members[0], particle))
        hi = np.log(-self.stop(particle))
        return t >= -math.exp(hi + self.cfg.fit_fraction * (lo - hi))

    def collect(self, s: _Samples, t, v, i, particle):
        s.add(t, v, self.fit_flags(t, i, particle))

    def bound(self, s: _Samples, model: str):
        t, v, fit = s.arrays()
        if not np.any(fit) or not np.any(~fit):
            raise InsufficientFamily("need disjoint fit and validation samples")
        C, _ = fit_bound((t[fit], v[fit]), model)
        viol = bound_violation((t[~fit], v[~fit]), model, C * self.cfg.headroom)
        return C, viol

    def add(self, name, anchor, window, consts, margin, passed, samples=None):
        self.checks.append(Check(name, anchor, list(window), consts, float(margin), bool(passed)))
        if samples is not None:
            self.samples[name] = samples

    # --- individual checks ------------------------------------------------
    def geschw(self):
        u, v = self.data.u_minus_inf, self.data.v_minus_inf
        s = _Samples()
        strict = np.inf
        tab = {"T": [], "t_a": [], "adot_minus_u": [], "t_b": [], "v_minus_bdot": []}
        for i, mb in enumerate(self.members):
            ta, tb = self.window_times(mb, "a"), self.window_times(mb, "b")
            da = self.clean(mb.pair.a.eval(ta)[1] - u)
            db = self.clean(v - mb.pair.b.eval(tb)[1])
            strict = min(strict, float(np.min(da, initial=np.inf)), float(np.min(db, initial=np.inf)))
            self.collect(s, ta, da, i, "a")
            self.collect(s, tb, db, i, "b")
            tab["T"].append(mb.T)
            tab["t_a"].append(ta); tab["adot_minus_u"].append(da)
            tab["t_b"].append(tb); tab["v_minus_bdot"].append(db)
        C, viol = self.bound(s, self.cfg.models["geschw"])
        self.constants["C_geschw"] = C
        strict_ok = strict >= 0 if self.free else strict > 0
        margin = min(-viol, strict)
        self.add("geschw", "velocity brackets u < a' <= u - C/t, v > b' >= v + C/t",
                 (None, self.t0), {"C": C, "validation_violation": viol}, margin,
                 strict_ok and viol <= 0, tab)

    def orte(self):
        s = _Samples()
        tab = {"T": [], "t_a": [], "a_minus_x": [], "t_b": [], "b_minus_y": []}
        for i, mb in enumerate(self.members):
            ta, tb = self.window_times(mb, "a"), self.window_times(mb, "b")
            da = self.clean(np.abs(mb.pair.a.eval(ta)[0] - closed_form(self.xa, ta)[0]))
            db = self.clean(np.abs(mb.pair.b.eval(tb)[0] - closed_form(self.yb, tb)[0]))
            self.collect(s, ta, da, i, "a")
            self.collect(s, tb, db, i, "b")
            tab["T"].append(mb.T)
            tab["t_a"].append(ta); tab["a_minus_x"].append(da)
            tab["t_b"].append(tb); tab["b_minus_y"].append(db)
        C, viol = self.bound(s, self.cfg.models["orte"])
        self.constants["C_orte"] = C
        self.add("orte", "closeness |a_T - x|, |b_T - y| < C ln|t|/|t|", (None, self.t0),
                 {"C": C, "validation_violation": viol}, -viol, viol <= 0, tab)

    def streuung(self):
        mu = self.data.mu
        worst = np.inf
        for mb in self.members:
            t = self._nodes(mb, mb.T, self.t0)
            pa, va = mb.pair.a.eval(t)
            pb, vb = mb.pair.b.eval(t)
            worst = min(worst, float(np.min((pa - pb - mu * t) / np.abs(mu * t))),
                        float(np.min((mu - (va - vb)) / abs(mu))))
        self.add("streuung", "scattering window a - b >= mu t, a' - b' <= mu",
                 (None, self.t0), {"mu": mu}, worst, worst >= 0)

    def _nodes(self, mb, lo, hi):
        t = mb.pair.a.times
        return t[(t >= lo) & (t <= hi)]

    def vd(self):
        Vs, Ds = [], []
        u, v = self.data.u_minus_inf, self.data.v_minus_inf
        for mb in self.members:
            t = self._nodes(mb, mb.T, self.t_end)
            pa, va = mb.pair.a.eval(t)
            pb, vb = mb.pair.b.eval(t)
            Vs.append(max(float(np.max(np.abs(va))), float(np.max(np.abs(vb))), abs(u), abs(v)))
            tail_t = -np.geomspace(-mb.T * 1e4, -mb.T, 200)
            gap_tail = closed_form(self.xa, tail_t)[0] - closed_form(self.yb, tail_t)[0]
            Ds.append(min(float(np.min((pa - pb) / (1 + np.abs(t)))),
                          float(np.min(gap_tail / (1 + np.abs(tail_t))))))
        V, D = max(Vs), min(Ds)
        spread = (max(Vs) - min(Vs)) / max(Vs)
        self.constants.update(V=V, D=D)
        margin = min(1 - V, D, self.cfg.V_stability - spread)
        self.add("vd", "uniform bounds |a'|,|b'| <= V < 1 and a - b >= D(1+|t|)",
                 (None, self.t_end), {"V": V, "D": D, "V_spread": spread,
                                      "V_members": Vs, "D_members": Ds},
                 margin, V < 1 and D > 0 and spread <= self.cfg.V_stability)

    def signs(self):
        worst = np.inf
        for mb in self.members:
            ta = self._nodes(mb, mb.T, self.t_end)[1:-1]
            tb = self._nodes(mb, max(mb.T, mb.T_plus), self.t_end)[1:-1]
            acc_a = force_table(mb.pair, "a", ta).acc
            acc_b = force_table(mb.pair, "b", tb).acc
            dva = np.diff(mb.pair.a.eval(ta)[1])
            dvb = np.diff(mb.pair.b.eval(tb)[1])
            worst = min(worst, float(np.min(self.clean(acc_a))), float(np.min(self.clean(-acc_b))),
                        float(np.min(self.clean(dva))), float(np.min(self.clean(-dvb))))
        self.add("signs", "a'' > 0, b'' < 0; a' increasing, b' decreasing at every node",
                 (None, self.t_end), {}, worst, worst >= 0 if self.free else worst > 0)

    def apunkt(self):
        # vertex a: cones t2± on b; vertex b: cones t1± on a
        mu = self.data.mu
        s = _Samples()
        worst_mu = np.inf
        tab = {"T": [], "t_a": [], "bdot_minus_bdot_t2p": [], "t_b": [], "adot_t1p_minus_adot": []}
        for i, mb in enumerate(self.members):
            ta, tb = self.window_times(mb, "a"), self.window_times(mb, "b")
            fa = force_table(mb.pair, "a", ta)
            fb = force_table(mb.pair, "b", tb)
            d1 = fb.w_adv - mb.pair.a.eval(tb)[1]    # a'(t1+) - a'(t)
            d2 = mb.pair.b.eval(ta)[1] - fa.w_adv    # b'(t) - b'(t2+)
            self.collect(s, tb, d1, i, "b")
            self.collect(s, ta, d2, i, "a")
            worst_mu = min(worst_mu,
                           float(np.min(mu - (fa.vel - fa.w_ret), initial=np.inf)) / abs(mu),
                           float(np.min(mu / 2 - (fa.vel - fa.w_adv), initial=np.inf)) / abs(mu / 2),
                           float(np.min(mu - (fb.w_ret - fb.vel), initial=np.inf)) / abs(mu),
                           float(np.min(mu / 2 - (fb.w_adv - fb.vel), initial=np.inf)) / abs(mu / 2))
            tab["T"].append(mb.T)
            tab["t_a"].append(ta); tab["bdot_minus_bdot_t2p"].append(d2)
            tab["t_b"].append(tb); tab["adot_t1p_minus_adot"].append(d1)
        C, viol = self.bound(s, self.cfg.models["apunkt"])
        self.constants["C_apunkt"] = C
        self.add("apunkt", "cone velocity differences: < C/|t|, <= mu, <= mu/2", (None, self.t0),
                 {"C": C, "validation_violation": viol, "mu_margin": worst_mu},
                 min(-viol, worst_mu), viol <= 0 and worst_mu >= 0, tab)

    def eta(self):
        d = self.data
        s = _Samples()
        per_member = []
        for i, mb in enumerate(self.members):
            worst = 0.0
            for particle, kappa, eta in (("a", d.kappa_a, d.eta1), ("b", d.kappa_b, d.eta2)):
                t = self.window_times(mb, particle)
                if t.size == 0:
                    continue
                ft = force_table(mb.pair, particle, t)
                for w in (ft.w_ret, ft.w_adv):
                    x = np.abs(kappa * (1 - ft.vel ** 2) ** 1.5 * (1 - w ** 2) / (ft.vel - w) ** 2 - eta)
                    self.collect(s, t, x, i, particle)
                    worst = max(worst, float(np.max(x * np.abs(t))))
            per_member.append(worst)
        C, viol = self.bound(s, self.cfg.models["eta"])
        self.constants["C_eta"] = C
        ref = float(np.median(per_member))
        spread = max(abs(c / ref - 1) for c in per_member) if ref > 0 else 0.0
        ok_stable = spread <= self.cfg.eta_stability or not self.family
        self.add("eta", "|kappa (1-a'^2)^3/2 (1-b'(t2±)^2)/(a'-b'(t2±))^2 - eta| <= C/|t|",
                 (None, self.t0), {"C": C, "validation_violation": viol,
                                   "C_members": per_member, "spread": spread},
                 min(-viol, self.cfg.eta_stability - spread) if self.family else -viol,
                 viol <= 0 and ok_stable)

    def aterms(self):
        cfg = self.cfg
        s = {n: _Samples() for n in ("A1", "A2", "A3", "A4", "A5")}
        s5 = _Samples()
        worst_id = 0.0
        tab = {"t": [], "T": [], "particle": [], **{n: [] for n in s}, "lhs": []}
        for i, mb in enumerate(self.members):
            for particle in ("a", "b"):
                start = self.start(mb, particle)
                ts = self.window_times(mb, particle, n=cfg.wfint_samples)
                if ts.size == 0:
                    continue
                terms = wfint_series(mb.pair, self.data, mb.T, ts, self.quad, particle)
                # t = start itself carries no information (all terms vanish)
                terms = [w for w in terms if w.t > start]
                tt = np.array([w.t for w in terms])
                for n in s:
                    vals = np.abs([getattr(w, n) for w in terms])
                    self.collect(s[n], tt, vals, i, particle)
                    tab[n].append(vals)
                self.collect(s5, tt, np.abs([w.A5 for w in terms]), i, particle)
                worst_id = max(worst_id, max(abs(w.identity_residual) for w in terms))
                tab["t"].append(tt); tab["T"].append(mb.T); tab["particle"].append(particle)
                tab["lhs"].append([w.lhs for w in terms])
        consts, viols = {}, []
        for n, smp in s.items():
            C, viol = self.bound(smp, cfg.models["aterms"])
            consts[n] = C
            if n == "A3" and not self.family:
                # A3 = A2(T) is constant along one pair; its decay is in T only
                consts[n + "_violation"] = None
                continue
            consts[n + "_violation"] = viol
            viols.append(viol)
        C5, viol5 = self.bound(s5, cfg.models["a5"])
        consts["A5_sharp"] = C5
        consts["A5_sharp_violation"] = viol5
        viols.append(viol5)
        consts["identity_residual"] = float(worst_id)
        consts["validation_violation"] = max(viols)
        self.constants.update({f"C_{k}": v for k, v in consts.items()
                               if k.startswith("A") and not k.endswith("violation")})
        margin = min(-max(viols), (cfg.identity_tol - worst_id) / cfg.identity_tol)
        self.add("aterms", "A1..A5 decay (C/sqrt|t|, A5 C/|t|) and the decomposition identity",
                 (None, self.t0), consts, margin, max(viols) <= 0 and worst_id <= cfg.identity_tol,
                 tab)

    def theorem_ratio(self):
        # b is pinned to y up to T+, so it is sampled at T+/2 (its own start time halved)
        rows = {"T": [], "t_a": [], "t_b": [], "ratio_a": [], "ratio_b": []}
        if self.family:
            pts = [(mb, mb.T / 2.0, mb.T_plus / 2.0) for mb in self.members]
        else:
            # one pair: anchored at t0 and stepping back in powers of two
            mb = self.members[0]
            pts, k = [], 0
            while self.t0 * 2 ** k > mb.T and self.t0_b * 2 ** k > mb.T_plus:
                pts.append((mb, self.t0 * 2 ** k, self.t0_b * 2 ** k))
                k += 1
        for mb, ta, tb in pts:
            rows["T"].append(mb.T)
            rows["t_a"].append(ta)
            rows["t_b"].append(tb)
            rows["ratio_a"].append(abs(mb.pair.a.eval(ta)[0] - closed_form(self.xa, ta)[0])
                                   * abs(ta) / math.log(abs(ta)))
            rows["ratio_b"].append(abs(mb.pair.b.eval(tb)[0] - closed_form(self.yb, tb)[0])
                                   * abs(tb) / math.log(abs(tb)))
        margins = []
        for key in ("ratio_a", "ratio_b"):
            r = self.clean(rows[key])
            if r.size == 0:
                margins.append(-np.inf)
            elif r[0] > 0:
                margins.append(1.0 - float(np.max(r)) / (self.cfg.ratio_factor * r[0]))
            else:
                margins.append(0.0 if np.all(r == 0) else -np.inf)
        margin = min(margins)
        self.add("theorem_ratio", "|a - x| |t|/ln|t| at t = T/2 (b: T+/2) within 1.5x its first value",
                 (None, None), {"first_a": rows["ratio_a"][0] if pts else None,
                                "first_b": rows["ratio_b"][0] if pts else None},
                 margin, margin >= 0 and len(pts) >= 2, rows)

    def residual(self):
        cfg = self.cfg
        worst = 0.0
        tab = {}
        for mb in self.members:
            for particle, start in (("a", mb.T), ("b", max(mb.T, mb.T_plus))):
                ends, res = residual_profile(mb.pair, particle, start, self.t_end,
                                             cfg.residual_window, self.quad)
                total = integrated_velocity_residual(mb.pair, particle, start, self.t_end, self.quad)
                worst = max(worst, float(np.max(np.abs(res))) if res.size else 0.0, abs(total))
                tab[f"{particle}:{mb.T}"] = {"t": ends, "residual": res, "total": total}
        self.constants["max_residual"] = worst
        self.add("residual", "integrated field equation v(t) - v(T) - int acc over windows and [T, t_end]",
                 (None, self.t_end), {"max_residual": worst},
                 (cfg.residual_tol - worst) / cfg.residual_tol, worst <= cfg.residual_tol, tab)

    def envelope(self):
        worst = np.inf
        for mb in self.members:
            t = self._nodes(mb, mb.T, self.t_end)[:: max(1, int(round(1.0 / self.step)))]
            t = t[np.abs(t) > 1e-9]
            fa = force_table(mb.pair, "a", t)
            bdot_t = mb.pair.b.eval(t)[1]
            g = (fa.pos - mb.pair.b.eval(t)[0]) / t
            for sg, sep, w in ((1.0, fa.sep_adv, fa.w_adv), (-1.0, fa.sep_ret, fa.w_ret)):
                lhs = t / sep
                e1 = (1 + sg * bdot_t) / g
                e2 = (1 + sg * w) / g
                lo, hi = np.minimum(e1, e2), np.maximum(e1, e2)
                tol = 1e-9 * np.abs(lhs)
                worst = min(worst, float(np.min(np.minimum(lhs - lo + tol, hi - lhs + tol) / np.abs(lhs))))
        self.add("envelope", "t/(a - b(t2±)) between (1 ± b'(t)) and (1 ± b'(t2±)) over (a-b)/t",
                 (None, self.t_end), {}, worst, worst >= 0)


ALL_CHECKS = ("geschw", "orte", "streuung", "vd", "signs", "apunkt", "eta", "aterms",
              "theorem_ratio", "residual", "envelope")


def _run(members, data, cfg, t_end, step, only):
    r = _Runner(members, data, cfg, t_end, step)
    for name in only or ALL_CHECKS:
        getattr(r, name)()
    return DiagnosticsReport(r.checks, r.constants, r.samples)


def run_all(run, data: AsymptoticData, cfg: DiagnosticsConfig | None = None,
            only=None) -> DiagnosticsReport:
    """All checks on a GlobalRun (at least two members)."""
    cfg = cfg or DiagnosticsConfig()
    if len(run.family) < 2:
        raise InsufficientFamily("run_all needs at least two family members")
    members = [Member(s.T, s.T_plus, s.pair) for s in run.family]
    return _run(members, data, cfg, run.family[0].t_end, run.family[0].pair.a.step, only)


def check_pair(pair: TrajectoryPair, data: AsymptoticData, t_end: float,
               cfg: DiagnosticsConfig | None = None, only=None) -> DiagnosticsReport:
    """All checks on one pair, with fits validated on an earlier time window instead
    of on other family members."""
    cfg = cfg or DiagnosticsConfig()
    mb = Member(pair.a.grid_start, pair.b.pinned, pair)
    return _run([mb], data, cfg, t_end, pair.a.step, only)
