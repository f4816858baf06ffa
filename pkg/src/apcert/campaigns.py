"""Grid campaigns: every numerically checkable inequality, with margins.

Each campaign is a list of work units.  Units are fixed by the grid spec and
the seed, never by the worker count, and partial results are merged in unit
order, so reports do not depend on how the work is split.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import certify, coupling, gelfand, groups, orthopoly
from .errors import UnknownLemma

MAX_LISTED_VIOLATIONS = 50


@dataclass
class LemmaReport:
    lemma_id: str
    grid_spec: dict
    worst_margin: float | None
    argmin_location: dict | None
    violations: list
    violation_count: int
    checks: int
    seed: int
    prng: str = groups.PRNG_ALGORITHM
    details: dict = field(default_factory=dict)
    elapsed_s: float | None = None

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "lemma_id": self.lemma_id,
            "grid_spec": self.grid_spec,
            "worst_margin": self.worst_margin,
            "argmin_location": self.argmin_location,
            "violations": self.violations,
            "violation_count": self.violation_count,
            "checks": self.checks,
            "seed": self.seed,
            "prng": self.prng,
            "details": self.details,
        }
        if timing:
            d["elapsed_s"] = self.elapsed_s
        return d


class _Acc:
    """Running min-merge of margins."""

    def __init__(self):
        self.worst = None
        self.where = None
        self.violations = []
        self.count = 0
        self.checks = 0
        self.details = {}

    def add(self, name: str, margins, locate):
        """``margins`` is an array; ``locate(i)`` describes flat index i."""
        m = np.asarray(margins, dtype=float).ravel()
        if m.size == 0:
            return
        self.checks += m.size
        bad = np.flatnonzero(~(m >= 0.0))
        self.count += bad.size
        for i in bad[: max(0, MAX_LISTED_VIOLATIONS - len(self.violations))]:
            self.violations.append({"check": name, "margin": float(m[i]), "location": locate(int(i))})
        finite = np.where(np.isnan(m), -np.inf, m)
        i = int(np.argmin(finite))
        if self.worst is None or finite[i] < self.worst:
            self.worst = float(finite[i])
            self.where = {"check": name, **locate(i)}
        det = self.details.setdefault(name, {"checks": 0, "worst_margin": None})
        det["checks"] += m.size
        det["worst_margin"] = float(finite[i]) if det["worst_margin"] is None else min(det["worst_margin"], float(finite[i]))

    def add_scalar(self, name: str, margin: float, location: dict):
        self.add(name, [margin], lambda i: location)

    def merge(self, other: "_Acc"):
        self.checks += other.checks
        self.count += other.count
        room = MAX_LISTED_VIOLATIONS - len(self.violations)
        self.violations.extend(other.violations[: max(0, room)])
        if other.worst is not None and (self.worst is None or other.worst < self.worst):
            self.worst, self.where = other.worst, other.where
        for k, v in other.details.items():
            if "checks" not in v:
                self.details[k] = v
                continue
            d = self.details.setdefault(k, {"checks": 0, "worst_margin": None})
            d["checks"] += v["checks"]
            if v["worst_margin"] is not None:
                d["worst_margin"] = v["worst_margin"] if d["worst_margin"] is None else min(d["worst_margin"], v["worst_margin"])
            for key, val in v.items():
                if key not in ("checks", "worst_margin"):
                    d[key] = val


def _sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


# -- per-lemma units ----------------------------------------------------------


def _unit_kakeqs(spec, seed, lo, hi):
    acc = _Acc()
    tol = spec["tol"]
    bmax = spec["beta_max"]
    errs = np.empty(hi - lo)
    locs = []
    for j, i in enumerate(range(lo, hi)):
        rng = _sample_rng(seed, i)
        b, g = sorted(rng.uniform(0.0, bmax, 2), reverse=True)
        k1, k2 = groups.random_k(rng), groups.random_k(rng)
        c = groups.sp2_chamber(k1 @ groups.dmat_sp2((b, g)) @ k2)
        errs[j] = max(abs(c.beta - b), abs(c.gamma - g))
        locs.append({"sample": i, "beta": float(b), "gamma": float(g)})
    acc.add("sp2_recovery", tol - errs, lambda i: locs[i])
    return acc


def _unit_kakeqs_sl3(spec, seed, lo, hi):
    acc = _Acc()
    errs = np.empty(hi - lo)
    locs = []
    for j, i in enumerate(range(lo, hi)):
        rng = _sample_rng(seed + 1, i)
        s, t = rng.uniform(0.0, spec["sl3_max"], 2)
        k1, k2 = groups.random_so3(rng), groups.random_so3(rng)
        c = groups.sl3_chamber(k1 @ groups.sl3_dmat((s, t)) @ k2)
        errs[j] = max(abs(c.s - s), abs(c.t - t))
        locs.append({"sample": i, "s": float(s), "t": float(t)})
    acc.add("sl3_recovery", spec["tol"] - errs, lambda i: locs[i])
    return acc


def _unit_legendre_oracle(spec, seed, lo, hi):
    acc = _Acc()
    x = np.linspace(-1.0, 1.0, spec["points"])
    tab = orthopoly.legendre_table(hi, x)
    for n in range(lo, hi + 1):
        diff = np.abs(tab[n] - orthopoly.legendre_integral_oracle(n, x))
        acc.add("recurrence_vs_integral", spec["tol"] - diff, lambda i, n=n: {"n": n, "x": float(x[i])})
    return acc


def _unit_jacobi_oracle(spec, seed, lo, hi):
    acc = _Acc()
    xs = [-1.0, -0.75, -0.5, -0.125, 0.0, 0.25, 0.5, 0.875, 1.0]
    for b in range(lo, hi + 1):
        tab = orthopoly.jacobi_table(spec["jacobi_n"], [b], np.array(xs))[:, 0]
        for n in range(spec["jacobi_n"] + 1):
            exact = np.array([orthopoly.jacobi_sum_oracle(n, b, x) for x in xs])
            err = np.abs(tab[n] - exact) / np.maximum(1.0, np.abs(exact))
            acc.add("jacobi_vs_exact_sum", 1e-12 - err, lambda i, n=n, b=b: {"n": n, "b": b, "x": xs[i]})
    return acc


def _unit_lpestimates(spec, seed, lo, hi):
    acc = _Acc()
    x = np.linspace(-0.5, 0.5, spec["points"])
    dist = 4.0 * np.sqrt(np.abs(x[:, None] - x[None, :]))
    tab = orthopoly.legendre_table(hi, x)
    one_m = 1.0 - x * x
    for n in range(max(lo, 0), hi + 1):
        p = tab[n]
        margin = dist - np.abs(p[:, None] - p[None, :])
        k = x.size
        acc.add("holder_1/2", margin, lambda i, n=n: {"n": n, "x": float(x[i // k]), "y": float(x[i % k])})
        if n >= 2:
            acc.add("sup_2/sqrt(n)", 2.0 / math.sqrt(n) - np.abs(p), lambda i, n=n: {"n": n, "x": float(x[i])})
            dp = n * (tab[n - 1] - x * p) / one_m
            acc.add("derivative_4sqrt(n)", 4.0 * math.sqrt(n) - np.abs(dp), lambda i, n=n: {"n": n, "x": float(x[i])})
    return acc


def _unit_hs(spec, seed, lo, hi):
    acc = _Acc()
    n_max, b_max, grid = spec["n_max"], spec["beta_max"], spec["theta_grid"]
    e1 = orthopoly.hs_constant_estimate(n_max, b_max, grid)
    e2 = orthopoly.hs_constant_estimate(n_max, b_max, 2 * grid)
    rel = abs(e2.c_hat - e1.c_hat) / e1.c_hat
    acc.add_scalar("c_hat_doubling_stability", 0.01 - rel, {"c_hat": e1.c_hat, "c_hat_doubled": e2.c_hat})
    acc.add_scalar("c_hat_monotone", e2.c_hat - e1.c_hat, {"theta_grid": grid})
    acc.add_scalar("c_hat_finite", 1.0 if math.isfinite(e1.c_hat) else -1.0, {})
    h = orthopoly.h_at_inv_sqrt2(spec["pq_max"])
    keys = sorted(h)
    vals = np.array([h[k] for k in keys])
    weights = np.array([(p + q + 1) ** -0.25 for p, q in keys])
    acc.add("h(1/sqrt2)<=c_hat(p+q+1)^(-1/4)", e1.c_hat * weights - vals, lambda i: {"p": keys[i][0], "q": keys[i][1]})
    acc.details["estimate"] = {"c_hat": e1.c_hat, "c_hat_doubled": e2.c_hat, "argmax": e1.to_dict()}
    return acc


def _c_tilde(spec):
    c_hat = spec.get("c_hat")
    if c_hat is None:
        c_hat = certify.default_c_hat()[0]
    return 2.0**0.75 * c_hat


def _unit_hoelder_single(spec, seed, lo, hi):
    """Single spherical functions with p - q in [lo, hi].

    On the circle |z| = 1/sqrt2 every h_{p,q} equals e^{i(p-q)theta}
    h_{p,q}(1/sqrt2), so a pair of grid angles only enters through j1 - j2.
    """
    acc = _Acc()
    c_tilde = _c_tilde(spec)
    m = spec["theta_points"]
    k = np.arange(1, m)
    dtheta = 2.0 * math.pi * k / m
    rhs = c_tilde * dtheta**0.25
    best = {}
    for key, v in orthopoly.h_at_inv_sqrt2(spec["pq_max"]).items():
        d = key[0] - key[1]
        if lo <= d <= hi and (d not in best or abs(v) > best[d][0]):
            best[d] = (abs(v), key)
    for d in sorted(best):
        amp, key = best[d]
        lhs = amp * np.abs(np.exp(1j * d * dtheta) - 1.0)
        acc.add("single_h", rhs - lhs, lambda i, key=key: {"p": key[0], "q": key[1], "dtheta": float(dtheta[i])})
    return acc


def _unit_hoelder_random(spec, seed, lo, hi):
    acc = _Acc()
    c_tilde = _c_tilde(spec)
    m = spec["theta_points"]
    thetas = 2.0 * math.pi * np.arange(m) / m
    for i in range(lo, hi):
        mult = gelfand.random_multiplier("U2_U1", spec["degree"], _sample_rng(seed, i), l1=1.0)
        worst, where = gelfand.holder_grid_u2u1(mult, thetas, c_tilde)
        acc.add_scalar("random_u2u1", worst, {"multiplier": i, "theta1": where[0], "theta2": where[1]})
    rs = np.linspace(-0.5, 0.5, spec["r_points"])
    for i in range(lo, hi):
        mult = gelfand.random_multiplier("SU2_SO2", spec["legendre_degree"], _sample_rng(seed + 7, i), l1=1.0)
        worst, where = gelfand.holder_grid_su2so2(mult, rs)
        acc.add_scalar("random_su2so2", worst, {"multiplier": i, "r1": where[0], "r2": where[1]})
    return acc


def _unit_hoelder_direct(spec, seed, lo, hi):
    """Direct evaluation of sampled single h_{p,q} through the certifier."""
    acc = _Acc()
    c_tilde = _c_tilde(spec)
    m = spec["theta_points"]
    thetas = 2.0 * math.pi * np.arange(m) / m
    for i in range(lo, hi):
        rng = _sample_rng(seed + 3, i)
        total = int(rng.integers(0, spec["pq_max"] + 1))
        p = int(rng.integers(0, total + 1))
        mult = gelfand.CompactMultiplier("U2_U1", {(p, total - p): 1.0})
        worst, where = gelfand.holder_grid_u2u1(mult, thetas, c_tilde)
        acc.add_scalar("direct_single_h", worst, {"p": p, "q": total - p, "theta1": where[0], "theta2": where[1]})
    return acc


def _fe_so3(n_max, x, y, nodes):
    phi = 2.0 * math.pi * np.arange(nodes) / nodes
    vals = np.array([(x @ groups.rot3_23(f) @ y).entries[0, 0] for f in phi])
    lhs = orthopoly.legendre_table(n_max, np.clip(vals, -1, 1)).mean(axis=1)
    rhs = orthopoly.legendre_table(n_max, np.array([x.entries[0, 0], y.entries[0, 0]]))
    return lhs - rhs[:, 0] * rhs[:, 1]


def _su2_r(u):
    return u[0, 0].real ** 2 - u[0, 0].imag ** 2 + u[1, 0].real ** 2 - u[1, 0].imag ** 2


def _fe_su2(n_max, x, y, nodes):
    phi = 2.0 * math.pi * np.arange(nodes) / nodes
    c, s = np.cos(phi), np.sin(phi)
    k = np.zeros((nodes, 2, 2))
    k[:, 0, 0], k[:, 0, 1], k[:, 1, 0], k[:, 1, 1] = c, -s, s, c
    prod = x.matrix[None] @ k @ y.matrix[None]
    vals = prod[:, 0, 0].real ** 2 - prod[:, 0, 0].imag ** 2 + prod[:, 1, 0].real ** 2 - prod[:, 1, 0].imag ** 2
    lhs = orthopoly.legendre_table(n_max, np.clip(vals, -1, 1)).mean(axis=1)
    rhs = orthopoly.legendre_table(n_max, np.array([_su2_r(x.matrix), _su2_r(y.matrix)]))
    return lhs - rhs[:, 0] * rhs[:, 1]


def _fe_u2(pq_max, x, y, nodes):
    phi = 2.0 * math.pi * np.arange(nodes) / nodes
    w = np.exp(1j * phi)
    z = x.matrix[0, 0] * y.matrix[0, 0] + x.matrix[0, 1] * w * y.matrix[1, 0]
    out = []
    for total in range(pq_max + 1):
        for p in range(total + 1):
            q = total - p
            lhs = np.mean(orthopoly.spherical_u2u1(p, q, z))
            rhs = orthopoly.spherical_u2u1(p, q, x.matrix[0, 0]) * orthopoly.spherical_u2u1(p, q, y.matrix[0, 0])
            out.append(abs(lhs - rhs))
    return np.array(out)


def _unit_functional_equation(spec, seed, lo, hi):
    acc = _Acc()
    n_max, nodes, tol = spec["n_max"], spec["nodes"], spec["tol"]
    for i in range(lo, hi):
        rng = _sample_rng(seed, i)
        x, y = groups.random_so3(rng), groups.random_so3(rng)
        err = np.abs(_fe_so3(n_max, x, y, nodes))
        acc.add("SO3_SO2", tol - err, lambda n, i=i: {"pair": i, "n": n})
        ux, uy = groups.random_su2(rng), groups.random_su2(rng)
        err = np.abs(_fe_su2(n_max, ux, uy, nodes))
        acc.add("SU2_SO2", tol - err, lambda n, i=i: {"pair": i, "n": n})
        if i < spec["u2_pairs"]:
            vx, vy = groups.random_u2(rng), groups.random_u2(rng)
            err = _fe_u2(spec["u2_pq_max"], vx, vy, nodes)
            acc.add("U2_U1", tol - err, lambda k, i=i: {"pair": i, "index": k})
    return acc


def _unit_betagamma(spec, seed, lo, hi):
    acc = _Acc()
    tol = spec["tol"]
    # round trip over 0 <= t <= s <= st_max
    grid = np.linspace(0.0, spec["st_max"], spec["st_points"])
    for s in grid[lo:hi]:
        for t in grid[grid <= s]:
            c = coupling.solve_betagamma(float(s), float(t))
            sol = coupling.solve_st(c.beta, c.gamma)
            err = max(abs(sol.s - s), abs(sol.t - t))
            acc.add_scalar("round_trip", tol - err, {"s": float(s), "t": float(t)})
    # lower bounds and residuals over beta, gamma <= bg_max
    bg = np.linspace(0.0, spec["bg_max"], spec["bg_points"])
    for b in bg[lo * len(bg) // spec["st_points"] : hi * len(bg) // spec["st_points"]]:
        prev = None
        for g in bg[bg <= b]:
            sol = coupling.solve_st(float(b), float(g))
            loc = {"beta": float(b), "gamma": float(g)}
            acc.add_scalar("s>=beta/4", sol.s - b / 4.0, loc)
            acc.add_scalar("t>=gamma/2", sol.t - g / 2.0, loc)
            acc.add_scalar("residual", tol - max(sol.residuals), loc)
            if prev is not None:
                acc.add_scalar("monotone_in_gamma", min(sol.s - prev.s, sol.t - prev.t), loc)
            prev = sol
    # window bounds on 1 <= t <= s <= 1.5 t, t <= t_max
    tw = np.linspace(1.0, spec["window_t_max"], spec["window_points"])
    for t in tw[lo * len(tw) // spec["st_points"] : hi * len(tw) // spec["st_points"]]:
        for s in np.linspace(t, 1.5 * t, spec["window_points"] // 4 + 2):
            c = coupling.solve_betagamma(float(s), float(t))
            loc = {"s": float(s), "t": float(t)}
            acc.add_scalar("|beta-2s|<=1", 1.0 - abs(c.beta - 2 * s), loc)
            acc.add_scalar("|gamma+2s-3t|<=1", 1.0 - abs(c.gamma + 2 * s - 3 * t), loc)
    return acc


def _unit_betagamma_extra(spec, seed, lo, hi):
    acc = _Acc()
    # monotonicity in beta along columns
    bg = np.linspace(0.0, spec["bg_max"], spec["bg_points"])
    for g in bg:
        prev = None
        for b in bg[bg >= g]:
            sol = coupling.solve_st(float(b), float(g))
            if prev is not None:
                acc.add_scalar("monotone_in_beta", min(sol.s - prev.s, sol.t - prev.t), {"beta": float(b), "gamma": float(g)})
            prev = sol
    # agreement of direct and logarithmic forms at the switchover
    for g in np.linspace(0.0, coupling.LOG_SWITCH, 11):
        d = coupling.solve_st(coupling.LOG_SWITCH, float(g), "direct")
        lg = coupling.solve_st(coupling.LOG_SWITCH, float(g), "log")
        acc.add_scalar("log_switch_agreement", spec["tol"] - max(abs(d.s - lg.s), abs(d.t - lg.t)), {"gamma": float(g)})
    return acc


def _unit_witnesses(spec, seed, lo, hi):
    acc = _Acc()
    tol = spec["tol"]
    cg = np.linspace(0.0, spec["circle_beta_max"], spec["circle_points"])
    for b in cg[lo * len(cg) // 4 : hi * len(cg) // 4]:
        for g in cg[cg <= b]:
            if b == 0.0:
                continue
            w = coupling.circle_witness(float(b), float(g))
            acc.add_scalar("circle", tol - w.membership_residual, {"beta": float(b), "gamma": float(g)})
    hg = np.linspace(2.0, spec["hyperbola_beta_max"], spec["hyperbola_points"])
    for b in hg[lo * len(hg) // 4 : hi * len(hg) // 4]:
        for g in hg[hg <= b]:
            w = coupling.hyperbola_witness(float(b), float(g))
            loc = {"beta": float(b), "gamma": float(g)}
            acc.add_scalar("hyperbola", tol - w.membership_residual, loc)
            acc.add_scalar("hyperbola_equations", 1e-10 - max(w.params["eq_residuals"]), loc)
    rs = np.linspace(spec["sl3_r_max"] / spec["sl3_r_points"], spec["sl3_r_max"], spec["sl3_r_points"])
    ths = np.linspace(0.0, 2.0 * math.pi, spec["sl3_theta_points"])
    for r in rs[lo * len(rs) // 4 : hi * len(rs) // 4]:
        for th in ths:
            w = coupling.sl3_witness(float(r), float(th))
            acc.add_scalar("sl3", tol - w.membership_residual, {"r": float(r), "theta": float(th)})
    return acc


def _chain_acc(acc, report, loc):
    for c in report.checks:
        if c.applicable:
            acc.add_scalar(c.name, c.margin, loc)


def _unit_scalar_chains(spec, seed, lo, hi):
    acc = _Acc()
    bg = np.linspace(0.0, spec["bg_max"], spec["bg_points"])
    for b in bg[lo * len(bg) // 4 : hi * len(bg) // 4]:
        for g in bg[bg <= b]:
            r = certify.scalar_chain_check(float(b), float(g))
            _chain_acc(acc, r, {"beta": float(b), "gamma": float(g)})
    st = np.linspace(0.0, spec["st_max"], spec["st_points"])
    for s in st[lo * len(st) // 4 : hi * len(st) // 4]:
        for t in st[st <= s]:
            r = certify.st_chain_check(float(s), float(t))
            _chain_acc(acc, r, {"s": float(s), "t": float(t)})
    return acc


def _unit_limit(spec, seed, lo, hi):
    acc = _Acc()
    r = certify.limit_series_check(spec["t_min"], spec["t_max"], spec["samples"], spec["n_max"])
    acc.add_scalar("partial_sum<=bound", r.worst_relative_margin, r.argmin)
    acc.add_scalar("no_negative_partial_sums", 0.0 if not r.negative else -float(len(r.negative)), {})
    acc.add_scalar("tightness", 1e-10 - r.tightness, {"n": r.n_max})
    acc.add_scalar("float_cross_check", 1e-12 - r.float_agreement, {})
    return acc


def _unit_constants(spec, seed, lo, hi):
    acc = _Acc()
    c_hat = spec.get("c_hat")
    ledger = certify.default_ledger(c_hat)
    for name, err in ledger.discrepancies().items():
        acc.add_scalar(f"recompute:{name}", spec["tol"] - err, {"constant": name})
    # explicit published values
    acc.add_scalar("C3=4sqrt2", spec["tol"] - abs(ledger["C3"] - 4.0 * math.sqrt(2.0)), {})
    acc.add_scalar("C5p/C5", spec["tol"] - abs(ledger["C5p"] / ledger["C5"] - 1.0 / (1.0 - math.exp(-1.0 / 16.0))), {})
    cert = certify.sl3_decay_bound(0.0, 0.0, 1.0)
    acc.add_scalar("sl3_final_bound=120", 0.0 if cert.final_bound == 120.0 else -1.0, {"value": cert.final_bound})
    acc.add_scalar("sl3_rate=1/12", 0.0 if cert.extras["decay_rate"] == 1.0 / 12.0 else -1.0, {})
    for s, t in [(0, 0), (12, 0), (3, 5), (30, 30)]:
        c = certify.sl3_decay_bound(float(s), float(t), 1.0)
        acc.add_scalar("sl3_pre<=final", c.final_bound - c.extras["pre_bound"], {"s": s, "t": t})
    sp = certify.sp2_decay_bound(0.0, 0.0, 1.0, ledger)
    acc.add_scalar("sp2_origin=C1", spec["tol"] - abs(sp.final_bound - ledger["C1_sp2"]), {})
    for b, g in [(0, 0), (5, 1), (10, 7), (64, 0), (100, 60)]:
        c = certify.sp2_decay_bound(float(b), float(g), 1.0, ledger)
        loc = {"beta": b, "gamma": g}
        acc.add_scalar("steps_sum=final", 1e-12 * c.final_bound - abs(sum(x.value for x in c.steps) - c.final_bound), loc)
        for x in c.steps:
            acc.add_scalar("lemma_value<=step_value", x.value - x.lemma_value, {**loc, "lemma": x.lemma})
        acc.add_scalar("final<=alpha_norm_form", c.extras["alpha_norm_bound"] - c.final_bound, loc)
    acc.details["ledger"] = ledger.to_dict()
    return acc


@dataclass(frozen=True)
class Campaign:
    lemma_id: str
    units: tuple
    full: dict
    quick: dict


def _ranges(total, parts):
    edges = np.linspace(0, total, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _units(lemma_id: str, spec: dict):
    if lemma_id == "kakeqs":
        u = [(_unit_kakeqs, a, b) for a, b in _ranges(spec["samples"], 10)]
        return u + [(_unit_kakeqs_sl3, a, b) for a, b in _ranges(spec["sl3_samples"], 2)]
    if lemma_id == "legendre_oracle":
        u = [(_unit_legendre_oracle, a, b - 1) for a, b in _ranges(spec["n_max"] + 1, 4)]
        return u + [(_unit_jacobi_oracle, a, b - 1) for a, b in _ranges(spec["jacobi_b"] + 1, 2)]
    if lemma_id == "lpestimates":
        return [(_unit_lpestimates, a, b - 1) for a, b in _ranges(spec["n_max"] + 1, 8)]
    if lemma_id == "hs":
        return [(_unit_hs, 0, 0)]
    if lemma_id == "hoelder":
        pq = spec["pq_max"]
        u = [(_unit_hoelder_single, a - pq, b - 1 - pq) for a, b in _ranges(2 * pq + 1, 4)]
        u += [(_unit_hoelder_random, a, b) for a, b in _ranges(spec["multipliers"], 4)]
        return u + [(_unit_hoelder_direct, a, b) for a, b in _ranges(spec["direct_samples"], 2)]
    if lemma_id == "functional_equation":
        return [(_unit_functional_equation, a, b) for a, b in _ranges(spec["pairs"], 4)]
    if lemma_id == "betagamma":
        return [(_unit_betagamma, a, b) for a, b in _ranges(spec["st_points"], 4)] + [(_unit_betagamma_extra, 0, 0)]
    if lemma_id == "witnesses":
        return [(_unit_witnesses, a, a + 1) for a in range(4)]
    if lemma_id == "scalar_chains":
        return [(_unit_scalar_chains, a, a + 1) for a in range(4)]
    if lemma_id == "limit":
        return [(_unit_limit, 0, 0)]
    if lemma_id == "constants":
        return [(_unit_constants, 0, 0)]
    raise UnknownLemma(lemma_id)


FULL_GRIDS = {
    "kakeqs": {"samples": 10_000, "beta_max": 12.0, "tol": 1e-6, "sl3_samples": 1000, "sl3_max": 10.0},
    "legendre_oracle": {"n_max": 60, "points": 200, "tol": 1e-9, "jacobi_n": 12, "jacobi_b": 12},
    "lpestimates": {"n_max": 2000, "points": 400},
    "hs": {"n_max": 200, "beta_max": 200, "theta_grid": 4096, "pq_max": 400},
    "hoelder": {"pq_max": 300, "theta_points": 256, "multipliers": 32, "degree": 50,
                "legendre_degree": 200, "r_points": 400, "direct_samples": 64},
    "functional_equation": {"n_max": 30, "pairs": 100, "nodes": 512, "tol": 1e-8, "u2_pairs": 10, "u2_pq_max": 12},
    "betagamma": {"tol": 1e-10, "st_max": 15.0, "st_points": 61, "bg_max": 20.0, "bg_points": 81,
                  "window_t_max": 15.0, "window_points": 57},
    "witnesses": {"tol": 1e-7, "circle_beta_max": 20.0, "circle_points": 41, "hyperbola_beta_max": 30.0,
                  "hyperbola_points": 57, "sl3_r_max": 10.0, "sl3_r_points": 50, "sl3_theta_points": 64},
    "scalar_chains": {"bg_max": 40.0, "bg_points": 41, "st_max": 30.0, "st_points": 61},
    "limit": {"t_min": 5.0, "t_max": 60.0, "samples": 16, "n_max": 10_000},
    "constants": {"tol": 1e-14},
}

QUICK_GRIDS = {
    "kakeqs": {"samples": 1000, "sl3_samples": 200},
    "legendre_oracle": {"n_max": 30, "points": 50, "jacobi_n": 6, "jacobi_b": 6},
    "lpestimates": {"n_max": 300, "points": 120},
    "hs": {"n_max": 60, "beta_max": 60, "theta_grid": 1024, "pq_max": 120},
    "hoelder": {"pq_max": 80, "theta_points": 64, "multipliers": 8, "degree": 20,
                "legendre_degree": 50, "r_points": 100, "direct_samples": 8},
    "functional_equation": {"n_max": 12, "pairs": 20, "nodes": 128, "u2_pairs": 3, "u2_pq_max": 6},
    "betagamma": {"st_points": 21, "bg_points": 21, "window_points": 21},
    "witnesses": {"circle_points": 15, "hyperbola_points": 15, "sl3_r_points": 10, "sl3_theta_points": 16},
    "scalar_chains": {"bg_points": 17, "st_points": 21},
    "limit": {"samples": 4, "n_max": 2000},
    "constants": {},
}

LEMMA_IDS = tuple(FULL_GRIDS)


def grid_for(lemma_id: str, quick: bool = False, overrides: dict | None = None) -> dict:
    if lemma_id not in FULL_GRIDS:
        raise UnknownLemma(lemma_id)
    spec = dict(FULL_GRIDS[lemma_id])
    if quick:
        spec.update(QUICK_GRIDS[lemma_id])
    if overrides:
        unknown = set(overrides) - set(spec) - {"c_hat"}
        if unknown:
            raise ValueError(f"unknown grid keys for {lemma_id}: {sorted(unknown)}")
        spec.update(overrides)
    return spec


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("APCERT_JOBS", "1")))
    except ValueError:
        return 1


def _run_unit(args):
    fn, spec, seed, lo, hi = args
    return fn(spec, seed, lo, hi)


def run_campaign(lemma_id: str, grid_spec: dict | None = None, seed: int = 0, quick: bool = False,
                 jobs: int | None = None) -> LemmaReport:
    """Run one campaign; ``grid_spec`` overrides entries of the default grid."""
    spec = grid_for(lemma_id, quick, grid_spec)
    units = _units(lemma_id, spec)
    jobs = default_jobs() if jobs is None else max(1, jobs)
    t0 = time.perf_counter()
    tasks = [(fn, spec, seed, lo, hi) for fn, lo, hi in units]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_run_unit, tasks))
    else:
        parts = [_run_unit(t) for t in tasks]
    acc = _Acc()
    for p in parts:
        acc.merge(p)
    return LemmaReport(
        lemma_id, spec, acc.worst, acc.where, acc.violations, acc.count, acc.checks, seed,
        details=acc.details, elapsed_s=round(time.perf_counter() - t0, 3),
    )


def run_all(seed: int = 0, quick: bool = False, jobs: int | None = None) -> list:
    return [run_campaign(lid, None, seed, quick, jobs) for lid in LEMMA_IDS]
