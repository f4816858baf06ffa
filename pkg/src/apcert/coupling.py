"""Coupling equations between chamber points and the witness matrices.

``solve_st`` finds s, t >= 0 with

    sinh^2(2s) + sinh^2(s) = sinh^2(beta) + sinh^2(gamma)
    sinh(2t) sinh(t)       = sinh(beta) sinh(gamma)

by bisection (both left sides increase strictly).  ``solve_betagamma`` is
the closed-form inverse.  The witness constructors build explicit group
elements whose double coset is known by construction; every witness is
re-measured through the chamber recovery of :mod:`apcert.groups`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, NonConvergence, OrderViolation, OutOfRegime
from .groups import (
    DEFAULT_TOL,
    ChamberSl3,
    ChamberSp2,
    GroupMatrix,
    U2Param,
    dalpha,
    dprime,
    embed_u2_to_k,
    rot3_12,
    sl2_polar_q,
    sl3_chamber,
    sl3_dmat,
    sp2_chamber,
    v_element,
)

LOG_SWITCH = 25.0
MAX_ITER = 200
_LOG2 = math.log(2.0)
# below this the squared quantities leave the normal double range
_LOG_TINY = -600.0


def log_sinh(x: float) -> float:
    """log(sinh x) for x > 0 without overflow."""
    if x <= 0.0:
        return -math.inf
    if x < 20.0:
        return math.log(math.sinh(x))
    return x - _LOG2 + math.log1p(-math.exp(-2.0 * x))


def asinh_exp(log_x: float) -> float:
    """asinh(e^log_x) without forming e^log_x when it is large."""
    if log_x == -math.inf:
        return 0.0
    if log_x < 20.0:
        return math.asinh(math.exp(log_x))
    return log_x + math.log1p(math.sqrt(1.0 + math.exp(-2.0 * log_x)))


def _logaddexp(a: float, b: float) -> float:
    return float(np.logaddexp(a, b))


def rho(s: float) -> float:
    return math.sinh(2.0 * s) ** 2 + math.sinh(s) ** 2


def sigma(t: float) -> float:
    return 2.0 * math.sinh(2.0 * t) * math.sinh(t)


def log_rho(s: float) -> float:
    return _logaddexp(2.0 * log_sinh(2.0 * s), 2.0 * log_sinh(s))


def log_sigma(t: float) -> float:
    return _LOG2 + log_sinh(2.0 * t) + log_sinh(t)


@dataclass(frozen=True)
class CouplingSolution:
    s: float
    t: float
    residuals: tuple[float, float]
    method: str = "direct"

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "residuals": list(self.residuals), "method": self.method}


def _bisect(f, start: float) -> float:
    """Root of an increasing f on [0, inf) with f(0) <= 0."""
    lo, hi = 0.0, start
    for _ in range(64):
        v = f(hi)
        if not math.isfinite(v) and not v > 0:
            raise NonConvergence("non-finite value while bracketing")
        if v > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NonConvergence("no sign change found")
    # shrink geometrically so tiny roots are bracketed within a factor of 2
    if lo == 0.0:
        for _ in range(1100):
            if not f(0.5 * hi) > 0:
                lo = 0.5 * hi
                break
            hi *= 0.5
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    # the endpoint with the smaller residual
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), abs(a))


def solve_st(beta: float, gamma: float, method: str | None = None) -> CouplingSolution:
    """s(beta, gamma) and t(beta, gamma); relative residuals are reported.

    ``method`` is "direct", "log", or None (log form when beta > 25).  An
    equation whose right side would underflow is always solved in log form.
    """
    if not (math.isfinite(beta) and math.isfinite(gamma)):
        raise NonConvergence("non-finite input")
    if not beta >= gamma >= 0.0:
        raise OrderViolation(f"need beta >= gamma >= 0, got ({beta}, {gamma})")
    if method is None:
        method = "log" if beta > LOG_SWITCH else "direct"
    if method not in ("direct", "log"):
        raise ValueError(f"unknown method {method!r}")
    if beta == 0.0:
        return CouplingSolution(0.0, 0.0, (0.0, 0.0), method)
    # both roots lie in [0, beta]; doubling in _bisect is only a safeguard
    start = beta
    logR = _logaddexp(2.0 * log_sinh(beta), 2.0 * log_sinh(gamma))
    if method == "direct" and logR > _LOG_TINY:
        R = math.sinh(beta) ** 2 + math.sinh(gamma) ** 2
        s = _bisect(lambda x: rho(x) - R, start)
        res_s = _rel(rho(s), R)
    else:
        s = _bisect(lambda x: log_rho(x) - logR if x > 0 else -math.inf, start)
        # relative error of a quantity equals the error of its logarithm to first order
        res_s = abs(log_rho(s) - logR)
    if gamma == 0.0:
        t, res_t = 0.0, 0.0
    else:
        logP = log_sinh(beta) + log_sinh(gamma)
        if method == "direct" and logP > _LOG_TINY:
            P = math.sinh(beta) * math.sinh(gamma)
            t = _bisect(lambda x: 0.5 * sigma(x) - P, start)
            res_t = _rel(0.5 * sigma(t), P)
        else:
            t = _bisect(lambda x: log_sigma(x) - _LOG2 - logP if x > 0 else -math.inf, start)
            res_t = abs(log_sigma(t) - _LOG2 - logP)
    return CouplingSolution(s, t, (res_s, res_t), method)


def solve_betagamma(s: float, t: float) -> ChamberSp2:
    """The chamber point (beta, gamma) with the prescribed s and t.

    With x = sinh beta, y = sinh gamma: (x +- y)^2 = rho(s) +- sigma(t).
    y is taken as sigma / (2x) to avoid cancellation.
    """
    if not (math.isfinite(s) and math.isfinite(t)):
        raise ValueError("non-finite input")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if s < t:
        raise OrderViolation(f"need s >= t, got ({s}, {t})")
    if s == 0.0:
        return ChamberSp2(0.0, 0.0)
    if s <= LOG_SWITCH:
        r, g = rho(s), sigma(t)
        x = 0.5 * (math.sqrt(r + g) + math.sqrt(max(r - g, 0.0)))
        y = g / (2.0 * x)
        beta, gamma = math.asinh(x), math.asinh(y)
    else:
        lr = log_rho(s)
        ratio = math.exp(log_sigma(t) - lr) if t > 0 else 0.0
        log_x = 0.5 * lr + math.log(0.5 * (math.sqrt(1.0 + ratio) + math.sqrt(max(1.0 - ratio, 0.0))))
        log_y = log_sigma(t) - _LOG2 - log_x if t > 0 else -math.inf
        beta, gamma = asinh_exp(log_x), asinh_exp(log_y)
    return ChamberSp2(beta, min(gamma, beta))


# -- witnesses ----------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    kind: str
    alpha: float
    params: dict
    matrix: GroupMatrix
    target: ChamberSp2 | ChamberSl3
    recovered: ChamberSp2 | ChamberSl3
    membership_residual: float

    @property
    def verified(self) -> bool:
        return self.membership_residual <= 1e-7

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "params": self.params,
            "matrix": self.matrix.to_dict(),
            "target": self.target.to_dict(),
            "recovered": self.recovered.to_dict(),
            "membership_residual": self.membership_residual,
        }


def _sp2_residual(g: GroupMatrix, target: ChamberSp2, tol: float):
    got = sp2_chamber(g, tol)
    return got, max(abs(got.beta - target.beta), abs(got.gamma - target.gamma))


def circle_params(beta: float, gamma: float) -> dict:
    """alpha, r1, a1, b1 for the circle construction."""
    if not beta >= gamma >= 0.0:
        raise OrderViolation(f"need beta >= gamma >= 0, got ({beta}, {gamma})")
    if beta == 0.0:
        raise Degenerate("the origin gives alpha = 0")
    sb, sg = math.sinh(beta), math.sinh(gamma)
    h = math.hypot(sb, sg)
    alpha = 0.5 * math.asinh(h)
    r1 = min(1.0, 2.0 * (sb / h) * (sg / h))
    return {"alpha": alpha, "r1": r1, "a1": math.sqrt((1.0 + r1) / 2.0), "b1": math.sqrt((1.0 - r1) / 2.0)}


def circle_witness(beta: float, gamma: float, tol: float = DEFAULT_TOL) -> Witness:
    """D'_alpha u1 v D'_alpha with sinh^2(2 alpha) = sinh^2 beta + sinh^2 gamma."""
    p = circle_params(beta, gamma)
    a1, b1 = p["a1"], p["b1"]
    u1 = U2Param(np.diag([a1 + 1j * b1, a1 - 1j * b1]))
    d = dprime(p["alpha"])
    g = d @ embed_u2_to_k(u1) @ v_element() @ d
    target = ChamberSp2(beta, gamma)
    got, res = _sp2_residual(g, target, tol)
    params = {"r1": p["r1"], "a1": a1, "b1": b1}
    return Witness("circle", p["alpha"], params, g, target, got, res)


def hyperbola_params(beta: float, gamma: float) -> dict:
    """alpha, a1, b1 for the hyperbola construction, with the two defining equations' residuals."""
    if not beta >= gamma >= 0.0:
        raise OrderViolation(f"need beta >= gamma >= 0, got ({beta}, {gamma})")
    sb, sg = math.sinh(beta), math.sinh(gamma)
    if sb * sg == 0.0:
        raise Degenerate("sinh(beta) sinh(gamma) = 0 gives alpha = 0")
    sa = math.sqrt(2.0 * sb * sg)
    alpha = math.asinh(sa)
    s2a = 2.0 * sa * math.sqrt(1.0 + sa * sa)
    a1 = (sb - sg) / s2a
    if a1 * a1 > 0.5:
        raise OutOfRegime(f"a1^2 = {a1 * a1:.4g} exceeds 1/2")
    b1 = math.sqrt(0.5 - a1 * a1)
    eq1 = _rel(sa * sa * (1.0 - a1 * a1 - b1 * b1), sb * sg)
    eq2 = abs(s2a * a1 - (sb - sg)) / max(sb, 1.0)
    return {"alpha": alpha, "a1": a1, "b1": b1, "eq_residuals": [eq1, eq2]}


def hyperbola_witness(beta: float, gamma: float, tol: float = DEFAULT_TOL) -> Witness:
    """D_alpha u1 D_alpha with sinh beta sinh gamma = sinh^2(alpha) / 2."""
    p = hyperbola_params(beta, gamma)
    a1, b1 = p["a1"], p["b1"]
    u1 = U2Param.su2(a1, b1, 1.0 / math.sqrt(2.0), 0.0)
    d = dalpha(p["alpha"])
    g = d @ embed_u2_to_k(u1) @ d
    target = ChamberSp2(beta, gamma)
    got, res = _sp2_residual(g, target, tol)
    params = {"a1": a1, "b1": b1, "eq_residuals": p["eq_residuals"]}
    return Witness("hyperbola", p["alpha"], params, g, target, got, res)


def sl3_witness(r: float, theta: float, tol: float = DEFAULT_TOL) -> Witness:
    """D(r,0) R(theta) D(r,0), which lies in K D(2q, r-q) K."""
    if not r > 0.0:
        raise Degenerate("r must be positive")
    q = sl2_polar_q(r, theta)
    d = sl3_dmat((r, 0.0))
    g = d @ rot3_12(theta) @ d
    target = ChamberSl3(2.0 * q, r - q)
    got = sl3_chamber(g, tol)
    res = max(abs(got.s - target.s), abs(got.t - target.t))
    return Witness("sl3", r, {"q": q, "theta": theta}, g, target, got, res)
