"""Bi-invariant multipliers on the three compact Gelfand pairs.

A multiplier is stored through its spherical coefficients; its l1 norm is the
quantity every Hoelder bound is scaled by.  Functions on the big groups are
modelled by :class:`SyntheticGMultiplier`, which only knows the value on each
double coset.  Its cb-multiplier norm is not modelled.
"""

from __future__ import annotations

import functools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DegreeTooHigh, DomainError, MembershipError
from .groups import (
    DEFAULT_TOL,
    ChamberSl3,
    ChamberSp2,
    GroupMatrix,
    _rng,
    check_membership,
    dalpha,
    dprime,
    random_su2,
    random_u2,
    sl3_chamber,
    sl3_dmat,
    sp2_chamber,
    v_element,
)
from .orthopoly import PAIR_IDS, jacobi_table, legendre_table


@dataclass(frozen=True)
class CompactMultiplier:
    """Finite spherical expansion on a compact Gelfand pair.

    Keys are ``(p, q)`` tuples for U2_U1 and integers ``n`` otherwise.
    """

    pair_id: str
    coefficients: Mapping

    def __post_init__(self):
        if self.pair_id not in PAIR_IDS:
            raise ValueError(f"unknown pair {self.pair_id!r}")
        coeffs = {}
        for key, c in dict(self.coefficients).items():
            if self.pair_id == "U2_U1":
                p, q = (int(k) for k in key)
                if p < 0 or q < 0:
                    raise ValueError("negative spherical index")
                key = (p, q)
            else:
                key = int(key)
                if key < 0:
                    raise ValueError("negative spherical index")
            coeffs[key] = coeffs.get(key, 0) + complex(c)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def l1_norm(self) -> float:
        return math.fsum(abs(c) for c in self.coefficients.values())

    @property
    def degree(self) -> int:
        if not self.coefficients:
            return 0
        if self.pair_id == "U2_U1":
            return max(p + q for p, q in self.coefficients)
        return max(self.coefficients)

    def to_dict(self) -> dict:
        rows = []
        for key in sorted(self.coefficients):
            c = self.coefficients[key]
            row = {"p": key[0], "q": key[1]} if self.pair_id == "U2_U1" else {"n": key}
            row.update(re=c.real, im=c.imag)
            rows.append(row)
        return {"pair_id": self.pair_id, "coefficients": rows, "l1_norm": self.l1_norm}

    @classmethod
    def from_dict(cls, d: dict) -> "CompactMultiplier":
        pair = d["pair_id"]
        coeffs = {}
        for row in d["coefficients"]:
            key = (row["p"], row["q"]) if pair == "U2_U1" else row["n"]
            coeffs[key] = complex(row.get("re", 0.0), row.get("im", 0.0))
        return cls(pair, coeffs)


@dataclass(frozen=True)
class CertLine:
    lhs: float
    rhs: float
    margin: float
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "inputs": self.inputs}


def random_multiplier(pair_id: str, degree: int, seed, l1: float = 1.0) -> CompactMultiplier:
    """Gaussian complex coefficients up to ``degree``, rescaled to the given l1 norm."""
    rng = _rng(seed)
    if pair_id == "U2_U1":
        keys = [(p, s - p) for s in range(degree + 1) for p in range(s + 1)]
    else:
        keys = list(range(degree + 1))
    c = rng.standard_normal(len(keys)) + 1j * rng.standard_normal(len(keys))
    c *= l1 / np.sum(np.abs(c))
    return CompactMultiplier(pair_id, dict(zip(keys, c)))


# -- evaluation ---------------------------------------------------------------


def _eval_disc(coeffs: Mapping, z: np.ndarray) -> np.ndarray:
    x = np.clip(2.0 * np.abs(z) ** 2 - 1.0, -1.0, 1.0)
    by_diff = defaultdict(list)
    for (p, q), c in coeffs.items():
        by_diff[p - q].append((min(p, q), c))
    total = np.zeros(z.shape, dtype=complex)
    for d, terms in by_diff.items():
        k_max = max(k for k, _ in terms)
        tab = jacobi_table(k_max, [abs(d)], x)[:, 0]
        radial = sum(c * tab[k] for k, c in terms)
        power = z ** d if d >= 0 else np.conj(z) ** (-d)
        total += power * radial
    return total


def eval_multiplier(m: CompactMultiplier, point):
    """Sum of c * h at a disc point (U2_U1) or a coset coordinate in [-1, 1]."""
    if m.pair_id == "U2_U1":
        z = np.asarray(point, dtype=complex)
        if np.any(~np.isfinite(z)) or np.any(np.abs(z) > 1.0 + DEFAULT_TOL):
            raise DomainError("disc coordinate outside the closed unit disc")
        val = _eval_disc(m.coefficients, z)
        return complex(val) if np.ndim(point) == 0 else val
    r = np.asarray(point, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(np.abs(r) > 1.0 + DEFAULT_TOL):
        raise DomainError("coset coordinate outside [-1, 1]")
    r = np.clip(r, -1.0, 1.0)
    if not m.coefficients:
        val = np.zeros(r.shape, dtype=complex)
    else:
        tab = legendre_table(m.degree, r)
        val = sum(c * tab[n] for n, c in m.coefficients.items())
    return complex(val) if np.ndim(point) == 0 else val


# -- expansion ----------------------------------------------------------------


def gauss_nodes(count: int):
    return np.polynomial.legendre.leggauss(count)


def expand_legendre(samples, degree: int) -> CompactMultiplier:
    """Legendre coefficients c_n = (2n+1)/2 int f P_n from samples at Gauss nodes.

    ``samples`` is either a callable or the values of f at the nodes of
    :func:`gauss_nodes` (its length fixes the node count).  With m nodes the
    rule is exact for degree <= m - 1 inputs.
    """
    if callable(samples):
        nodes, weights = gauss_nodes(degree + 1)
        values = np.asarray(samples(nodes), dtype=complex)
    else:
        values = np.asarray(samples, dtype=complex)
        nodes, weights = gauss_nodes(values.size)
    if degree > nodes.size - 1:
        raise DegreeTooHigh(f"degree {degree} needs at least {degree + 1} Gauss nodes, got {nodes.size}")
    tab = legendre_table(degree, nodes)
    coeffs = (2 * np.arange(degree + 1) + 1) / 2.0 * (tab @ (weights * values))
    return CompactMultiplier("SU2_SO2", dict(enumerate(coeffs)))


@dataclass(frozen=True)
class UniformityCheck:
    samples: int
    seed: int
    z_scores: dict
    passed: bool


@functools.lru_cache(maxsize=4)
def haar_uniformity_check(samples: int = 1_000_000, seed: int = 0) -> UniformityCheck:
    """Monte-Carlo check that the coset coordinates of Haar samples are uniform.

    For U(2), u11 should be uniform on the disc: E|z|^2 = 1/2, E|z|^4 = 1/3,
    E z = 0.  For SU(2), r = a^2 - b^2 + c^2 - d^2 should be uniform on
    [-1, 1]: E r = 0, E r^2 = 1/3.  Every z-score must lie within 3 sigma.
    """
    rng = _rng(seed)
    x = rng.standard_normal((samples, 4))
    x /= np.linalg.norm(x, axis=1)[:, None]
    z = (x[:, 0] + 1j * x[:, 1]) * np.exp(1j * rng.uniform(0, 2 * math.pi, samples))
    r = x[:, 0] ** 2 - x[:, 1] ** 2 + x[:, 2] ** 2 - x[:, 3] ** 2
    a2 = np.abs(z) ** 2

    def zscore(v, mean):
        return float((v.mean() - mean) / (v.std(ddof=1) / math.sqrt(v.size)))

    scores = {
        "disc_abs2": zscore(a2, 0.5),
        "disc_abs4": zscore(a2 * a2, 1.0 / 3.0),
        "disc_re": zscore(z.real, 0.0),
        "disc_im": zscore(z.imag, 0.0),
        "su2_r": zscore(r, 0.0),
        "su2_r2": zscore(r * r, 1.0 / 3.0),
    }
    return UniformityCheck(samples, seed, scores, all(abs(v) <= 3.0 for v in scores.values()))


def expand_disc(f: Callable, degree: int, radial_nodes: int | None = None, angular_nodes: int | None = None):
    """Least-squares U2_U1 coefficients (p + q <= degree) of a function on the disc.

    The fit uses the uniform density 1/pi on the disc, which is the
    push-forward of Haar measure; this is confirmed by Monte Carlo first.
    Returns (multiplier, weighted residual norm).
    """
    check = haar_uniformity_check()
    if not check.passed:
        raise RuntimeError(f"coset measure check failed: {check.z_scores}")
    nr = radial_nodes or degree + 2
    na = angular_nodes or 2 * degree + 3
    u, wu = gauss_nodes(nr)
    u = (u + 1.0) / 2.0
    wu = wu / 2.0
    phi = 2 * math.pi * np.arange(na) / na
    rho = np.sqrt(u)
    z = (rho[:, None] * np.exp(1j * phi)[None, :]).ravel()
    w = (wu[:, None] * np.full(na, 1.0 / na)[None, :]).ravel()
    keys = [(p, s - p) for s in range(degree + 1) for p in range(s + 1)]
    basis = np.stack([_eval_disc({k: 1.0}, z) for k in keys], axis=1)
    sw = np.sqrt(w)
    rhs = np.asarray(f(z), dtype=complex)
    coef, *_ = np.linalg.lstsq(basis * sw[:, None], rhs * sw, rcond=None)
    resid = float(np.linalg.norm((basis @ coef - rhs) * sw))
    return CompactMultiplier("U2_U1", dict(zip(keys, coef))), resid


# -- Hoelder certification ----------------------------------------------------


def holder_certify_u2u1(m: CompactMultiplier, theta1: float, theta2: float, c_tilde: float) -> CertLine:
    """|phi0(e^{i t1}/sqrt2) - phi0(e^{i t2}/sqrt2)| against c_tilde |t1 - t2|^(1/4) ||phi||."""
    if m.pair_id != "U2_U1":
        raise ValueError("expected a U2_U1 multiplier")
    z = np.exp(1j * np.array([theta1, theta2])) / math.sqrt(2.0)
    v = eval_multiplier(m, z)
    lhs = float(abs(v[0] - v[1]))
    rhs = c_tilde * abs(theta1 - theta2) ** 0.25 * m.l1_norm
    return CertLine(lhs, rhs, rhs - lhs, {"theta1": theta1, "theta2": theta2, "c_tilde": c_tilde})


def holder_certify_su2so2(m: CompactMultiplier, r1: float, r2: float) -> CertLine:
    """|chi0(r1) - chi0(r2)| against 4 |r1 - r2|^(1/2) ||chi|| on [-1/2, 1/2]."""
    if m.pair_id == "U2_U1":
        raise ValueError("expected a Legendre-type multiplier")
    if not (-0.5 <= r1 <= 0.5 and -0.5 <= r2 <= 0.5):
        raise DomainError("coordinates must lie in [-1/2, 1/2]")
    v = eval_multiplier(m, np.array([r1, r2]))
    lhs = float(abs(v[0] - v[1]))
    rhs = 4.0 * math.sqrt(abs(r1 - r2)) * m.l1_norm
    return CertLine(lhs, rhs, rhs - lhs, {"r1": r1, "r2": r2})


def holder_grid_u2u1(m: CompactMultiplier, thetas: np.ndarray, c_tilde: float):
    """Worst margin over all pairs of ``thetas``; returns (margin, (t1, t2))."""
    v = eval_multiplier(m, np.exp(1j * thetas) / math.sqrt(2.0))
    lhs = np.abs(v[:, None] - v[None, :])
    rhs = c_tilde * np.abs(thetas[:, None] - thetas[None, :]) ** 0.25 * m.l1_norm
    margin = rhs - lhs
    i, j = np.unravel_index(int(np.argmin(margin)), margin.shape)
    return float(margin[i, j]), (float(thetas[i]), float(thetas[j]))


def holder_grid_su2so2(m: CompactMultiplier, rs: np.ndarray):
    v = eval_multiplier(m, rs)
    lhs = np.abs(v[:, None] - v[None, :])
    rhs = 4.0 * np.sqrt(np.abs(rs[:, None] - rs[None, :])) * m.l1_norm
    margin = rhs - lhs
    i, j = np.unravel_index(int(np.argmin(margin)), margin.shape)
    return float(margin[i, j]), (float(rs[i]), float(rs[j]))


# -- restriction maps ---------------------------------------------------------


@dataclass(frozen=True)
class SyntheticGMultiplier:
    """A K-bi-invariant function on Sp(2,R) or SL(3,R) given on the chamber."""

    group_id: str
    chamber_fn: Callable
    name: str = "synthetic"

    def __post_init__(self):
        if self.group_id not in ("Sp2", "SL3"):
            raise ValueError(f"unknown group {self.group_id!r}")

    def chamber(self, g: GroupMatrix, tol: float = DEFAULT_TOL):
        return sp2_chamber(g, tol) if self.group_id == "Sp2" else sl3_chamber(g, tol)

    def __call__(self, g: GroupMatrix, tol: float = DEFAULT_TOL) -> complex:
        return complex(self.chamber_fn(self.chamber(g, tol)))


def _require_k(k: GroupMatrix, tol: float):
    if k.dim != 4:
        raise MembershipError("expected an element of K inside Sp(2,R)")
    check_membership(GroupMatrix(k.entries, "K_U2"), tol)


def restrict_psi(phi: SyntheticGMultiplier, alpha: float, k: GroupMatrix, tol: float = DEFAULT_TOL) -> complex:
    """psi_alpha(k) = phi(D_alpha k D_alpha); K1-bi-invariant."""
    _require_k(k, tol)
    d = dalpha(alpha)
    return phi(d @ k @ d, tol)


def restrict_chi(phi: SyntheticGMultiplier, alpha: float, k: GroupMatrix, tol: float = DEFAULT_TOL) -> complex:
    """chi_alpha(k) = phi(D'_alpha k v D'_alpha); K3-bi-invariant."""
    _require_k(k, tol)
    d = dprime(alpha)
    return phi(d @ k @ v_element() @ d, tol)


def restrict_psi_sl3(phi: SyntheticGMultiplier, r: float, k: GroupMatrix, tol: float = DEFAULT_TOL) -> complex:
    """psi_r(k) = phi(D(r,0) k D(r,0)) for k in SO(3); K0-bi-invariant."""
    if k.dim != 3:
        raise MembershipError("expected an element of SO(3)")
    check_membership(GroupMatrix(k.entries, "SO3"), tol)
    d = sl3_dmat((r, 0.0))
    return phi(d @ k @ d, tol)


def decaying_sp2(rate: float = 0.25, limit: complex = 0.0) -> SyntheticGMultiplier:
    """Example chamber function limit + exp(-rate (beta + gamma))."""

    def fn(c: ChamberSp2):
        return limit + math.exp(-rate * (c.beta + c.gamma))

    return SyntheticGMultiplier("Sp2", fn, f"exp(-{rate}(beta+gamma))")


def decaying_sl3(rate: float = 0.25) -> SyntheticGMultiplier:
    def fn(c: ChamberSl3):
        return math.exp(-rate * (c.s + c.t))

    return SyntheticGMultiplier("SL3", fn, f"exp(-{rate}(s+t))")


def identity_coset_indicator(group_id: str = "Sp2", tol: float = 1e-6) -> SyntheticGMultiplier:
    def fn(c):
        vals = (c.beta, c.gamma) if group_id == "Sp2" else (c.s, c.t)
        return 1.0 if max(vals) <= tol else 0.0

    return SyntheticGMultiplier(group_id, fn, "indicator of K")


__all__ = [
    "CertLine",
    "CompactMultiplier",
    "SyntheticGMultiplier",
    "eval_multiplier",
    "expand_disc",
    "expand_legendre",
    "haar_uniformity_check",
    "holder_certify_su2so2",
    "holder_certify_u2u1",
    "random_multiplier",
    "random_su2",
    "random_u2",
    "restrict_chi",
    "restrict_psi",
]
