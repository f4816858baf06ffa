"""Legendre and Jacobi polynomials, spherical functions, and their bounds.

All polynomials are evaluated by the upward three-term recurrence, which is
stable on [-1, 1].  The Legendre integral representation

    P_n(x) = (1/pi) int_0^pi (x + i sqrt(1-x^2) cos t)^n dt

is kept as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .groups import DEFAULT_TOL, GroupMatrix, U2Param, check_membership

PAIR_IDS = ("U2_U1", "SU2_SO2", "SO3_SO2")


@dataclass(frozen=True)
class SphericalIndex:
    pair_id: str
    p: int = 0
    q: int = 0
    n: int = 0

    def __post_init__(self):
        if self.pair_id not in PAIR_IDS:
            raise ValueError(f"unknown pair {self.pair_id!r}")
        if min(self.p, self.q, self.n) < 0:
            raise ValueError("spherical indices must be nonnegative")
        if self.pair_id == "U2_U1" and self.n:
            raise ValueError("U2_U1 functions are indexed by (p, q)")
        if self.pair_id != "U2_U1" and (self.p or self.q):
            raise ValueError(f"{self.pair_id} functions are indexed by n")

    @property
    def key(self):
        return (self.p, self.q) if self.pair_id == "U2_U1" else self.n


@dataclass(frozen=True)
class HsConstantEstimate:
    c_hat: float
    n_max: int
    beta_max: int
    theta_grid_size: int
    argmax_n: int
    argmax_beta: int
    argmax_theta: float

    def to_dict(self) -> dict:
        return asdict(self)


def _domain(x, lo=-1.0, hi=1.0, tol=DEFAULT_TOL):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < lo - tol) or np.any(x > hi + tol):
        raise DomainError(f"argument outside [{lo}, {hi}]")
    return np.clip(x, lo, hi)


def _ret(v, like):
    return float(v) if np.ndim(like) == 0 else v


def legendre(n: int, x):
    """P_n(x) for |x| <= 1 (scalar or array)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xs = _domain(x)
    p0 = np.ones_like(xs)
    if n == 0:
        return _ret(p0, x)
    p1 = xs.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * xs * p1 - (k - 1) * p0) / k
    return _ret(p1, x)


def legendre_table(n_max: int, x) -> np.ndarray:
    """Array of shape (n_max + 1, *x.shape) holding P_0 .. P_n_max."""
    xs = _domain(x)
    out = np.empty((n_max + 1,) + xs.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = xs
    for k in range(2, n_max + 1):
        out[k] = ((2 * k - 1) * xs * out[k - 1] - (k - 1) * out[k - 2]) / k
    return out


def legendre_derivative(n: int, x):
    """P_n'(x) from P_n' = n (P_{n-1} - x P_n) / (1 - x^2), with exact endpoint values."""
    xs = _domain(x)
    if n == 0:
        return _ret(np.zeros_like(xs), x)
    tab = legendre_table(n, xs)
    one_m = 1.0 - xs * xs
    with np.errstate(divide="ignore", invalid="ignore"):
        d = n * (tab[n - 1] - xs * tab[n]) / one_m
    end = n * (n + 1) / 2.0
    d = np.where(one_m == 0.0, np.where(xs > 0, end, (-1.0) ** (n - 1) * end), d)
    return _ret(d, x)


def legendre_integral_oracle(n: int, x, nodes: int | None = None):
    """P_n(x) by the midpoint rule on the Laplace integral over [0, pi].

    The integrand is a trigonometric polynomial of degree n, and the midpoint
    rule with m nodes on [0, pi] is exact below degree 2m, so any
    ``nodes >= 2(n + 8)`` returns P_n(x) up to rounding.
    """
    if nodes is None:
        nodes = 4 * (n + 16)
    if nodes < 2 * (n + 8):
        raise ValueError(f"need at least {2 * (n + 8)} nodes for degree {n}")
    xs = _domain(x)
    theta = (np.arange(nodes) + 0.5) * (math.pi / nodes)
    root = np.sqrt(1.0 - xs * xs)[..., None]
    vals = (xs[..., None] + 1j * root * np.cos(theta)) ** n
    total = vals.mean(axis=-1)
    return _ret(total.real, x)


def jacobi(n: int, b: int, x):
    """P_n^{(0,b)}(x), normalised by P_n^{(0,b)}(1) = 1."""
    if n < 0 or b < 0:
        raise ValueError("indices must be nonnegative")
    xs = _domain(x)
    return _ret(jacobi_table(n, np.array([b]), xs)[n, 0], x)


def jacobi_table(n_max: int, betas, x) -> np.ndarray:
    """P_k^{(0,b)}(x) for k <= n_max and every b in ``betas``.

    Returns shape (n_max + 1, len(betas), *x.shape).  Standard recurrence with
    alpha = 0:

      2k(k+b)(2k+b-2) P_k = (2k+b-1)[(2k+b)(2k+b-2) x - b^2] P_{k-1}
                            - 2(k-1)(k+b-1)(2k+b) P_{k-2}
    """
    xs = np.asarray(x, dtype=float)
    bs = np.asarray(betas, dtype=float).reshape((-1,) + (1,) * xs.ndim)
    out = np.empty((n_max + 1, bs.shape[0]) + xs.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + (bs + 2.0) * (xs - 1.0) / 2.0
    for k in range(2, n_max + 1):
        c = 2 * k + bs
        a1 = 2.0 * k * (k + bs) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * xs - bs * bs)
        a3 = 2.0 * (k - 1) * (k + bs - 1.0) * c
        out[k] = (a2 * out[k - 1] - a3 * out[k - 2]) / a1
    return out


def jacobi_sum_oracle(n: int, b: int, x) -> float:
    """Explicit finite sum for P_n^{(0,b)}, evaluated in exact rationals.

    P_n^{(0,b)}(x) = sum_s C(n, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)
    """
    from fractions import Fraction

    xf = Fraction(x)
    lo, hi = (xf - 1) / 2, (xf + 1) / 2
    total = sum(math.comb(n, n - s) * math.comb(n + b, s) * lo**s * hi ** (n - s) for s in range(n + 1))
    return float(total)


# -- spherical functions ------------------------------------------------------


def spherical_u2u1(p: int, q: int, z):
    """Spherical function of (U(2), U(1)) as a function of the disc point u11."""
    zs = np.asarray(z, dtype=complex)
    if np.any(np.abs(zs) > 1.0 + DEFAULT_TOL):
        raise DomainError("disc coordinate outside the closed unit disc")
    x = np.clip(2.0 * np.abs(zs) ** 2 - 1.0, -1.0, 1.0)
    if p >= q:
        val = zs ** (p - q) * jacobi_table(q, [p - q], x)[q, 0]
    else:
        val = np.conj(zs) ** (q - p) * jacobi_table(p, [q - p], x)[p, 0]
    return complex(val) if np.ndim(z) == 0 else val


def su2_coordinate(u: U2Param) -> float:
    """Double-coset coordinate r = a^2 - b^2 + c^2 - d^2 of SO(2) in SU(2)."""
    a, b, c, d = u.su2_coords()
    return float(np.clip(a * a - b * b + c * c - d * d, -1.0, 1.0))


def spherical_su2so2(n: int, u: U2Param) -> float:
    return legendre(n, su2_coordinate(u))


def spherical_so3so2(n: int, g: GroupMatrix, tol: float = DEFAULT_TOL) -> float:
    if g.dim != 3:
        raise DomainError("expected a 3x3 rotation")
    check_membership(GroupMatrix(g.entries, "SO3"), tol)
    return legendre(n, float(np.clip(g.entries[0, 0], -1.0, 1.0)))


# -- bounds -------------------------------------------------------------------


def hs_quantity(n_max: int, betas, theta) -> np.ndarray:
    """sqrt2 sin^(1/2) cos^(b+1/2) |P_n^{(0,b)}(cos 2t)| (2n+b+1)^(1/4).

    Shape (n_max + 1, len(betas), len(theta)); theta must lie in [0, pi/2].
    """
    th = np.asarray(theta, dtype=float)
    x = np.cos(2.0 * th)
    betas = np.asarray(betas)
    tab = jacobi_table(n_max, betas, x)
    ns = np.arange(n_max + 1)[:, None, None]
    bb = betas[None, :, None]
    sin_part = np.sqrt(np.sin(th))[None, None, :]
    cos_part = np.cos(th)[None, None, :] ** (bb + 0.5)
    return math.sqrt(2.0) * sin_part * cos_part * np.abs(tab) * (2 * ns + bb + 1.0) ** 0.25


def hs_theta_grid(theta_grid: int) -> np.ndarray:
    """Interior nodes j pi / (2N), j = 1..N-1; the endpoints give 0."""
    return np.arange(1, theta_grid) * (math.pi / (2.0 * theta_grid))


def hs_constant_estimate(n_max: int, beta_max: int, theta_grid: int) -> HsConstantEstimate:
    """Empirical maximum of the weighted Jacobi quantity over the stated grid.

    ``theta_grid`` is the number of subintervals of [0, pi/2]; doubling it
    refines the grid, so the estimate never decreases.
    """
    if n_max < 0 or beta_max < 0 or theta_grid < 1:
        raise ValueError("grid sizes must be positive")
    theta = hs_theta_grid(theta_grid)
    if theta.size == 0:
        theta = np.array([math.pi / 4.0])
    best, where = -1.0, (0, 0, 0.0)
    # chunk in beta to bound memory at large grids
    step = max(1, 4_000_000 // max(1, (n_max + 1) * theta.size))
    for b0 in range(0, beta_max + 1, step):
        b1 = min(beta_max, b0 + step - 1)
        q = hs_quantity(n_max, np.arange(b0, b1 + 1), theta)
        i = int(np.argmax(q))
        n_i, b_i, t_i = np.unravel_index(i, q.shape)
        if q[n_i, b_i, t_i] > best:
            best = float(q[n_i, b_i, t_i])
            where = (int(n_i), int(b_i) + b0, float(theta[t_i]))
    return HsConstantEstimate(best, n_max, beta_max, theta_grid, *where)


def h_at_inv_sqrt2(pq_max: int) -> dict[tuple[int, int], float]:
    """|h_{p,q}(1/sqrt2)| for all p + q <= pq_max."""
    out = {}
    for b in range(pq_max + 1):
        n_top = (pq_max - b) // 2
        vals = jacobi_table(n_top, [b], np.array(0.0))[:, 0]
        scale = 2.0 ** (-b / 2.0)
        for n in range(n_top + 1):
            v = abs(scale * vals[n])
            out[(n + b, n)] = v
            out[(n, n + b)] = v
    return out


def legendre_holder_margin(n: int, x: float, y: float) -> float:
    """4 |x - y|^(1/2) - |P_n(x) - P_n(y)| on [-1/2, 1/2]."""
    _domain([x, y], -0.5, 0.5)
    return 4.0 * math.sqrt(abs(x - y)) - abs(legendre(n, x) - legendre(n, y))


def legendre_interior_margins(n: int, x: float) -> tuple[float, float]:
    """Margins of |P_n(x)| <= 2/sqrt n and |P_n'(x)| <= 4 sqrt n for n >= 2."""
    if n < 2:
        raise ValueError("interior bounds are stated for n >= 2")
    _domain(x, -0.5, 0.5)
    return (
        2.0 / math.sqrt(n) - abs(legendre(n, x)),
        4.0 * math.sqrt(n) - abs(legendre_derivative(n, x)),
    )
