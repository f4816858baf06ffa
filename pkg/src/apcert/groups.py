"""Fixed-size matrix kernel for Sp(2,R), SL(3,R) and their compact subgroups.

Matrices are small (2x2, 3x3 or 4x4) real arrays tagged with the group they
are meant to live in.  The module provides

* membership checks for each tag,
* the embedding of U(2) onto the maximal compact subgroup K of Sp(2,R),
* the diagonal (Cartan) elements used throughout the decay chain,
* recovery of the Weyl-chamber part of the KAK decomposition.

Only the chamber part is ever recovered; the compact factors are not needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    MembershipError,
    NegativeDiscriminant,
    NotUnitary,
    Singular,
)

DEFAULT_TOL = 1e-9
PRNG_ALGORITHM = "numpy.random.PCG64"

GROUP_TAGS = ("Sp2", "SL3", "SO3", "SO2", "K_U2", "K2_SU2", "generic")

# parent of each tag in the inclusion order used when multiplying matrices
_PARENT = {
    "K2_SU2": "K_U2",
    "K_U2": "Sp2",
    "Sp2": "generic",
    "SO3": "SL3",
    "SL3": "generic",
    "SO2": "generic",
    "generic": None,
}

_TAG_DIM = {"Sp2": 4, "K_U2": 4, "K2_SU2": 4, "SL3": 3, "SO3": 3, "SO2": 2}

J4 = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)


def _ancestors(tag):
    out = []
    while tag is not None:
        out.append(tag)
        tag = _PARENT[tag]
    return out


def join_tags(a: str, b: str) -> str:
    """Smallest tagged group containing both groups."""
    up = _ancestors(b)
    for tag in _ancestors(a):
        if tag in up:
            return tag
    return "generic"


@dataclass(frozen=True)
class GroupMatrix:
    """Real square matrix of size 2, 3 or 4 tagged with its group."""

    entries: np.ndarray
    group_tag: str = "generic"

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim == 1:
            n = math.isqrt(a.size)
            if n * n != a.size:
                raise ValueError(f"cannot reshape {a.size} entries to a square")
            a = a.reshape(n, n)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3, 4):
            raise ValueError(f"expected a 2x2, 3x3 or 4x4 matrix, got {a.shape}")
        if self.group_tag not in GROUP_TAGS:
            raise ValueError(f"unknown group tag {self.group_tag!r}")
        want = _TAG_DIM.get(self.group_tag)
        if want is not None and want != a.shape[0]:
            raise ValueError(f"tag {self.group_tag} needs dim {want}, got {a.shape[0]}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, GroupMatrix):
            return GroupMatrix(self.entries @ other.entries, join_tags(self.group_tag, other.group_tag))
        return NotImplemented

    def transpose(self) -> "GroupMatrix":
        return GroupMatrix(self.entries.T, self.group_tag)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "group_tag": self.group_tag,
            "entries": [float(x) for x in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroupMatrix":
        dim = int(d["dim"])
        entries = np.asarray(d["entries"], dtype=float)
        if entries.size != dim * dim:
            raise ValueError(f"dim {dim} needs {dim * dim} entries, got {entries.size}")
        return cls(entries.reshape(dim, dim), d.get("group_tag", "generic"))

    def __eq__(self, other):
        if not isinstance(other, GroupMatrix):
            return NotImplemented
        return self.group_tag == other.group_tag and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.group_tag, self.entries.tobytes()))


@dataclass(frozen=True)
class U2Param:
    """A 2x2 unitary matrix.

    The SU(2) elements are written ``[[a+ib, -c+id], [c+id, a-ib]]``.
    """

    matrix: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex).reshape(2, 2)
        res = float(np.linalg.norm(u.conj().T @ u - np.eye(2)))
        if not np.isfinite(res) or res > self.tol:
            raise NotUnitary(f"||U^* U - I|| = {res:.3e} exceeds {self.tol:.1e}")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @classmethod
    def su2(cls, a: float, b: float, c: float, d: float, tol: float = DEFAULT_TOL) -> "U2Param":
        return cls(np.array([[a + 1j * b, -c + 1j * d], [c + 1j * d, a - 1j * b]]), tol)

    @property
    def is_su2(self) -> bool:
        return abs(np.linalg.det(self.matrix) - 1.0) <= self.tol

    def su2_coords(self) -> tuple[float, float, float, float]:
        """Return (a, b, c, d); only meaningful for SU(2) elements."""
        if not self.is_su2:
            raise MembershipError("matrix is not in SU(2)")
        u11, u21 = self.matrix[0, 0], self.matrix[1, 0]
        return float(u11.real), float(u11.imag), float(u21.real), float(u21.imag)

    def __matmul__(self, other):
        if isinstance(other, U2Param):
            return U2Param(self.matrix @ other.matrix, max(self.tol, other.tol))
        return NotImplemented


@dataclass(frozen=True)
class ChamberSp2:
    beta: float
    gamma: float

    def __post_init__(self):
        if not (self.beta >= self.gamma >= 0.0):
            raise ValueError(f"need beta >= gamma >= 0, got ({self.beta}, {self.gamma})")

    @property
    def norm2(self) -> float:
        return math.hypot(self.beta, self.gamma)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class ChamberSl3:
    s: float
    t: float

    def __post_init__(self):
        if not (self.s >= 0.0 and self.t >= 0.0):
            raise ValueError(f"need s, t >= 0, got ({self.s}, {self.t})")

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t}


@dataclass(frozen=True)
class HSInvariants:
    c1: float
    c2: float

    @property
    def discriminant(self) -> float:
        return self.c1 * self.c1 - 4.0 * self.c2


# -- membership ---------------------------------------------------------------


def _hadamard(a: np.ndarray) -> float:
    return float(np.prod(np.linalg.norm(a, axis=0)))


def membership_residual(g: GroupMatrix) -> float:
    """Relative residual of the defining identity for ``g.group_tag``.

    Quadratic identities are scaled by max(1, ||g||_HS^2) and determinant
    identities by max(1, Hadamard bound), matching the size of their rounding
    errors.  Generic matrices have residual 0.
    """
    a = g.entries
    tag = g.group_tag
    if not np.all(np.isfinite(a)):
        return math.inf
    if tag == "generic":
        return 0.0
    if tag == "Sp2":
        scale = max(1.0, float(np.sum(a * a)))
        return float(np.linalg.norm(a.T @ J4 @ a - J4)) / scale
    if tag == "SL3":
        return abs(float(np.linalg.det(a)) - 1.0) / max(1.0, _hadamard(a))
    # orthogonal families
    n = a.shape[0]
    res = float(np.linalg.norm(a.T @ a - np.eye(n)))
    res = max(res, abs(float(np.linalg.det(a)) - 1.0))
    if tag in ("K_U2", "K2_SU2"):
        A, B = a[:2, :2], a[2:, :2]
        block = np.block([[A, -B], [B, A]])
        res = max(res, float(np.linalg.norm(a - block)))
        if tag == "K2_SU2":
            res = max(res, abs(np.linalg.det(A + 1j * B) - 1.0))
    return res


def check_membership(g: GroupMatrix, tol: float = DEFAULT_TOL) -> float:
    res = membership_residual(g)
    if not res <= tol:
        raise MembershipError(f"{g.group_tag} membership residual {res:.3e} exceeds {tol:.1e}")
    return res


def _check_invertible(a: np.ndarray, tol: float):
    if not np.all(np.isfinite(a)):
        raise Singular("matrix has non-finite entries")
    det = float(np.linalg.det(a))
    # group elements have det 1; anything near 0 cannot be one
    if not abs(det) > tol:
        raise Singular(f"matrix is numerically singular (det = {det:.3e})")


# -- constructors -------------------------------------------------------------


def embed_u2_to_k(u: U2Param) -> GroupMatrix:
    """Image of ``u = A + iB`` in K, the block matrix [[A, -B], [B, A]]."""
    A = u.matrix.real
    B = u.matrix.imag
    tag = "K2_SU2" if u.is_su2 else "K_U2"
    return GroupMatrix(np.block([[A, -B], [B, A]]), tag)


def dmat_sp2(c: ChamberSp2 | Sequence[float]) -> GroupMatrix:
    beta, gamma = (c.beta, c.gamma) if isinstance(c, ChamberSp2) else c
    return GroupMatrix(np.diag([math.exp(beta), math.exp(gamma), math.exp(-beta), math.exp(-gamma)]), "Sp2")


def dalpha(alpha: float) -> GroupMatrix:
    """diag(e^a, 1, e^-a, 1); commutes with the K1 circle."""
    return GroupMatrix(np.diag([math.exp(alpha), 1.0, math.exp(-alpha), 1.0]), "Sp2")


def dprime(alpha: float) -> GroupMatrix:
    """diag(e^a, e^a, e^-a, e^-a); commutes with the K3 circle."""
    e = math.exp(alpha)
    return GroupMatrix(np.diag([e, e, 1.0 / e, 1.0 / e]), "Sp2")


def v_unitary() -> U2Param:
    w = (1.0 + 1.0j) / math.sqrt(2.0)
    return U2Param(np.array([[w, 0.0], [0.0, w]]))


def v_element() -> GroupMatrix:
    """The central element of K given by ((1+i)/sqrt 2) I_2."""
    return embed_u2_to_k(v_unitary())


def k1_element(theta: float) -> GroupMatrix:
    """Rotation in the (2,4) coordinate plane: image of diag(1, e^{i theta})."""
    return embed_u2_to_k(U2Param(np.diag([1.0, np.exp(1j * theta)])))


def so2_unitary(theta: float) -> U2Param:
    c, s = math.cos(theta), math.sin(theta)
    return U2Param(np.array([[c, -s], [s, c]], dtype=complex))


def k3_element(theta: float) -> GroupMatrix:
    """Image of the real rotation by ``theta`` (the SO(2) inside SU(2))."""
    return embed_u2_to_k(so2_unitary(theta))


def so2_matrix(theta: float) -> GroupMatrix:
    c, s = math.cos(theta), math.sin(theta)
    return GroupMatrix(np.array([[c, -s], [s, c]]), "SO2")


def rot3_12(theta: float) -> GroupMatrix:
    """Rotation of SO(3) in the (1,2) coordinate plane."""
    c, s = math.cos(theta), math.sin(theta)
    return GroupMatrix(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]), "SO3")


def rot3_23(theta: float) -> GroupMatrix:
    """Rotation in the (2,3) plane: the subgroup K0 fixing the first axis."""
    c, s = math.cos(theta), math.sin(theta)
    return GroupMatrix(np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]), "SO3")


# -- random elements ----------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def random_su2(seed) -> U2Param:
    """Haar-random SU(2): a normalised 4d Gaussian vector (a, b, c, d)."""
    x = _rng(seed).standard_normal(4)
    a, b, c, d = x / np.linalg.norm(x)
    return U2Param.su2(a, b, c, d)


def random_u2(seed) -> U2Param:
    rng = _rng(seed)
    u = random_su2(rng)
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return U2Param(phase * u.matrix)


def random_k(seed) -> GroupMatrix:
    """Haar-random element of K (a U(2) copy inside Sp(2,R))."""
    return embed_u2_to_k(random_u2(seed))


def random_so3(seed) -> GroupMatrix:
    """Haar-random rotation through the unit-quaternion double cover."""
    x = _rng(seed).standard_normal(4)
    w, i, j, k = x / np.linalg.norm(x)
    r = np.array(
        [
            [1 - 2 * (j * j + k * k), 2 * (i * j - k * w), 2 * (i * k + j * w)],
            [2 * (i * j + k * w), 1 - 2 * (i * i + k * k), 2 * (j * k - i * w)],
            [2 * (i * k - j * w), 2 * (j * k + i * w), 1 - 2 * (i * i + j * j)],
        ]
    )
    return GroupMatrix(r, "SO3")


# -- chamber recovery ---------------------------------------------------------


def _as_sp2(g: GroupMatrix, tol: float) -> np.ndarray:
    if g.dim != 4:
        raise MembershipError(f"expected a 4x4 matrix, got {g.dim}x{g.dim}")
    _check_invertible(g.entries, tol)
    check_membership(GroupMatrix(g.entries, "Sp2"), tol)
    return g.entries


def hs_invariants(g: GroupMatrix, tol: float = DEFAULT_TOL) -> HSInvariants:
    """c1 = ||g - g^-T||^2 / 8 and c2 = det(g - g^-T) / 16.

    For symplectic g the inverse transpose is J^T g J, which is used instead
    of a numerical inverse (exact up to signs and permutations).
    """
    a = _as_sp2(g, tol)
    m = a - J4.T @ a @ J4
    return HSInvariants(float(np.sum(m * m)) / 8.0, float(np.linalg.det(m)) / 16.0)


def chamber_from_invariants(inv: HSInvariants, tol: float = DEFAULT_TOL) -> ChamberSp2:
    """Solve x^2 - c1 x + c2 = 0 and return (asinh sqrt x+, asinh sqrt x-)."""
    c1, c2 = inv.c1, inv.c2
    if c1 < 0.0:
        raise NegativeDiscriminant(f"c1 = {c1:.3e} is negative")
    disc = inv.discriminant
    if disc < -tol * max(1.0, c1 * c1):
        raise NegativeDiscriminant(f"c1^2 - 4 c2 = {disc:.3e} < 0")
    x_plus = 0.5 * (c1 + math.sqrt(max(disc, 0.0)))
    x_minus = c2 / x_plus if x_plus > 0.0 else 0.0
    if x_minus < 0.0:
        # roundoff near the wall gamma = 0
        if x_minus < -tol * max(1.0, c1):
            raise NegativeDiscriminant(f"negative root {x_minus:.3e}")
        x_minus = 0.0
    x_minus = min(x_minus, x_plus)
    return ChamberSp2(math.asinh(math.sqrt(x_plus)), math.asinh(math.sqrt(x_minus)))


def sp2_chamber(g: GroupMatrix, tol: float = DEFAULT_TOL) -> ChamberSp2:
    """(beta, gamma) with g in K D(beta, gamma) K."""
    return chamber_from_invariants(hs_invariants(g, tol), tol)


def jacobi_singular_values(a: np.ndarray, max_sweeps: int = 60) -> np.ndarray:
    """Singular values, descending, by one-sided (Hestenes) Jacobi rotations.

    Working on the columns of ``a`` directly keeps the small singular values
    relatively accurate for graded matrices, which a two-sided sweep on
    a^T a would not.
    """
    u = np.array(a, dtype=float)
    n = u.shape[1]
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = float(u[:, i] @ u[:, i])
                beta = float(u[:, j] @ u[:, j])
                gamma = float(u[:, i] @ u[:, j])
                if abs(gamma) <= eps * math.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
        if not rotated:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def sl3_dmat(c: ChamberSl3 | Sequence[float]) -> GroupMatrix:
    """D(s,t) = e^{-(s+2t)/3} diag(e^{s+t}, e^t, 1)."""
    s, t = (c.s, c.t) if isinstance(c, ChamberSl3) else c
    return GroupMatrix(
        np.diag([math.exp((2 * s + t) / 3.0), math.exp((t - s) / 3.0), math.exp(-(s + 2 * t) / 3.0)]),
        "SL3",
    )


def sl3_chamber(g: GroupMatrix, tol: float = DEFAULT_TOL) -> ChamberSl3:
    """(s, t) = (log(sig1/sig2), log(sig2/sig3)) from the ordered singular values."""
    if g.dim != 3:
        raise MembershipError(f"expected a 3x3 matrix, got {g.dim}x{g.dim}")
    _check_invertible(g.entries, tol)
    check_membership(GroupMatrix(g.entries, "SL3"), tol)
    sig = jacobi_singular_values(g.entries)
    return ChamberSl3(max(0.0, math.log(sig[0] / sig[1])), max(0.0, math.log(sig[1] / sig[2])))


def sl2_polar_q(r: float, theta: float) -> float:
    """Chamber parameter q of [[e^r cos t, -sin t], [sin t, e^-r cos t]].

    It satisfies sinh q = |cos theta| sinh r.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    return min(r, math.asinh(abs(math.cos(theta)) * math.sinh(r)))


def sl2_matrix(r: float, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[math.exp(r) * c, -s], [s, math.exp(-r) * c]])
