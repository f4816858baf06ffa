import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apcert import groups as G
from apcert.errors import MembershipError, NegativeDiscriminant, NotUnitary


def test_embed_identity():
    assert np.array_equal(G.embed_u2_to_k(G.U2Param(np.eye(2))).entries, np.eye(4))


def test_embed_k1_rotation():
    th = 0.7
    k = G.embed_u2_to_k(G.U2Param(np.diag([1.0, np.exp(1j * th)]))).entries
    assert np.allclose(k, G.k1_element(th).entries)
    assert k[1, 1] == pytest.approx(math.cos(th))
    assert k[3, 3] == pytest.approx(math.cos(th))
    assert abs(k[1, 3]) == pytest.approx(math.sin(th))
    assert k[1, 3] == pytest.approx(-k[3, 1])


def test_v_element_blocks():
    v = G.v_element().entries
    r = 1 / math.sqrt(2)
    assert np.allclose(v[:2, :2], r * np.eye(2))
    assert np.allclose(v[2:, 2:], r * np.eye(2))
    w = 1 / math.sqrt(2) * (1 + 1j) * np.eye(2)
    assert np.allclose(v, G.embed_u2_to_k(G.U2Param(w)).entries)


def test_diagonal_constructors():
    assert np.array_equal(G.dmat_sp2((0, 0)).entries, np.eye(4))
    assert np.allclose(G.dalpha(1.0).entries, np.diag([math.e, 1, 1 / math.e, 1]))


def test_not_unitary():
    with pytest.raises(NotUnitary):
        G.U2Param(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_invariants_identity_and_diagonal():
    inv = G.hs_invariants(G.GroupMatrix(np.eye(4), "Sp2"))
    assert (inv.c1, inv.c2) == (0.0, 0.0)
    b, g = 2.0, 1.0
    inv = G.hs_invariants(G.dmat_sp2((b, g)))
    assert inv.c1 == pytest.approx(math.sinh(b) ** 2 + math.sinh(g) ** 2, rel=1e-13)
    assert inv.c2 == pytest.approx(math.sinh(b) ** 2 * math.sinh(g) ** 2, rel=1e-13)


def test_invariants_k_invariant():
    ref = G.hs_invariants(G.dmat_sp2((2, 1)))
    g = G.random_k(1) @ G.dmat_sp2((2, 1)) @ G.random_k(2)
    inv = G.hs_invariants(g)
    assert inv.c1 == pytest.approx(ref.c1, rel=1e-12)
    assert inv.c2 == pytest.approx(ref.c2, rel=1e-12)


def test_sp2_chamber_examples():
    c = G.sp2_chamber(G.GroupMatrix(np.eye(4), "Sp2"))
    assert (c.beta, c.gamma) == (0.0, 0.0)
    c = G.sp2_chamber(G.dmat_sp2((1.0, 0.5)))
    assert c.beta == pytest.approx(1.0, abs=1e-12) and c.gamma == pytest.approx(0.5, abs=1e-12)
    c = G.sp2_chamber(G.random_k(3) @ G.dmat_sp2((2, 1)) @ G.random_k(4))
    assert c.beta == pytest.approx(2.0, abs=1e-9) and c.gamma == pytest.approx(1.0, abs=1e-9)


def test_sp2_rejects_perturbed_identity():
    with pytest.raises((MembershipError, NegativeDiscriminant)):
        G.sp2_chamber(G.GroupMatrix(np.eye(4) + 0.1 * np.eye(4)[::-1], "Sp2"))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 10), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_sp2_recovery_property(beta, frac, seed):
    gamma = beta * frac
    g = G.random_k(seed) @ G.dmat_sp2((beta, gamma)) @ G.random_k(seed + 1)
    c = G.sp2_chamber(g)
    assert c.beta == pytest.approx(beta, abs=1e-6)
    assert c.gamma == pytest.approx(gamma, abs=1e-6)


def test_sl3_examples():
    c = G.sl3_chamber(G.GroupMatrix(np.eye(3), "SL3"))
    assert c.s == pytest.approx(0.0, abs=1e-15) and c.t == pytest.approx(0.0, abs=1e-15)
    c = G.sl3_chamber(G.sl3_dmat((2, 1)))
    assert (c.s, c.t) == pytest.approx((2, 1), abs=1e-12)
    c = G.sl3_chamber(G.random_so3(5) @ G.sl3_dmat((3, 0.5)) @ G.random_so3(6))
    assert (c.s, c.t) == pytest.approx((3, 0.5), abs=1e-9)


def test_jacobi_svd_matches_numpy():
    a = np.random.default_rng(0).normal(size=(3, 3))
    assert np.allclose(G.jacobi_singular_values(a), np.linalg.svd(a, compute_uv=False), rtol=1e-12)


def test_sl2_polar_q():
    assert G.sl2_polar_q(3.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert G.sl2_polar_q(3.0, 0.0) == 3.0
    q = G.sl2_polar_q(2.0, math.pi / 3)
    assert q == pytest.approx(math.asinh(0.5 * math.sinh(2)), rel=1e-14)
    sv = np.linalg.svd(G.sl2_matrix(2.0, math.pi / 3), compute_uv=False)
    assert math.log(sv[0]) == pytest.approx(q, rel=1e-12)


def test_random_elements():
    a = G.random_k(0)
    assert np.array_equal(a.entries, G.random_k(0).entries)
    assert not np.array_equal(a.entries, G.random_k(1).entries)
    J = G.J4
    assert np.abs(a.entries.T @ J @ a.entries - J).max() < 1e-12
    for seed in range(5):
        assert np.linalg.det(G.random_k(seed).entries) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.det(G.random_so3(seed).entries) == pytest.approx(1.0, abs=1e-12)
    assert not np.array_equal(G.random_so3(0).entries, G.random_so3(1).entries)


def test_group_matrix_roundtrip():
    g = G.dmat_sp2((1.0, 0.5))
    assert G.GroupMatrix.from_dict(g.to_dict()) == g
