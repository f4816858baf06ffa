import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apcert import gelfand as F
from apcert import groups as G
from apcert import orthopoly as O
from apcert.errors import DegreeTooHigh, DomainError, MembershipError


def test_eval_trivial_cases():
    one = F.CompactMultiplier("U2_U1", {(0, 0): 1.0})
    assert F.eval_multiplier(one, 0.2 + 0.1j) == pytest.approx(1.0)
    zed = F.CompactMultiplier("U2_U1", {(1, 0): 1.0})
    assert F.eval_multiplier(zed, 0.2 + 0.1j) == pytest.approx(0.2 + 0.1j)
    leg = F.CompactMultiplier("SU2_SO2", {0: 1.0})
    assert F.eval_multiplier(leg, -0.3) == pytest.approx(1.0)


@pytest.mark.parametrize("pair", ["U2_U1", "SU2_SO2"])
def test_eval_matches_naive_sum(pair):
    m = F.random_multiplier(pair, 12, seed=5)
    assert m.l1_norm == pytest.approx(1.0, abs=1e-14)
    if pair == "U2_U1":
        z = 0.4 * np.exp(0.9j)
        naive = sum(c * O.spherical_u2u1(p, q, z) for (p, q), c in m.coefficients.items())
        assert F.eval_multiplier(m, z) == pytest.approx(naive, abs=1e-12)
    else:
        naive = sum(c * O.legendre(n, 0.37) for n, c in m.coefficients.items())
        assert F.eval_multiplier(m, 0.37) == pytest.approx(naive, abs=1e-12)


def test_eval_domain():
    m = F.random_multiplier("U2_U1", 3, seed=0)
    with pytest.raises(DomainError):
        F.eval_multiplier(m, 1.2)


def test_multiplier_roundtrip():
    m = F.random_multiplier("U2_U1", 4, seed=1)
    assert F.CompactMultiplier.from_dict(m.to_dict()) == m


def _coeffs(m, degree):
    return np.array([m.coefficients.get(n, 0.0) for n in range(degree + 1)])


def test_expand_legendre_examples():
    c = _coeffs(F.expand_legendre(lambda r: np.ones_like(r), 10), 10)
    assert c[0] == pytest.approx(1.0, abs=1e-12) and np.abs(c[1:]).max() <= 1e-12
    c = _coeffs(F.expand_legendre(lambda r: r, 10), 10)
    assert c[1] == pytest.approx(1.0, abs=1e-12)
    assert np.abs(np.delete(c, 1)).max() <= 1e-12
    c = _coeffs(F.expand_legendre(lambda r: O.legendre_table(7, r)[7], 20), 20)
    assert c[7] == pytest.approx(1.0, abs=1e-10)
    assert np.abs(np.delete(c, 7)).max() <= 1e-10


def test_expand_legendre_degree_too_high():
    nodes, _ = F.gauss_nodes(5)
    with pytest.raises(DegreeTooHigh):
        F.expand_legendre(nodes**2, 8)


def test_expand_disc_recovers_multiplier():
    m = F.random_multiplier("U2_U1", 4, seed=2)
    fit, resid = F.expand_disc(lambda z: F.eval_multiplier(m, z), 4)
    assert resid < 1e-12
    for k, c in m.coefficients.items():
        assert fit.coefficients[k] == pytest.approx(c, abs=1e-10)


def test_haar_uniformity():
    assert F.haar_uniformity_check(200_000, 1).passed


def test_holder_certifiers():
    m = F.random_multiplier("U2_U1", 10, seed=3)
    line = F.holder_certify_u2u1(m, 0.4, 0.4, 2**0.75)
    assert line.lhs == 0.0 and line.margin >= 0.0
    leg = F.random_multiplier("SU2_SO2", 30, seed=3)
    assert F.holder_certify_su2so2(leg, 0.1, 0.1).margin >= 0.0
    with pytest.raises(DomainError):
        F.holder_certify_su2so2(leg, 0.1, 0.9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 300), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_single_legendre_holder(n, r1, r2):
    m = F.CompactMultiplier("SU2_SO2", {n: 1.0})
    assert F.holder_certify_su2so2(m, r1, r2).margin >= 0.0


def test_holder_grid_single_h():
    thetas = 2 * math.pi * np.arange(64) / 64
    for p, q in [(0, 1), (5, 3), (40, 41), (150, 150)]:
        worst, _ = F.holder_grid_u2u1(F.CompactMultiplier("U2_U1", {(p, q): 1.0}), thetas, 2**0.75)
        assert worst >= 0.0


def test_restrictions_at_identity():
    ind = F.identity_coset_indicator("Sp2")
    assert F.restrict_psi(ind, 0.0, G.GroupMatrix(np.eye(4), "K_U2")) == 1.0
    # K is the identity double coset, so psi_0 is 1 on all of K
    assert F.restrict_psi(ind, 0.0, G.random_k(0)) == 1.0
    assert F.restrict_psi(ind, 1.0, G.GroupMatrix(np.eye(4), "K_U2")) == 0.0


def test_restriction_requires_k():
    with pytest.raises(MembershipError):
        F.restrict_psi(F.decaying_sp2(), 0.5, G.dmat_sp2((1.0, 0.0)))


def test_restrictions_bi_invariant():
    phi = F.decaying_sp2()
    rng = np.random.default_rng(0)
    for i in range(500):
        alpha = rng.uniform(0, 3)
        k = G.random_k(i)
        a, b = rng.uniform(0, 2 * math.pi, 2)
        ref = F.restrict_psi(phi, alpha, k)
        got = F.restrict_psi(phi, alpha, G.k1_element(a) @ k @ G.k1_element(b))
        assert got == pytest.approx(ref, abs=1e-7)
        ref = F.restrict_chi(phi, alpha, k)
        got = F.restrict_chi(phi, alpha, G.k3_element(a) @ k @ G.k3_element(b))
        assert got == pytest.approx(ref, abs=1e-7)


def test_sl3_restriction_bi_invariant():
    phi = F.decaying_sl3()
    rng = np.random.default_rng(1)
    for i in range(200):
        r = rng.uniform(0.1, 4)
        k = G.random_so3(i)
        a, b = rng.uniform(0, 2 * math.pi, 2)
        ref = F.restrict_psi_sl3(phi, r, k)
        got = F.restrict_psi_sl3(phi, r, G.rot3_23(a) @ k @ G.rot3_23(b))
        assert got == pytest.approx(ref, abs=1e-8)
