import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apcert import groups as G
from apcert import orthopoly as O


def test_legendre_low_degree():
    assert O.legendre(0, 0.7) == 1.0
    assert O.legendre(1, 0.3) == pytest.approx(0.3)
    # P_2 by hand
    assert O.legendre(2, 0.4) == pytest.approx((3 * 0.16 - 1) / 2, abs=1e-15)


def test_legendre_vs_integral_oracle():
    assert O.legendre(5, 0.7) == pytest.approx(O.legendre_integral_oracle(5, 0.7), abs=1e-10)
    assert O.legendre(10, 0.2) == pytest.approx(O.legendre_integral_oracle(10, 0.2), abs=1e-10)
    assert O.legendre_integral_oracle(0, 0.37) == pytest.approx(1.0, abs=1e-14)
    assert O.legendre_integral_oracle(1, 0.37) == pytest.approx(0.37, abs=1e-14)


def test_jacobi_reductions():
    x = 0.35
    for n in range(8):
        assert O.jacobi(n, 0, x) == pytest.approx(O.legendre(n, x), abs=1e-14)
    for b in range(6):
        assert O.jacobi(0, b, x) == 1.0
    # P_1^(0,3)(x) = (5x - 3)/2
    assert O.jacobi(1, 3, 0.0) == pytest.approx(-1.5, abs=1e-15)
    assert O.jacobi_sum_oracle(1, 3, 0.0) == pytest.approx(-1.5, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 25), st.integers(0, 25), st.floats(-1, 1))
def test_jacobi_vs_exact_sum(n, b, x):
    ref = O.jacobi_sum_oracle(n, b, x)
    assert O.jacobi(n, b, x) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_spherical_u2u1():
    z = 0.3 + 0.4j
    assert O.spherical_u2u1(0, 0, z) == pytest.approx(1.0)
    assert O.spherical_u2u1(1, 0, z) == pytest.approx(z)
    th = 1.1
    for p, q in [(3, 1), (2, 5), (7, 7)]:
        lhs = O.spherical_u2u1(p, q, np.exp(1j * th) / math.sqrt(2))
        rhs = np.exp(1j * (p - q) * th) * O.spherical_u2u1(p, q, 1 / math.sqrt(2))
        assert lhs == pytest.approx(rhs, abs=1e-13)


def test_spherical_su2so2():
    u = G.random_su2(7)
    a, b, c, d = u.su2_coords()
    assert O.spherical_su2so2(0, u) == 1.0
    assert O.spherical_su2so2(5, G.U2Param(np.eye(2))) == pytest.approx(1.0)
    assert O.spherical_su2so2(7, u) == pytest.approx(O.legendre(7, a * a - b * b + c * c - d * d), abs=1e-14)


def test_spherical_su2so2_bi_invariance():
    rng = np.random.default_rng(11)
    u = G.random_su2(3)
    ref = O.spherical_su2so2(7, u)
    for t1, t2 in rng.uniform(0, 2 * math.pi, size=(1000, 2)):
        v = G.so2_unitary(t1) @ u @ G.so2_unitary(t2)
        assert O.spherical_su2so2(7, v) == pytest.approx(ref, abs=1e-12)


def test_spherical_so3so2_bi_invariance():
    g = G.random_so3(4)
    ref = O.spherical_so3so2(6, g)
    assert ref == pytest.approx(O.legendre(6, g.entries[0, 0]), abs=1e-14)
    for t1, t2 in [(0.3, 1.2), (2.0, -0.4)]:
        h = G.rot3_23(t1) @ g @ G.rot3_23(t2)
        assert O.spherical_so3so2(6, h) == pytest.approx(ref, abs=1e-12)


def test_hs_constant_trivial_grid():
    # max over theta of sqrt2 (sin cos)^(1/2) is 1, at theta = pi/4
    est = O.hs_constant_estimate(0, 0, 4096)
    assert est.c_hat == pytest.approx(1.0, abs=1e-12)
    assert est.argmax_theta == pytest.approx(math.pi / 4, abs=1e-3)


def test_holder_margin_examples():
    assert O.legendre_holder_margin(5, 0.2, 0.2) == 0.0
    assert O.legendre_holder_margin(1, 0.5, -0.5) == pytest.approx(3.0)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 500), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_holder_margin_nonnegative(n, x, y):
    assert O.legendre_holder_margin(n, x, y) >= 0.0


def test_legendre_table_matches_scalar():
    x = np.linspace(-1, 1, 11)
    tab = O.legendre_table(12, x)
    for n in (0, 3, 12):
        assert np.allclose(tab[n], [O.legendre(n, v) for v in x], atol=1e-14)


def test_domain_error():
    from apcert.errors import DomainError

    with pytest.raises(DomainError):
        O.legendre(3, 1.5)
