import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from apcert import coupling as C
from apcert.errors import Degenerate, OrderViolation, OutOfRegime


def test_solve_st_examples():
    sol = C.solve_st(0.0, 0.0)
    assert (sol.s, sol.t) == (0.0, 0.0)
    sol = C.solve_st(2.0, 1.0)
    assert sol.s == pytest.approx(1.0, abs=1e-12) and sol.t == pytest.approx(1.0, abs=1e-12)
    sol = C.solve_st(3.0, 1.0)
    assert max(sol.residuals) <= 1e-10
    assert sol.s >= 3.0 / 4 and sol.t >= 1.0 / 2
    with pytest.raises(OrderViolation):
        C.solve_st(1.0, 2.0)


def test_solve_betagamma_examples():
    c = C.solve_betagamma(0.0, 0.0)
    assert (c.beta, c.gamma) == (0.0, 0.0)
    for s in (0.3, 1.0, 7.0):
        c = C.solve_betagamma(s, s)
        assert c.beta == pytest.approx(2 * s, abs=1e-12) and c.gamma == pytest.approx(s, abs=1e-12)
    c = C.solve_betagamma(1.4, 1.0)
    sol = C.solve_st(c.beta, c.gamma)
    assert sol.s == pytest.approx(1.4, abs=1e-10) and sol.t == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(OrderViolation):
        C.solve_betagamma(1.0, 2.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 15), st.floats(0, 1))
def test_round_trip(s, frac):
    t = s * frac
    c = C.solve_betagamma(s, t)
    sol = C.solve_st(c.beta, c.gamma)
    assert sol.s == pytest.approx(s, abs=1e-10)
    assert sol.t == pytest.approx(t, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 20), st.floats(0, 1))
def test_lower_bounds(beta, frac):
    gamma = beta * frac
    sol = C.solve_st(beta, gamma)
    assert sol.s >= beta / 4 - 1e-12
    assert sol.t >= gamma / 2 - 1e-12


def test_log_form_agrees_with_direct():
    for beta, gamma in [(20.0, 3.0), (24.0, 24.0), (22.0, 0.5)]:
        a = C.solve_st(beta, gamma, "direct")
        b = C.solve_st(beta, gamma, "log")
        assert a.s == pytest.approx(b.s, rel=1e-12) and a.t == pytest.approx(b.t, rel=1e-12)


def test_large_arguments_do_not_overflow():
    sol = C.solve_st(600.0, 300.0)
    assert math.isfinite(sol.s) and max(sol.residuals) <= 1e-12
    c = C.solve_betagamma(sol.s, sol.t)
    assert c.beta == pytest.approx(600.0, rel=1e-10) and c.gamma == pytest.approx(300.0, rel=1e-10)


def test_circle_witness_examples():
    w = C.circle_witness(1.0, 1.0)
    assert w.params["r1"] == pytest.approx(1.0) and w.params["a1"] == pytest.approx(1.0)
    assert w.params["b1"] == pytest.approx(0.0, abs=1e-7) and w.verified
    w = C.circle_witness(10.0, 1.0)
    assert w.params["r1"] == pytest.approx(2 * math.sinh(1) / math.sinh(10), rel=1e-6)
    assert w.membership_residual <= 1e-7
    with pytest.raises(Degenerate):
        C.circle_witness(0.0, 0.0)


def test_hyperbola_witness_examples():
    w = C.hyperbola_witness(2.0, 2.0)
    assert w.params["a1"] == pytest.approx(0.0, abs=1e-15)
    assert w.params["b1"] == pytest.approx(1 / math.sqrt(2)) and w.verified
    w = C.hyperbola_witness(5.0, 2.0)
    assert w.params["a1"] <= 1 / (4 * math.sinh(2)) and w.membership_residual <= 1e-7
    with pytest.raises(OutOfRegime):
        C.hyperbola_witness(5.0, 0.01)


def test_sl3_witness_examples():
    w = C.sl3_witness(3.0, math.pi / 2)
    assert w.recovered.s == pytest.approx(0.0, abs=1e-7) and w.recovered.t == pytest.approx(3.0, abs=1e-7)
    w = C.sl3_witness(3.0, 0.0)
    assert w.recovered.s == pytest.approx(6.0, abs=1e-7) and w.recovered.t == pytest.approx(0.0, abs=1e-7)
    q = math.asinh(0.5 * math.sinh(3))
    w = C.sl3_witness(3.0, math.pi / 3)
    assert (w.target.s, w.target.t) == pytest.approx((2 * q, 3 - q), abs=1e-12)
    assert w.membership_residual <= 1e-7


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 20), st.floats(0, 1))
def test_circle_witness_property(beta, frac):
    w = C.circle_witness(beta, beta * frac)
    assert w.membership_residual <= 1e-7


@settings(max_examples=40, deadline=None)
@given(st.floats(2, 30), st.floats(0, 1))
def test_hyperbola_witness_property(beta, frac):
    gamma = 2 + (beta - 2) * frac
    try:
        w = C.hyperbola_witness(beta, gamma)
    except OutOfRegime:
        assume(False)
    assert w.membership_residual <= 1e-7
