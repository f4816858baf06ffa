"""Exit criteria, each at its stated tolerance, grid and time budget."""

import json
import subprocess
import sys
import time

import pytest

from apcert import campaigns
from apcert.certify import sl3_decay_bound

pytestmark = pytest.mark.acceptance


def _run(lemma_id):
    t0 = time.perf_counter()
    rep = campaigns.run_campaign(lemma_id, seed=0)
    return rep, time.perf_counter() - t0


def _detail(rep, elapsed, budget):
    return (f"violations={rep.violation_count} worst_margin={rep.worst_margin:.3g} "
            f"time={elapsed:.1f}s/{budget}s")


def _criterion(record, label, lemma_id, budget, grid_expect):
    spec = campaigns.grid_for(lemma_id)
    for key, value in grid_expect.items():
        assert spec[key] == value, f"grid {key} must be {value}"
    rep, elapsed = _run(lemma_id)
    ok = rep.passed and elapsed <= budget
    record(label, ok, _detail(rep, elapsed, budget))
    assert rep.passed, rep.violations[:3]
    assert elapsed <= budget


def test_c01_kak_recovery(record_criterion):
    _criterion(record_criterion, "1 KAK recovery", "kakeqs", 10,
               {"samples": 10_000, "beta_max": 12.0, "tol": 1e-6})


def test_c02_legendre_oracle(record_criterion):
    _criterion(record_criterion, "2 Legendre oracle", "legendre_oracle", 5,
               {"n_max": 60, "points": 200, "tol": 1e-9})


def test_c03_lpestimates(record_criterion):
    _criterion(record_criterion, "3 Legendre estimates", "lpestimates", 60, {"n_max": 2000, "points": 400})


def test_c04_hs_constant(record_criterion):
    _criterion(record_criterion, "4 Jacobi constant", "hs", 120,
               {"n_max": 200, "beta_max": 200, "theta_grid": 4096, "pq_max": 400})


def test_c05_hoelder(record_criterion):
    _criterion(record_criterion, "5 Hoelder certification", "hoelder", 60,
               {"pq_max": 300, "theta_points": 256, "degree": 50})


def test_c06_functional_equation(record_criterion):
    _criterion(record_criterion, "6 functional equation", "functional_equation", 10,
               {"n_max": 30, "pairs": 100, "tol": 1e-8})


def test_c07_coupling(record_criterion):
    _criterion(record_criterion, "7 coupling", "betagamma", 10, {"tol": 1e-10, "bg_max": 20.0})


def test_c08_witnesses(record_criterion):
    _criterion(record_criterion, "8 witnesses", "witnesses", 30, {"tol": 1e-7, "sl3_r_max": 10.0})


def test_c09_chains_and_series(record_criterion):
    a, ta = _run("scalar_chains")
    b, tb = _run("limit")
    ok = a.passed and b.passed and ta + tb <= 10
    record_criterion("9 scalar chains and series", ok,
                     f"violations={a.violation_count + b.violation_count} time={ta + tb:.1f}s/10s")
    assert a.passed and b.passed
    assert ta + tb <= 10


def test_c10_constants(record_criterion):
    rep, elapsed = _run("constants")
    cert = sl3_decay_bound(0.0, 0.0, 1.0)
    exact = cert.final_bound == 120.0 and cert.extras["decay_rate"] == 1.0 / 12.0
    ok = rep.passed and exact and campaigns.grid_for("constants")["tol"] == 1e-14
    record_criterion("10 constants", ok, f"violations={rep.violation_count} sl3(0,0)={cert.final_bound:g}")
    assert ok


def test_c11_verify_all(record_criterion):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "apcert", "verify", "all", "--no-timestamp"],
                          capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    failed = json.loads(proc.stdout)["result"]["failed"] if proc.stdout else ["<no output>"]
    ok = proc.returncode == 0 and elapsed <= 300
    record_criterion("11 verify all", ok, f"exit={proc.returncode} failed={failed} time={elapsed:.0f}s/300s")
    assert proc.returncode == 0, proc.stderr
    assert elapsed <= 300
