import json
import math

import numpy as np
import pytest

from apcert import certify, groups
from apcert.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out) if out else None


def test_kak_identity_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text(json.dumps(np.eye(4).tolist()))
    code, rep = run_json(capsys, "kak", "--matrix", str(f))
    assert code == 0
    assert rep["result"]["chamber"] == {"beta": 0.0, "gamma": 0.0}
    assert rep["seed"] == 0 and rep["schema_version"] == 1


def test_kak_diagonal_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text(json.dumps(groups.dmat_sp2((1.0, 0.5)).to_dict()))
    code, rep = run_json(capsys, "kak", "--matrix", str(f))
    assert code == 0
    ch = rep["result"]["chamber"]
    assert ch["beta"] == pytest.approx(1.0, abs=1e-12) and ch["gamma"] == pytest.approx(0.5, abs=1e-12)


def test_kak_sl3_entries(capsys):
    rows = ";".join(",".join(str(v) for v in r) for r in groups.sl3_dmat((2, 1)).entries)
    code, rep = run_json(capsys, "kak", "--entries", rows)
    assert code == 0 and rep["result"]["chamber"]["s"] == pytest.approx(2.0)


def test_kak_rejects_non_symplectic(capsys):
    rows = ";".join(",".join(str(v) for v in r) for r in np.eye(4) + 0.1 * np.eye(4)[::-1])
    code, out, err = run(capsys, "kak", "--entries", rows)
    assert code == 2 and ("Membership" in err or "NegativeDiscriminant" in err)


def test_kak_malformed(capsys):
    assert run(capsys, "kak", "--entries", "1,2;x")[0] == 2
    assert run(capsys, "kak")[0] == 2


def test_certify_sl3(capsys):
    code, rep = run_json(capsys, "certify", "sl3", "--s", "0", "--t", "0", "--norm", "1")
    assert code == 0 and rep["result"]["certificate"]["final_bound"] == 120.0


def test_certify_sp2_default_ledger(capsys):
    code, rep = run_json(capsys, "certify", "sp2", "--beta", "0", "--gamma", "0", "--norm", "1")
    assert code == 0
    cert = rep["result"]["certificate"]
    assert cert["final_bound"] == pytest.approx(certify.default_ledger()["C1_sp2"], rel=1e-15)


def test_certify_missing_norm(capsys):
    assert run(capsys, "certify", "sp2", "--beta", "1", "--gamma", "0")[0] == 2
    assert run(capsys, "certify", "sl3", "--s", "1", "--t", "0")[0] == 2


def test_certify_order_violation(capsys):
    assert run(capsys, "certify", "sp2", "--beta", "2", "--gamma", "3", "--norm", "1", "--c-hat", "1")[0] == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"beta": 64, "gamma": 0, "norm": 1, "c_hat": 1.0, "seed": 9}))
    code, rep = run_json(capsys, "certify", "sp2", "--config", str(cfg))
    led = certify.build_ledger(1.0)
    assert code == 0 and rep["seed"] == 9
    assert rep["result"]["certificate"]["final_bound"] == pytest.approx((led["C3"] + led["C6"]) / math.e)
    code, rep = run_json(capsys, "certify", "sp2", "--config", str(cfg), "--norm", "2", "--seed", "4")
    assert rep["seed"] == 4 and rep["result"]["certificate"]["norm_bound"] == 2.0


def test_witness_commands(capsys):
    code, rep = run_json(capsys, "witness", "circle", "--beta", "10", "--gamma", "1")
    assert code == 0 and rep["result"]["witness"]["verified"]
    assert run(capsys, "witness", "hyperbola", "--beta", "5", "--gamma", "0.01")[0] == 2
    code, rep = run_json(capsys, "witness", "sl3", "--r", "3", "--theta", str(math.pi / 2))
    assert code == 0 and rep["result"]["witness"]["recovered"]["t"] == pytest.approx(3.0, abs=1e-7)


def test_spherical(capsys):
    code, rep = run_json(capsys, "spherical", "--pair", "U2_U1", "--p", "1", "--q", "0", "--z", "0.3,0.4")
    assert code == 0 and rep["result"]["value"] == {"re": 0.3, "im": 0.4}
    code, rep = run_json(capsys, "spherical", "--pair", "SU2_SO2", "--n", "1", "--r", "0.25")
    assert rep["result"]["value"] == pytest.approx(0.25)


def test_multiplier_pipeline(tmp_path, capsys):
    code, rep = run_json(capsys, "multiplier", "synth", "--pair", "U2_U1", "--degree", "6", "--seed", "3")
    assert code == 0
    model = tmp_path / "m.json"
    model.write_text(json.dumps(rep["result"]["multiplier"]))
    code, rep = run_json(capsys, "multiplier", "eval", "--model", str(model), "--point", "0.1,0.2")
    assert code == 0 and rep["result"]["l1_norm"] == pytest.approx(1.0)
    code, rep = run_json(capsys, "multiplier", "holder", "--model", str(model), "--theta-points", "32", "--c-hat", "1")
    assert code == 0 and rep["result"]["worst_margin"] >= 0
    code, rep = run_json(capsys, "multiplier", "holder", "--model", str(model), "--theta1", "0.1", "--theta2", "0.3",
                         "--c-hat", "1")
    assert code == 0 and rep["result"]["cert_line"]["margin"] >= 0


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "bogus")[0] == 2
    code, rep = run_json(capsys, "verify", "betagamma", "--quick")
    assert code == 0 and rep["result"]["passed"]
    assert run(capsys, "verify", "betagamma", "--grid", "nope=1")[0] == 2


def test_verify_violation_exits_one(capsys):
    # an impossible tolerance turns the recovery check into a reported violation
    code, rep = run_json(capsys, "verify", "kakeqs", "--quick", "--grid", "tol=1e-30")
    assert code == 1 and not rep["result"]["passed"]
    assert rep["result"]["reports"][0]["violations"]


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "lpestimates", "--quick", "--format", "csv", "--no-timestamp")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "lemma_id,check,checks,worst_margin,violations"
    assert all(line.startswith("lpestimates,") for line in lines[1:])


def test_output_file(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["constants", "--c-hat", "1", "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert "timestamp" in rep and rep["result"]["ledger"]["entries"]["C3"]["value"] == 4 * math.sqrt(2)


def test_deterministic_output(capsys):
    argv = ["verify", "hoelder", "--quick", "--seed", "5", "--no-timestamp"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and '"elapsed_s"' not in a[1]
