import json
import subprocess
import sys

import pytest

from rwrs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cond_exact(capsys):
    code, out, _ = run(capsys, "cond", "--p", "1/2", "--eps", "0", "--record", "BB", "--exact")
    doc = json.loads(out)
    assert code == 0 and doc["p_black"]["exact"] == "3/4"


def test_cond_expression_and_backends(capsys):
    vals = []
    for backend in ("filter", "enumeration", "oracle"):
        code, out, _ = run(capsys, "cond", "--p", "0.7", "--record", "[WB]^2 B", "--backend", backend)
        vals.append(json.loads(out)["p_black"])
    assert vals[0] == pytest.approx(vals[1], abs=1e-14) and vals[0] == pytest.approx(vals[2], abs=1e-14)


def test_cond_particles(capsys):
    code, out, _ = run(capsys, "cond", "--record", "B", "--particles", "1000", "--seed", "4")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 4 and doc["stderr"] >= 0


def test_usage_errors(capsys):
    code, _, err = run(capsys, "cond", "--record", "[]^2")
    assert code == 1 and "rwrs: error" in err
    assert run(capsys, "cond", "--record", "B", "--p", "0.3")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["cond"])
    assert exc.value.code == 1
    assert run(capsys, "exp", "E99")[0] == 1
    assert run(capsys, "exp", "E9", "--param", "bogus=1")[0] == 1


def test_event(capsys):
    code, out, _ = run(capsys, "event", "--record", "B[WWBB]^2WBB[WWBB]^2", "--event", "LT_l", "--l", "0", "--p", "7/10")
    doc = json.loads(out)
    assert code == 0 and doc["pivots"] == [10]
    assert 0 <= doc["probability"] <= 1


def test_delta_and_audit(capsys):
    code, out, _ = run(capsys, "delta", "--prefix", "BWB", "--ext1", "BW", "--ext2", "BW", "--p", "7/10")
    assert json.loads(out)["delta"] == 0
    code, out, _ = run(capsys, "delta", "--prefix", "BWB", "--ext1", "BWWBBW", "--ext2", "WWBWBB", "--p", "9/10", "--exact", "--audit")
    doc = json.loads(out)
    assert doc["applicable"] and doc["bound_ok"] and doc["size_ok"]


def test_rate_confine_build(capsys):
    doc = json.loads(run(capsys, "rate", "--p", "0.9")[1])
    assert doc["rate"] == pytest.approx(0.021003403014224986) and not doc["criterion_holds"]
    doc = json.loads(run(capsys, "rate", "--p", "1")[1])
    assert doc["criterion_holds"] and doc["rate"] == "inf"
    doc = json.loads(run(capsys, "confine", "--n", "2", "--i", "2", "--j", "1", "--exact")[1])
    assert doc["probability"]["exact"] == "1/2"
    doc = json.loads(run(capsys, "build", "sparseW", "--k", "3", "--K", "2")[1])
    assert doc["record"] == "BWWBWWB"
    doc = json.loads(run(capsys, "build", "barY", "--m", "6", "--L", "1")[1])
    assert doc["length"] == 130 and doc["start"] == 6
    assert run(capsys, "build", "barY", "--m", "2")[0] == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": "1/2", "record": "BB", "exact": True}))
    doc = json.loads(run(capsys, "cond", "--config", str(cfg))[1])
    assert doc["p_black"]["exact"] == "3/4"
    # command line wins over the file
    doc = json.loads(run(capsys, "cond", "--config", str(cfg), "--record", "B")[1])
    assert doc["p_black"]["exact"] == "1/2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "cond", "--config", str(bad), "--record", "B")[0] == 1


def test_exp_writes_and_exit_code(tmp_path, capsys):
    code, out, _ = run(capsys, "exp", "cramer-empirical", "--out", str(tmp_path / "e9"))
    assert code == 2
    assert "FAIL" in out
    assert (tmp_path / "e9" / "cramer.csv").exists()
    manifest = json.loads((tmp_path / "e9" / "manifest.json").read_text())
    assert manifest["spec"]["id"] == "E9" and "wall_time_seconds" in manifest
    code, out, _ = run(capsys, "exp", "E9", "--param", "tol=2.0", "--out", str(tmp_path / "e9b"), "--format", "json")
    assert code == 0 and (tmp_path / "e9b" / "cramer.json").exists()


def test_exp_list(capsys):
    code, out, _ = run(capsys, "exp", "list")
    assert code == 0 and "phase-diagram" in out and out.count("\n") == 10


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rwrs", "build", "allB", "--n", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["record"] == "BBB"
