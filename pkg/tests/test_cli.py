import json
from pathlib import Path

import pytest

from conecert.cli import main
from conecert.fixtures import builtin
from conecert.model import save_problem

DATA = Path(__file__).resolve().parents[1] / "src" / "conecert" / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_report_text_mode(capsys):
    code, out, _ = run(capsys, "report", str(DATA / "ex2_1.json"))
    assert code == 0
    assert "CertifiedMinimal" in out
    assert "validity" in out


def test_report_json_mode(capsys):
    code, out, _ = run(capsys, "report", str(DATA / "ex4_1.json"), "--inequality", "nu", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc[0]["final_verdict"] == "CertifiedNotMinimal"


def test_text_and_json_agree_on_verdicts(capsys):
    code, text_out, _ = run(capsys, "report", str(DATA / "ex2_4.json"))
    assert code == 0
    code, json_out, _ = run(capsys, "report", str(DATA / "ex2_4.json"), "--json")
    assert code == 0
    doc = json.loads(json_out)
    for item in doc:
        assert item["final_verdict"] in text_out


def test_report_unknown_inequality(capsys):
    code, _, err = run(capsys, "report", str(DATA / "ex2_1.json"), "--inequality", "zzz")
    assert code == 2
    assert "zzz" in err


def test_malformed_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "report", str(bad))
    assert code == 2
    assert "JSON" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run(capsys, "report", "/no/such/file.json")
    assert code == 2


def test_theta_command(capsys):
    code, out, _ = run(capsys, "theta", str(DATA / "ex2_1.json"), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc[0]["theta"] == pytest.approx(-2.0, abs=1e-6)


def test_support_command(capsys):
    code, out, _ = run(
        capsys, "support", str(DATA / "ex4_1.json"), "--inequality", "nu", "--z", "1", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc[0]["sigma"] == pytest.approx(3.0 ** 0.5, abs=1e-6)


def test_equations_command(capsys):
    code, out, _ = run(capsys, "equations", str(DATA / "cmir.json"), "--json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc) == 1
    assert doc[0]["eta0"] == pytest.approx(0.0, abs=1e-9)


def test_separate_command(capsys):
    code, out, _ = run(
        capsys, "separate", str(DATA / "ex2_4.json"), "--point", "0,0", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["found"] and doc["verified"]
    assert doc["violation"] > 1e-6


def test_separate_feasible_point(capsys):
    code, out, _ = run(
        capsys, "separate", str(DATA / "ex2_4.json"), "--point", "2,0", "--json"
    )
    assert code == 0
    assert not json.loads(out)["found"]


def test_separate_bad_point(capsys):
    code, _, err = run(capsys, "separate", str(DATA / "ex2_4.json"), "--point", "1,2,3")
    assert code == 2


def test_demo_pass_lines(capsys):
    code, out, _ = run(capsys, "demo", "ex2_1")
    assert code == 0
    assert "PASS" in out
    assert "FAIL" not in out


def test_demo_cmir_vertices(capsys):
    code, out, _ = run(capsys, "demo", "cmir", "--f", "0.25", "--M", "10")
    assert code == 0
    assert "dmu vertices" in out
    assert "FAIL" not in out


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CCLAB_SEED", "17")
    path = tmp_path / "p.json"
    path.write_text(save_problem(builtin("ex2_4").to_problem()))
    code, out, _ = run(capsys, "report", str(path), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc[0]["config"]["seed"] == 17


def test_invalid_tol_rejected(capsys):
    code, _, err = run(capsys, "report", str(DATA / "ex2_1.json"), "--tol", "-1")
    assert code == 2
