import csv
import json
import math
import subprocess
import sys

import pytest

from tensegrity_ptm import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_table(capsys):
    code, out, _ = run(["solve", "--L2", "1.5", "--rho", "1"], capsys)
    assert code == 0
    assert "6 equilibria, 2 stable" in out
    assert "46.5675" in out


def test_solve_json(capsys):
    code, out, _ = run(["solve", "--format", "json", "--F4", "-10", "--tie", "F3=F4", "--rho", "0.75"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["stable_count"] == 2 and doc["loading"]["F3"] == -10.0
    e = doc["equilibria"][0]
    assert e["theta1_deg"] == pytest.approx(math.degrees(e["theta1"]))
    assert {"x3", "y3", "x4", "y4", "energy", "minor1", "det_h", "stability"} <= set(e)


def test_solve_json_file_radians_only(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert cli.main(["solve", "--output", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert "theta1_deg" not in doc["equilibria"][0]


def test_solve_free_length(capsys):
    code, out, _ = run(["solve", "--l0", "0.1", "--F3", "-10", "--F4", "-10", "--rho", "0.75"], capsys)
    assert code == 0 and "multistart:" in out and "rejected" in out


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# unloaded reference pose\nL2 = 1.5\nrho = 2.0\nformat = json\n")
    code, out, _ = run(["solve", "--config", str(cfg), "--rho", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["rho"] == 1.0 and doc["geometry"]["L2"] == 1.5 and doc["stable_count"] == 2


@pytest.mark.parametrize("text", ["bogus = 1\n", "L2 1.5\n", "L2 = abc\n"])
def test_config_errors(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run(["solve", "--config", str(cfg)], capsys)
    assert code == 1 and "error" in err


def test_exit_codes(tmp_path, capsys):
    assert run(["solve", "--unknown-flag"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["solve", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 1
    assert run(["solve", "--rho", "-1"], capsys)[0] == 1
    assert run(["solve", "--rho", "1e-9", "--method", "general"], capsys)[0] == 2
    assert run(["sweep", "--n", "5", "--output", str(tmp_path / "no" / "x.csv")], capsys)[0] == 3


def test_sweep(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, out, _ = run(["sweep", "--L2", "1.5", "--output", str(path)], capsys)
    assert code == 0 and "width 0.995" in out
    rows = list(csv.DictReader(path.open()))
    assert rows[0].keys() >= {"rho", "branch", "theta1", "theta2", "stability"}
    # 17 significant digits round-trip exactly
    assert all(float(repr(float(r["theta1"]))) == float(r["theta1"]) for r in rows[:50])


def test_classify(tmp_path, capsys):
    c, s = tmp_path / "m.csv", tmp_path / "m.svg"
    args = ["classify", "--n1", "40", "--n2", "40", "--min1", "0.0131", "--max1", "1.9937",
            "--min2", "0.0173", "--max2", "2.9971", "--verify-varieties", "builtin", "--csv", str(c), "--svg", str(s)]
    code, out, _ = run(args, capsys)
    assert code == 0
    assert "regions" in out and "alignment 1.0000" in out
    assert c.exists() and s.exists()
    c2, s2 = tmp_path / "m2.csv", tmp_path / "m2.svg"
    run(args[:-4] + ["--csv", str(c2), "--svg", str(s2)], capsys)
    assert c.read_bytes() == c2.read_bytes() and s.read_bytes() == s2.read_bytes()


def test_repro_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["repro", "--out", str(a), "--resolution", "12"]) == 0
    assert cli.main(["repro", "--out", str(b), "--resolution", "12"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert "report.md" in names and "rhoF4-F3-30.csv" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    report = (a / "report.md").read_text()
    assert "F3 = -30" in report and "F3 = -10" in report


def test_help_documents_defaults():
    out = subprocess.run([sys.executable, "-m", "tensegrity_ptm", "solve", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "default 100" in out and "default 1)" in out
