import csv
import json
import shutil
import subprocess
from fractions import Fraction as F

import pytest

from ergomax.cli import main, parse_lambda_grid


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return {
        "delta": write("delta.json", {"offset": 0, "values": [1]}),
        "seq": write("seq.json", {"offset": 1, "values": [4, 0, 0, 0]}),
        "ones": write("ones.json", {"offset": -40, "values": [1] * 81}),
        "alt": write("alt.json", {"offset": 1, "values": [2, 1, 2, 1, 2, 1, 2, 1]}),
        "c5": write("c5.json", {"masses": ["1/5"] * 5, "perm": [1, 2, 3, 4, 0]}),
        "bad_sys": write("bad.json", {"masses": ["1/2", "1/4", "1/4"], "perm": [1, 0, 2]}),
        "f5": write("f5.json", {"values": [1, 0, 0, 0, 0]}),
        "w5": write("w5.json", [1, 1, 1, 1, 1]),
        "tmp": tmp_path,
    }


def test_parse_lambda_grid():
    assert parse_lambda_grid("geom:4:3") == [4.0, 2.0, 1.0]
    assert parse_lambda_grid("1/3,0.25", exact=True) == [F(1, 3), F(1, 4)]
    for bad in ("geom:4", "", "0,1"):
        with pytest.raises(ValueError):
            parse_lambda_grid(bad)


def test_maximal_csv(files):
    out = files["tmp"] / "out.csv"
    assert main(["maximal", "--input", files["delta"], "--op", "centered", "--exact",
                 "--eval-lo", "-2", "--eval-hi", "2", "--output", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["value"] for r in rows] == ["1/5", "1/3", "1/3", "1/3", "1/5"]
    assert rows[2]["witness_lo"] == "-1" and rows[2]["witness_hi"] == "1"


def test_apconst(files, capsys):
    assert main(["apconst", "--weight", files["alt"], "--p", "2", "--exact"]) == 0
    out = capsys.readouterr().out
    assert "constant 9/8" in out and "witness [1,2]" in out
    assert main(["apconst", "--weight", files["alt"], "--p", "2", "--threshold", "1"]) == 0
    assert "exceeds_threshold true" in capsys.readouterr().out


def test_wnorm_and_cz(files, capsys):
    assert main(["wnorm", "--input", files["delta"], "--weight", files["ones"], "--p", "2"]) == 0
    assert float(capsys.readouterr().out) == 1.0
    assert main(["cz", "--input", files["seq"], "--lambda", "1/2", "--exact"]) == 0
    assert capsys.readouterr().out.split() == ["2", "1", "1", "4", "1"]


def test_verify_exit_codes(files, capsys):
    args = ["verify", "weak11", "--input", files["delta"], "--weight", files["ones"],
            "--lambda-grid", "1/3,1/4", "--exact"]
    assert main(args) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and all(json.loads(l)["passed"] for l in lines)
    assert main(["verify", "weakpp", "--input", files["delta"], "--weight", files["ones"],
                 "--p", "2", "--lambda-grid", "geom:4:6"]) == 0
    assert main(["verify", "strongpp", "--input", files["delta"], "--weight", files["ones"],
                 "--p", "2", "--cap", "1.0"]) == 1


def test_ergodic_subcommands(files, capsys):
    assert main(["ergodic", "maximal", "--system", files["c5"], "--f", files["f5"], "--J", "1"]) == 0
    assert capsys.readouterr().out.split() == ["0", "1/3", "1", "1/3", "2", "0", "3", "0", "4", "1/3"]
    assert main(["ergodic", "transfer", "--system", files["c5"], "--f", files["f5"],
                 "--L", "4", "--J", "2"]) == 0
    assert main(["ergodic", "apconst", "--system", files["c5"], "--weight", files["w5"], "--p", "2"]) == 0
    assert "constant 1" in capsys.readouterr().out
    assert main(["ergodic", "rectangle", "--system", files["c5"], "--K", "2", "--F", "3"]) == 0
    assert "base 3" in capsys.readouterr().out
    assert main(["ergodic", "converse", "--system", files["c5"], "--weight", files["w5"], "--J", "1"]) == 0


def test_usage_errors(files, capsys):
    assert main(["ergodic", "maximal", "--system", files["bad_sys"], "--f", files["f5"]]) == 2
    assert "atom 0" in capsys.readouterr().err
    assert main(["maximal", "--input", str(files["tmp"] / "nope.json"), "--op", "dyadic"]) == 2
    assert main(["ergodic", "rectangle", "--system", files["c5"], "--K", "3"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["ergodic", "transfer", "--system", files["c5"]])
    assert exc.value.code == 2


def test_campaign_cli(files, capsys):
    cfg = files["tmp"] / "cfg.json"
    report = files["tmp"] / "report.json"
    cfg.write_text(json.dumps({"checks": []}))
    assert main(["campaign", "--config", str(cfg), "--report", str(report)]) == 0
    assert json.loads(report.read_text())["reports"] == []
    cfg.write_text(json.dumps({"checks": ["weak11"], "sequences": {"kinds": ["delta"]},
                               "weights": {"kinds": [{"kind": "constant"}]},
                               "constants": {"weak11": 1}}))
    assert main(["campaign", "--config", str(cfg)]) == 1
    cfg.write_text("{not json")
    assert main(["campaign", "--config", str(cfg)]) == 2


@pytest.mark.skipif(shutil.which("ergomax") is None, reason="console script not installed")
def test_console_script(files):
    proc = subprocess.run(["ergomax", "cz", "--input", files["seq"], "--lambda", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.split()[:4] == ["2", "1", "1", "4"]
