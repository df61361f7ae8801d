import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from eisenlab.cli import RunConfig, main, run

SPECS = Path(__file__).resolve().parents[1] / "specs"


def spec(name):
    return str(SPECS / f"{name}.json")


def test_verify_passes_on_correct_build(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--spec", spec("a_geo"), "--seed", "42", "--t-end", "2",
                 "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["overall"] is True and doc["seed"] == 42


def test_verify_mutation_exits_one_with_named_failures(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--spec", spec("a_geo"), "--mutate", "K_a2:k2", "--no-flow",
                 "--output", str(out)])
    assert code == 1
    failed = [c["name"] for c in json.loads(out.read_text())["checks"] if not c["pass"]]
    assert failed and all("K_a2" in n or "J_a2" in n for n in failed)


def test_domain_exit_at_start(tmp_path, capsys):
    bad = tmp_path / "a_pdm.json"
    bad.write_text(json.dumps({"family": "a", "tier": "PDMGeodesic", "k": [1, 0.5, 0.25],
                               "lambda": 0.5}))
    code = main(["integrate", "--spec", str(bad), "--initial", "1.5,1.0,0,0.1,0.1,0.1"])
    assert code == 3
    assert "domain exit at t=0" in capsys.readouterr().err


def test_integrate_csv(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(["integrate", "--spec", spec("b_pot"), "--t-end", "0.1", "--h", "0.01",
                 "--format", "csv", "--output", str(out)])
    assert code == 0
    raw = out.read_bytes()
    assert b"\r\n" in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0][:7] == ["t", "q1", "q2", "q3", "p1", "p2", "p3"]
    assert "H_b" in rows[0]
    assert len(rows) == 12
    assert float(rows[-1][0]) == pytest.approx(0.1)


def test_integrate_json_in_chart(tmp_path):
    out = tmp_path / "traj.json"
    code = main(["integrate", "--spec", spec("d_geo"), "--chart", "ParabolicCylI",
                 "--initial", "1.5,1.2,0,0.1,0.2,0.3", "--t-end", "0.05", "--h", "0.01",
                 "--method", "Gauss4", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["chart"] == "ParabolicCylI"


def test_figures_are_written(tmp_path):
    fig = tmp_path / "drift.png"
    assert main(["integrate", "--spec", spec("c_pdm"), "--t-end", "0.2", "--h", "0.01",
                 "--output", str(tmp_path / "t.json"), "--figure", str(fig)]) == 0
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rep = tmp_path / "report.svg"
    assert main(["verify", "--spec", spec("c_euc"), "--no-flow", "--output",
                 str(tmp_path / "r.json"), "--figure", str(rep)]) == 0
    assert rep.read_text().lstrip().startswith("<?xml")


def test_brackets_and_reduce_check(capsys):
    assert main(["brackets", "--spec", spec("c_geo"), "--samples", "20"]) == 0
    assert "K_c2" in capsys.readouterr().out
    assert main(["reduce-check", "--spec", spec("a_geo"), "--t-end", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] is True


def test_catalog_lists_twenty_rows(capsys):
    assert main(["catalog"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 21
    assert main(["catalog", "--format", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 20


@pytest.mark.parametrize("argv", [
    ["verify", "--spec", "missing.json"],
    ["verify", "--spec", spec("a_geo"), "--mutate", "H_a:k1"],
    ["reduce-check", "--spec", spec("a_geo"), "--initial", "1,2,3"],
])
def test_configuration_errors_exit_two(argv):
    assert main(argv) == 2


def test_bad_flags_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--spec", spec("a_geo"), "--mutate", "K_a2"])
    assert info.value.code == 2


def test_config_validation():
    assert run(RunConfig("brackets", spec("a_geo"), format="csv")) == 2
    assert run(RunConfig("verify", spec("a_geo"), samples=0)) == 2
    assert run(RunConfig("verify")) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eisenlab", "catalog"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "PDMPotential" in proc.stdout
