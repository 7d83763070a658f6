import json
from pathlib import Path

import pytest

from netauction.cli import main
from netauction.io import parse_instance
from netauction.mechanisms import VCG, run

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_run_ivcg_golden(capsys):
    code, out, _ = cli(capsys, "run", "-m", "ivcg", "-i", INSTANCES / "t2.json")
    assert code == 0
    assert out.splitlines() == ["a  1  0  0", "b  1  0  0", "c  4  2  2 *", "d  2  0  0",
                                "revenue = 2"]


def test_run_json(capsys):
    code, out, _ = cli(capsys, "run", "-m", "idm", "-i", INSTANCES / "t2.json", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["winner"] == "c" and doc["revenue"] == "1"
    assert doc["payments"]["a"] == "-1"


def test_run_vcg_deficit(capsys):
    _, out, _ = cli(capsys, "run", "-m", "vcg", "-i", INSTANCES / "e1.json")
    assert out.splitlines()[-1] == "revenue = -1"


def test_explain_marks_the_leading_agent(capsys):
    code, out, _ = cli(capsys, "explain", "-i", INSTANCES / "w.json")
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == ["id", "bid", "distance", "rwd", "prwd",
                                              "critical", "interruption"]
    assert lines[1].split()[-1] == "LEADING" and lines[1].split()[0] == "j1"
    assert [l.split()[4] for l in lines[1:]] == ["4", "0", "13", "80", "0"]


@pytest.mark.parametrize("argv", [
    ["run", "-m", "nope", "-i", "x.json"],
    ["run", "-m", "ivcg", "--delta", "1", "-i", "x.json"],
    ["run", "-i", "x.json"],
    ["audit", "-m", "ivcg", "-p", "sideways"],
    ["audit", "-m", "ivcg", "-p", "wbb", "--opponents", "all"],
    ["gen", "--out", "somewhere"],
])
def test_usage_errors_exit_64(capsys, argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 64


def test_bad_input_exits_65(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"seller_neighbors": ["a"], "agents": {"a": {"valuation": "-1"}}}')
    assert cli(capsys, "run", "-m", "ivcg", "-i", bad)[0] == 65
    assert cli(capsys, "run", "-m", "ivcg", "-i", tmp_path / "missing.json")[0] == 65


def test_audit_exit_codes(capsys, tmp_path):
    code, out, _ = cli(capsys, "audit", "-m", "ivcg", "-p", "ic", "--max-agents", 2, "--bid-max", 2)
    assert code == 0 and "holds" in out
    code, out, _ = cli(capsys, "audit", "-m", "vcg", "-p", "wbb", "--max-agents", 2,
                       "--bid-max", 1, "--witness-dir", tmp_path)
    assert code == 0 and "witness:" in out
    [doc] = list(tmp_path.glob("*.json"))
    _, profile = parse_instance(doc)
    assert run(VCG, profile).revenue < 0
    code, _, _ = cli(capsys, "audit", "-m", "ivcg", "-p", "ic", "--budget", 5)
    assert code == 2


def test_audit_mismatch_exits_1(capsys):
    code, out, _ = cli(capsys, "audit", "-m", "delta-ivcg", "--delta", "1", "-p", "ic",
                       "--max-agents", 3, "--bid-max", 3)
    assert code == 1 and "fails" in out


def test_audit_all_opponents(capsys):
    code, out, _ = cli(capsys, "audit", "-m", "pvcg", "-p", "ic", "--opponents", "all",
                       "--max-agents", 2, "--bid-max", 2)
    assert code == 0 and "fails" in out


def test_gen_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cli(capsys, "gen", "--count", 20, "--seed", 7, "--out", a)
    cli(capsys, "gen", "--count", 20, "--seed", 7, "--out", b)
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and names
    for p in a.iterdir():
        assert p.read_text() == (b / p.name).read_text()
        parse_instance(p)


def test_gen_exhaustive_writes_the_family(capsys, tmp_path):
    code, out, _ = cli(capsys, "gen", "--exhaustive", "--max-agents", 2, "--bid-max", 1,
                       "--out", tmp_path)
    assert code == 0
    assert len(list(tmp_path.iterdir())) == int(out.split()[1])


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "netauction", "run", "-m", "pvcg", "-i",
                          str(INSTANCES / "f3.json")], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[-1].startswith("revenue = ")
