import csv
import io
import json
import subprocess
import sys

import pytest

from primroots.cli import main
from primroots.dickman import u_of
from primroots.errors import ContractError


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_construct_p41():
    code, text = run("construct", "--p", "41")
    assert code == 0
    d = json.loads(text)
    assert d["result"] == 6 and d["least_primitive_root"] == 6


def test_construct_trace_has_levels():
    code, text = run("construct", "--p", "41", "--trace")
    assert code == 0
    d = json.loads(text)
    assert [lv["m"] for lv in d["levels"]] == [1, 1]


@pytest.mark.parametrize(
    "argv",
    [
        ("rho", "--u", "-1"),
        ("rho", "--u", "3", "--bogus"),
        ("construct", "--p", "2"),
        ("construct", "--p", "15"),
        ("construct", "--p", "41", "--format", "csv"),
        ("gd", "--p", "7", "--d", "4"),
        ("nonexistent",),
        ("survey", "--x", "1e9"),
    ],
)
def test_usage_and_domain_errors_exit_1(argv, capsys):
    code, _ = run(*argv)
    assert code == 1
    assert capsys.readouterr().err


def test_small_commands():
    assert json.loads(run("rho", "--u", "2")[1])["rho"] == pytest.approx(1 - 0.6931471805599453, rel=1e-11)
    (row,) = json.loads(run("gd", "--p", "41", "--d", "5")[1])["values"]
    assert (row["d"], row["g_d"]) == (5, 2)
    assert row["ratio"] == pytest.approx(2 / 41 ** (1 / u_of(5)), rel=1e-10)
    assert json.loads(run("jacobsthal", "--n", "30")[1])["j"] == 6
    d = json.loads(run("dlog", "--p", "41", "--a", "10")[1])
    assert pow(d["generator"], d["log"], 41) == 10
    assert json.loads(run("psi", "--x", "100", "--y", "10")[1])["psi"] == 46
    assert json.loads(run("u-of-d", "--d", "2")[1])["u"] == pytest.approx(1.6487212707, rel=1e-9)


def test_rho_table_csv(tmp_path):
    code, text = run("rho-table", "--u-max", "3", "--step", "0.5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["u", "rho"] and len(rows) == 8


def test_env_defaults_and_flag_precedence(monkeypatch):
    monkeypatch.setenv("PRIMROOTS_EPSILON", "0.05")
    d = json.loads(run("construct", "--p", "41")[1])
    assert d["bound_exponents"]["epsilon"] == 0.05
    d = json.loads(run("construct", "--p", "41", "--epsilon", "0.02")[1])
    assert d["bound_exponents"]["epsilon"] == 0.02


def test_deterministic_output(tmp_path):
    a = run("survey", "--x", "5000", "--y", "5", "--out", str(tmp_path / "a"))
    b = run("survey", "--x", "5000", "--y", "5", "--shards", "3", "--out", str(tmp_path / "b"))
    assert a[0] == b[0] == 0
    for name in ("records.jsonl", "conditions.csv", "omega_moments.csv", "density.csv", "histograms.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert run("construct", "--p", "998244353")[1] == run("construct", "--p", "998244353")[1]


def test_survey_truncated_exit_2(tmp_path):
    code, text = run("survey", "--x", "20000", "--time-budget", "0", "--out", str(tmp_path))
    assert code == 2
    assert json.loads(text)["truncated"] is True


def test_survey_csv(tmp_path):
    code, text = run("survey", "--x", "2000", "--format", "csv")
    assert code == 0 and text.splitlines()[0].count(",") >= 1


def test_contract_error_exit_3(monkeypatch, capsys):
    import primroots.cli as C

    def boom(*a, **k):
        raise ContractError("forced", context={"q": 5})

    monkeypatch.setattr(C, "construct_simultaneous_nonresidue", boom)
    code, _ = run("construct", "--p", "41")
    assert code == 3
    err = capsys.readouterr().err.splitlines()
    assert json.loads(err[-1])["error"] == "forced"


def test_selftest_passes():
    code, text = run("selftest", "--limit", "2000")
    assert code == 0
    d = json.loads(text)
    assert d["all_pass"] and all(c["pass"] for c in d["checks"].values())


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "primroots", "construct", "--p", "13"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["result"] == 2
