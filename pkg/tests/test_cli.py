import json
import subprocess
import sys

import pytest

from descentlab.cli import PRECISION_ENV, RunConfig, main

from make_fixtures import fixture_path, golden_params
from reference_data import CASE_IJ


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("case,p", list(golden_params()))
def test_golden_descent_reports(case, p, tmp_path):
    i, j = CASE_IJ[case]
    out = tmp_path / "r.json"
    assert main(["descent", "--p", str(p), "--i", str(i), "--j", str(j), "--out", str(out)]) == 0
    assert out.read_bytes() == fixture_path(case, p).read_bytes()


def test_descent_exit_codes(capsys):
    code, out, _ = run(["descent", "--p", "19", "--i", "0", "--j", "1"], capsys)
    assert code == 0 and json.loads(out)["rank_bound"] == 0
    code, out, _ = run(["descent", "--p", "17", "--i", "0", "--j", "1"], capsys)
    assert code == 2 and json.loads(out)["params"]["case"] == "Other"
    code, out, err = run(["descent", "--p", "4", "--i", "0", "--j", "1"], capsys)
    assert code == 1 and "not prime" in json.loads(out)["error"]["message"]
    assert json.loads(out)["error"]["stage"] == "params"
    assert "not prime" in err


def test_reports_are_byte_deterministic(capsys):
    argv = ["descent", "--p", "43", "--i", "1", "--j", "1"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_precision_validation_and_env(capsys, monkeypatch):
    code, out, _ = run(["descent", "--p", "3", "--precision", "8"], capsys)
    assert code == 1 and json.loads(out)["error"]["stage"] == "config"
    monkeypatch.setenv(PRECISION_ENV, "20")
    code, out, _ = run(["descent", "--p", "3", "--precision", "12"], capsys)
    assert code == 0 and json.loads(out)["precision"] == 20
    monkeypatch.setenv(PRECISION_ENV, "5")
    code, _, _ = run(["descent", "--p", "3"], capsys)
    assert code == 1
    with pytest.raises(ValueError):
        RunConfig(command="verify-range", p_min=50, p_max=10)


def test_points_command(capsys):
    code, out, _ = run(["points", "--p", "11", "--i", "1", "--j", "1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["points"] == ["(0,0)", "inf"] and data["status"] == "proved"
    code, out, _ = run(["points", "--p", "11", "--i", "1", "--j", "1", "--format", "table"], capsys)
    assert out.strip() == "{(0,0), inf} proved"
    code, out, _ = run(["points", "--p", "17", "--i", "0", "--j", "1"], capsys)
    assert code == 2 and "(8,252)" in json.loads(out)["extra_points"]


def test_zeta_command(capsys):
    code, out, _ = run(["zeta", "--p", "3", "--i", "0", "--j", "1", "--q", "11", "--format", "table"],
                       capsys)
    assert code == 0 and out.strip() == "1+14T^2+121T^4, irreducible"
    code, out, _ = run(["zeta", "--p", "11", "--q", "11"], capsys)
    assert code == 1 and "bad reduction" in json.loads(out)["error"]["message"]


def test_appendix_command(capsys):
    code, out, _ = run(["appendix", "--fermat-bound", "200", "--format", "table"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "fermat: no solutions"
    assert "bounded check" in out


def test_verify_range(capsys):
    code, out, _ = run(["verify-range", "--p-min", "3", "--p-max", "60", "--case", "C4"], capsys)
    data = json.loads(out)
    assert code == 0 and data["all_pass"]
    assert [r["params"]["p"] for r in data["rows"]] == [5, 13, 29, 37, 53]
    assert all(r["rank_bound"] == 0 for r in data["rows"])


def test_verify_range_empty(capsys):
    code, out, _ = run(["verify-range", "--p-min", "24", "--p-max", "28"], capsys)
    data = json.loads(out)
    assert code == 0 and data["rows"] == [] and data["count"] == 0


def test_verify_range_table(capsys):
    code, out, _ = run(["verify-range", "--p-max", "20", "--format", "table"], capsys)
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("all pass: True")


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "descentlab.cli", "zeta", "--p", "5", "--j", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["numerator"] == "1+14T^2+121T^4"
