import json
from fractions import Fraction

import pytest

from hzcoeff.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main, parse


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_defaults():
    cfg, cmd, _ = parse(["table", "--disc", "5", "--weight", "4", "--m", "-1/5"])
    assert cmd == "table"
    assert (cfg.D, cfg.k, cfg.m) == (5, 4, Fraction(-1, 5))
    assert cfg.precision_bits == 192 and cfg.format == "text"


def test_env_precision(monkeypatch):
    monkeypatch.setenv("HZ_PRECISION_BITS", "256")
    cfg, _, _ = parse(["coeff", "--nu", "2"])
    assert cfg.precision_bits == 256


@pytest.mark.parametrize("argv", [
    ["table", "--m", "-1/3", "--disc", "5"],
    ["table", "--weight", "3"],
    ["table", "--weight", "2"],
    ["table", "--disc", "7"],
    ["table", "--m", "1/5"],
    ["table", "--oracle-grid", "48"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err


def test_bad_nu(capsys):
    code, _, err = run(capsys, "coeff", "--nu", "1 + sqrt(3)")
    assert code == EXIT_USAGE


def test_table_subset_csv(capsys):
    code, out, _ = run(capsys, "table", "--nu", "2", "--nu", "3/2 - 3/10*sqrt(5)", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("# hz-coeff table") and lines[1].startswith("# config")
    assert lines[3] == "2,2,1000,2^3 * 5^3,4,3050000,2^4 * 5^5 * 61"
    assert lines[4] == "3/2 - 3/10*sqrt(5),3,27,3^3,9/5,-18198,-1 * 2 * 3^3 * 337"


def test_deterministic_output(capsys):
    a = run(capsys, "table", "--nu", "2", "--format", "json")[1]
    b = run(capsys, "table", "--nu", "2", "--format", "json")[1]
    assert a == b
    obj = json.loads(a)
    assert obj["config"]["m"] == "-1/5" and obj["rows"][0]["c_nu"] == 3050000


def test_certification_failure_exit(capsys):
    code, _, err = run(capsys, "table", "--nu", "3", "--alpha-cap", "40")
    assert code == EXIT_USAGE and "certification" in err


def test_coeff_dual_coordinates(capsys):
    code, out, _ = run(capsys, "coeff", "--nu", "1,0", "--divisor-norm", "alternative")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "0 + 1/5*sqrt(5)\tdivisor_sum\t1"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--nu", "2", "--value", "3050000", "--assume-trivial-cusp-space")
    assert code == EXIT_OK and "cusp space trivial (assumed): True" in out
    code, out, _ = run(capsys, "verify", "--nu", "2", "--value", "3050001")
    assert code == EXIT_VERIFY and "FAIL" in out
    code, _, _ = run(capsys, "verify", "--nu", "2", "--value", "1", "--value", "2")
    assert code == EXIT_USAGE


def test_weilrep_check(capsys):
    code, out, _ = run(capsys, "weilrep-check", "--disc", "13", "--format", "json")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert obj["ok"] and obj["report"]["order"] == 13


def test_lift(capsys, tmp_path):
    p = tmp_path / "F.json"
    p.write_text(json.dumps({"weight": "4", "dual": False, "terms": [{"gamma": 0, "n": "0", "c": "1"}]}))
    code, out, _ = run(capsys, "lift", "--input", str(p), "--nu", "2", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["lift"]["constant"] == "1/120"
    code, _, _ = run(capsys, "lift", "--input", str(tmp_path / "missing.json"), "--nu", "2")
    assert code == EXIT_USAGE


def test_oracle_compare_small(capsys, tmp_path):
    csv_path = tmp_path / "o.csv"
    code, out, _ = run(capsys, "oracle-compare", "--oracle-radius", "24", "--oracle-grid", "32",
                       "--divisor-norm", "alternative", "--csv-out", str(csv_path))
    assert code == EXIT_OK
    assert out.count("PASS") == 2
    assert csv_path.exists()
    code, out, _ = run(capsys, "oracle-compare", "--oracle-radius", "24", "--oracle-grid", "32")
    assert code == EXIT_VERIFY  # the printed divisor normalization predicts 1 at (1+sqrt5)/2
