import csv
import io
import json
import subprocess
import sys

import pytest

from alphapart.cli import OUTPUT_DIR_ENV, main


def data_rows(text):
    body = "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))
    return list(csv.reader(io.StringIO(body)))


def test_count_example(capsys):
    assert main(["count", "--alpha", "1/2", "--n", "3", "--format", "csv", "--output", "-"]) == 0
    rows = data_rows(capsys.readouterr().out)
    assert rows == [["n", "j", "q"], ["3", "1", "7"], ["3", "2", "15"], ["3", "3", "1"]]


def test_count_brute_method(capsys):
    assert main(["count", "--alpha", "0.7", "--n", "12", "--method", "brute", "--output", "-"]) == 0
    brute = json.loads(capsys.readouterr().out)["result"]["rows"][0]
    assert main(["count", "--alpha", "0.7", "--n", "12", "--output", "-"]) == 0
    table = json.loads(capsys.readouterr().out)["result"]["rows"][0]
    assert brute["counts"] == table["counts"] and brute["q_n"] == table["q_n"]


def test_asym_exponent(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert main(["asym", "--alpha", "1/2", "--n", "10000"]) == 0
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    doc = json.loads(files[0].read_text())
    assert doc["result"]["exponent"] == pytest.approx(2 / 3)
    assert doc["config"]["params"]["alpha_rational"] == [1, 2]
    assert str(files[0]) in capsys.readouterr().out


@pytest.mark.parametrize("alpha", ["1.5", "1.2", "abc", "0"])
def test_invalid_alpha_exit_2(alpha, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert main(["count", "--alpha", alpha, "--n", "10"]) == 2


def test_bad_flag_exit_2():
    proc = subprocess.run([sys.executable, "-m", "alphapart.cli", "count", "--alpha", "1/2"],
                          capture_output=True)
    assert proc.returncode == 2


def test_numeric_failure_exit_3(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    args = ["sample", "--alpha", "1/2", "--n", "3000", "--target", "5", "--max-attempts", "2",
            "--exact-classes", "0"]
    assert main(args) == 3
    assert main(["count", "--alpha", "1/2", "--n", "400", "--memory-budget", "1000"]) == 3


@pytest.mark.parametrize("args", [
    ["sample", "--alpha", "1/2", "--n", "100", "--target", "200", "--seed", "4", "--format", "csv"],
    ["verify", "--alpha", "0.7", "--n-grid", "20,40", "--circle"],
    ["saddle", "--alpha", "1/3", "--n-grid", "50,500", "--u", "0.5", "--format", "csv"],
    ["h-check", "--alpha", "1/2", "--tau-grid", "0.1,0.05"],
])
def test_byte_identical(args, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    text_a = a.read_bytes().replace(str(a).encode(), b"X")
    text_b = b.read_bytes().replace(str(b).encode(), b"X")
    assert text_a == text_b


def test_sample_csv_lengths(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sample", "--alpha", "1/2", "--n", "50", "--target", "100", "--format", "csv",
                 "--output", str(out)]) == 0
    text = out.read_text()
    assert "generator" in text and "version" in text
    rows = data_rows(text)
    assert rows[0] == ["sample", "length"] and len(rows) == 101


def test_verify_tidy_csv(capsys):
    assert main(["verify", "--alpha", "1/2", "--n-grid", "30,60", "--format", "csv", "--output", "-"]) == 0
    rows = data_rows(capsys.readouterr().out)
    assert rows[0] == ["n", "metric", "param", "value"]
    metrics = {(r[0], r[1]) for r in rows[1:]}
    assert ("60", "ks_values") in metrics and ("30", "tail_threshold_T") in metrics
