import json
import subprocess
import sys

import numpy as np
import pytest

from spuds.cli import main
from conftest import three_blobs


@pytest.fixture(scope="module")
def blob_csv(tmp_path_factory):
    X, y = three_blobs(1)
    path = tmp_path_factory.mktemp("cli") / "blobs.csv"
    np.savetxt(path, np.column_stack([X, y]), delimiter=",", fmt="%.10g")
    return path


@pytest.fixture(scope="module")
def blob_record(blob_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("rec") / "run.json"
    labels = out.with_suffix(".labels")
    code = main(["cluster", "--input", str(blob_csv), "--label-column", "2", "--seed", "7",
                 "--c0", "2", "--output", str(out), "--labels-out", str(labels)])
    return code, json.loads(out.read_text()), labels


def test_cluster_recovers_blobs(blob_record):
    code, rec, labels = blob_record
    assert code == 0
    assert rec["result"]["selected_c"] == 3
    assert rec["result"]["n_clusters"] == 3
    assert rec["nmi"] == pytest.approx(1.0)
    assert rec["seed"] == 7
    assert len(labels.read_text().split()) == 600
    assert {"version", "config", "result", "timings"} <= set(rec)
    assert rec["config"]["n"] == 600 and rec["config"]["d"] == 2


def test_config_echo(blob_csv, tmp_path):
    out = tmp_path / "r.json"
    main(["cluster", "--input", str(blob_csv), "--label-column", "2", "--sigma", "0.5",
          "--c0", "5", "--lambda", "0.9", "--gamma-frac", "0.01", "--step", "10",
          "--c-max", "12", "--output", str(out)])
    cfg = json.loads(out.read_text())["config"]
    assert cfg["sigma_override"] == 0.5 and cfg["sigma"] == 0.5
    assert cfg["c0"] == 5
    assert cfg["lambda"] == 0.9
    assert cfg["gamma_frac"] == 0.01 and cfg["gamma"] == 6
    assert cfg["step"] == 10
    assert cfg["c_max_resolved"] == 12


def test_config_rerun_is_identical(blob_record, tmp_path):
    _, rec, labels = blob_record
    saved = tmp_path / "saved.json"
    saved.write_text(json.dumps(rec))
    again = tmp_path / "again.labels"
    assert main(["cluster", "--config", str(saved), "--output", str(tmp_path / "x.json"),
                 "--labels-out", str(again)]) == 0
    assert again.read_bytes() == labels.read_bytes()


def test_missing_file(tmp_path, capsys):
    path = tmp_path / "nope.csv"
    assert main(["cluster", "--input", str(path)]) == 1
    assert str(path) in capsys.readouterr().err


def test_bad_csv_reports_location(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,x\n5,6\n")
    assert main(["cluster", "--input", str(path)]) == 1
    err = capsys.readouterr().err
    assert "row 2" in err and "column index 1" in err


def test_warning_exit_code(tmp_path):
    rng = np.random.default_rng(101)
    path = tmp_path / "one.csv"
    np.savetxt(path, rng.standard_normal((200, 2)), delimiter=",")
    out = tmp_path / "r.json"
    assert main(["cluster", "--input", str(path), "--c0", "3", "--output", str(out)]) == 2
    assert json.loads(out.read_text())["result"]["warnings"]


def test_nmi_command(tmp_path, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    a.write_text("0\n0\n1\n1\n")
    b.write_text("5\n5\n2\n2\n")
    c.write_text("0\n0\n0\n0\n")
    assert main(["nmi", "--pred", str(a), "--truth", str(b)]) == 0
    assert main(["nmi", "--pred", str(c), "--truth", str(a)]) == 0
    d = tmp_path / "d"
    d.write_text("0\n1\n0\n1\n")
    assert main(["nmi", "--pred", str(d), "--truth", str(a)]) == 0
    assert capsys.readouterr().out.split() == ["1.000000", "0.000000", "0.000000"]


def test_nmi_length_mismatch(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text("0\n1\n")
    b.write_text("0\n1\n1\n")
    assert main(["nmi", "--pred", str(a), "--truth", str(b)]) == 1


def test_asymptotics_command(tmp_path):
    out = tmp_path / "study.json"
    assert main(["asymptotics", "--model", "gauss1d", "--statistic", "ncut",
                 "--n-grid", "200,400", "--seeds", "2", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["target"] == pytest.approx(2.256758, abs=1e-6)
    assert [row["n"] for row in doc["summary"]] == [200, 400]
    assert out.with_suffix(".csv").exists()


def test_asymptotics_single_grid(capsys):
    assert main(["asymptotics", "--statistic", "volume", "--n-grid", "300", "--seeds", "1"]) == 0
    assert len(json.loads(capsys.readouterr().out)["summary"]) == 1


def test_asymptotics_alpha_too_large(capsys):
    assert main(["asymptotics", "--alpha", "0.3", "--n-grid", "100", "--seeds", "1"]) == 1
    assert "rate condition" in capsys.readouterr().err


def test_asymptotics_unknown_model(capsys):
    assert main(["asymptotics", "--model", "cauchy"]) == 1
    err = capsys.readouterr().err
    assert "gauss1d" in err and "uniform1d" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spuds", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "cluster" in proc.stdout and "asymptotics" in proc.stdout
