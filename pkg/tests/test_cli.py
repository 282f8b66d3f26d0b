import json
import subprocess
import sys

import pytest
from conftest import DATA

from posetinfo import __version__
from posetinfo.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), (json.loads(err) if err else None)


@pytest.fixture
def model_file(tmp_path, capsys):
    path = tmp_path / "model.json"
    code, _, _ = run(capsys, "learn", "--transactions", DATA / "transactions.txt",
                     "--sigma", "0.2", "--output", path)
    assert code == 0
    return path


def test_learn_report(capsys):
    code, report, _ = run(capsys, "learn", "--transactions", DATA / "transactions.txt",
                          "--sigma", "0.2")
    assert code == 0
    assert report["command"] == "learn" and report["version"] == __version__
    assert report["config"]["sigma"] == "0.2"
    assert report["config"]["solver"]["theta_tol"] == 1e-9
    result = report["result"]
    assert result["poset"]["elements"] == ["⊥", "2", "4,5", "1,2,4,5"]
    assert list(result["p"].values()) == pytest.approx([0.1, 0.3, 0.2, 0.4])
    assert result["N"] == 10


def test_learn_vectors_and_clusters(capsys):
    _, report, _ = run(capsys, "learn", "--vectors", DATA / "vectors.csv", "--sigma", "2/25")
    assert len(report["result"]["poset"]["elements"]) == 6
    _, report, _ = run(capsys, "learn", "--points", DATA / "points.csv",
                       "--clusters", DATA / "clusters.json", "--sigma", "0.2")
    assert report["result"]["poset"]["elements"] == ["a", "b", "c"]


def test_coords_round_trip(capsys, model_file, tmp_path):
    _, report, _ = run(capsys, "coords", "--input", model_file)
    theta = report["result"]["theta"]
    assert [theta[k] for k in ["⊥", "2", "4,5", "1,2,4,5"]] == pytest.approx(
        [-2.303, 1.099, 0.693, -0.405], abs=5e-4)
    assert report["result"]["psi"] == pytest.approx(2.303, abs=5e-4)
    again_path = tmp_path / "coords.json"
    again_path.write_text(json.dumps({"poset": json.loads(model_file.read_text())["result"]["poset"],
                                      "p": report["result"]["p"]}))
    _, again, _ = run(capsys, "coords", "--input", again_path)
    assert again["result"] == report["result"]


def test_gain_scan_and_gtest(capsys, model_file):
    _, report, _ = run(capsys, "gain-scan", "--input", model_file, "--parallel", "1")
    rows = report["result"]["rows"]
    assert [r["gain"] for r in rows] == pytest.approx([0.0523, 0.0170, 0.0040], abs=1e-4)
    _, report, _ = run(capsys, "gtest", "--input", model_file, "--subset", "2", "--N", "300")
    res = report["result"]
    assert res["lambda"] == pytest.approx(31.38, abs=6e-2)
    assert res["dof"] == 3 and res["dof_convention"] == "|S|-1"
    assert res["alternative"]["dof"] == 1
    assert res["alternative"]["p_value"] < res["p_value"]


def test_decompose_entropy_project_metric(capsys, model_file):
    _, report, _ = run(capsys, "decompose", "--input", model_file, "--chain", "∅;2;ALL")
    res = report["result"]
    assert [t["kl"] for t in res["terms"]] == pytest.approx([0.0523, 0.0542], abs=2e-4)
    assert res["sum_of_terms"] == pytest.approx(res["total"], abs=1e-9)
    _, report, _ = run(capsys, "entropy", "--input", model_file, "--subset", "2")
    assert report["result"]["information_gain"] == pytest.approx(0.0523, abs=1e-4)
    _, report, _ = run(capsys, "project", "--input", model_file, "--subset", '["2", "4,5"]')
    res = report["result"]
    assert res["kl_p_r"] + res["kl_r_q"] == pytest.approx(res["kl_p_q"], abs=1e-9)
    assert abs(res["theta_r"]["2"]) < 1e-9
    _, report, _ = run(capsys, "metric", "--input", model_file)
    res = report["result"]
    assert len(res["edges"]) == 4
    assert all(d["d"] >= 0 for d in res["distances"])


def test_mi(capsys):
    _, report, _ = run(capsys, "mi", "--input", DATA / "joint.json", "--subset", "2", "3",
                       "--chain", "∅;2 3;ALL", "--all-singletons")
    res = report["result"]
    assert res["mutual_information"] == pytest.approx(0.1562, abs=5e-4)
    assert [t["value"] for t in res["terms"]] == pytest.approx([0.1219, 0.0343], abs=1e-3)
    assert res["ranking"] == ["1", "3", "2"]
    assert list(res["mixed_conditionals"]["0"].values()) == pytest.approx(
        [0.0233, 0.472, 0.263, 0.241], abs=1e-3)


def test_validation_errors_exit_1(capsys, model_file, tmp_path):
    code, out, err = run(capsys, "gtest", "--input", model_file, "--subset", "nope")
    assert code == 1 and out is None
    assert err["exit_code"] == 1 and err["label"] == "nope"
    code, _, err = run(capsys, "learn", "--sigma", "0.2")
    assert code == 1
    code, _, err = run(capsys, "frobnicate")
    assert code == 1 and err["error"] == "UsageError"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "coords", "--input", bad)
    assert code == 1 and err["source"].startswith(str(bad))


def test_solver_errors_exit_2(capsys, tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({
        "poset": {"elements": ["⊥", "x1", "x2", "x3"],
                  "covers": [["⊥", "x1"], ["⊥", "x2"], ["x1", "x3"], ["x2", "x3"]]},
        "p": {"⊥": 0.1, "x1": 0.3, "x2": 0.2, "x3": 0.4}}))
    code, out, err = run(capsys, "project", "--input", path, "--subset", "x1", "x3",
                         "--max-outer", "1")
    assert code == 2 and out is None
    assert err["error"] == "MaxOuterIterations"


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "posetinfo.cli", "learn", "--vectors",
                           str(DATA / "vectors.csv"), "--sigma", "2/25"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "learn"
