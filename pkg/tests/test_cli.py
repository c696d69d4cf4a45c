import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import centered_output_net
from relucomplex import cli
from relucomplex.model import diamond_model, save_model


def run_cli(*args):
    return cli.main([str(a) for a in args])


def test_version(capsys):
    assert run_cli("--version") == 0
    out = capsys.readouterr().out
    assert "relucomplex" in out and "schema" in out


def test_no_command(capsys):
    assert run_cli() == 2


def test_extract_smoke(tmp_path):
    code = run_cli(
        "extract", "--random", "2,4,10,1", "--seed", "0", "--domain", "cube",
        "--lo", "-1", "--hi", "1", "--out", tmp_path / "run", "--stats",
    )
    assert code == 0
    for name in ("vertices.csv", "edges.csv", "summary.json", "stats.jsonl"):
        assert (tmp_path / "run" / name).exists()
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["D"] == 2 and summary["m"] == 4 and summary["t"] == 40
    assert summary["residual"]["max_abs"] <= 1e-9


def test_extract_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run_cli(
            "extract", "--random", "2,3,8,1", "--seed", "3", "--out", tmp_path / name
        ) == 0
    for artifact in ("vertices.csv", "edges.csv"):
        assert (tmp_path / "a" / artifact).read_bytes() == (
            tmp_path / "b" / artifact
        ).read_bytes()


def test_extract_model_and_random_exclusive(tmp_path):
    assert run_cli("extract", "--out", tmp_path) == 2
    assert run_cli(
        "extract", "--model", "x.json", "--random", "2,1,2,1", "--out", tmp_path
    ) == 2


def test_extract_invalid_model(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert run_cli("extract", "--model", bad, "--out", tmp_path / "o") == 2
    assert "error" in capsys.readouterr().err


def test_count_square_cases(tmp_path):
    # hyperplane missing the domain: counts match the bare square
    doc = {"in_dim": 2, "layers": [{"weights": [[1.0, 1.0]], "bias": [10.0]}]}
    path = tmp_path / "miss.json"
    path.write_text(json.dumps(doc))
    assert run_cli(
        "count", "--model", path, "--include-output", "--domain", "cube",
        "--lo", "0", "--hi", "1", "--out", tmp_path / "c0",
    ) == 0
    counts = json.loads((tmp_path / "c0" / "counts.json").read_text())
    assert counts["dims"] == [4, 4, 1] and counts["euler"] == 1

    doc = {"in_dim": 2, "layers": [{"weights": [[1.0, 1.0]], "bias": [-0.5]}]}
    path = tmp_path / "line.json"
    path.write_text(json.dumps(doc))
    assert run_cli(
        "count", "--model", path, "--include-output", "--domain", "cube",
        "--lo", "0", "--hi", "1", "--out", tmp_path / "c1",
    ) == 0
    counts = json.loads((tmp_path / "c1" / "counts.json").read_text())
    assert counts["dims"] == [6, 7, 2]
    assert counts["euler"] == 1 and counts["regions"] == 2


def test_count_budget_truncation(tmp_path):
    assert run_cli(
        "count", "--random", "2,2,6,1", "--seed", "1", "--max-cells", "1",
        "--out", tmp_path,
    ) == 3
    counts = json.loads((tmp_path / "counts.json").read_text())
    assert counts["truncated"] is True and len(counts["dims"]) == 2


def test_boundary_diamond(tmp_path):
    path = tmp_path / "diamond.json"
    save_model(diamond_model(), path)
    code = run_cli(
        "boundary", "--model", path, "--lo", "-2", "--hi", "2", "--out", tmp_path / "b"
    )
    assert code == 0
    metrics = json.loads((tmp_path / "b" / "metrics.json").read_text())
    assert metrics["compactness"] == pytest.approx(np.pi / 4, abs=1e-12)
    assert (tmp_path / "b" / "boundary.svg").exists()


def test_boundary_empty(tmp_path):
    doc = {
        "in_dim": 2,
        "layers": [
            {"weights": [[1.0, 0.0]], "bias": [0.0]},
            {"weights": [[1.0]], "bias": [100.0]},
        ],
    }
    path = tmp_path / "high.json"
    path.write_text(json.dumps(doc))
    assert run_cli("boundary", "--model", path, "--out", tmp_path / "b") == 3


def test_boundary_3d_obj(tmp_path):
    doc = {"in_dim": 3, "layers": [{"weights": [[0.0, 0.0, 1.0]], "bias": [0.0]}]}
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(doc))
    assert run_cli("boundary", "--model", path, "--out", tmp_path / "b") == 0
    obj = (tmp_path / "b" / "boundary.obj").read_text().splitlines()
    assert sum(1 for l in obj if l.startswith("v ")) == 4
    assert sum(1 for l in obj if l.startswith("f ")) == 1


def test_prune_model_cmd(tmp_path):
    net = centered_output_net(2, 3, 8, seed=0)
    path = tmp_path / "net.json"
    save_model(net, path)
    assert run_cli("prune-model", "--model", path, "--out", tmp_path / "p") == 0
    report = json.loads((tmp_path / "p" / "prune_report.json").read_text())
    assert report["parameters_after"] <= report["parameters_before"]
    assert len(report["labels"]) == net.hidden_neuron_count()
    assert (tmp_path / "p" / "pruned_model.json").exists()


def test_validate_cmd(tmp_path):
    assert run_cli(
        "validate", "--random", "2,4,10,1", "--seed", "0", "--samples", "20000",
        "--out", tmp_path,
    ) == 0
    doc = json.loads((tmp_path / "validation.json").read_text())
    assert doc["midpoints"]["n_fail"] == 0
    assert doc["euler"] == 1
    assert doc["sampled_subset_of_regions"] is True


def test_bench_cmd(tmp_path):
    assert run_cli(
        "bench", "--dims", "1:2", "--widths", "4,8", "--depth", "2", "--seeds", "2",
        "--out", tmp_path,
    ) == 0
    rows = (tmp_path / "bench.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 2 * 2
    summary = json.loads((tmp_path / "bench_summary.json").read_text())
    assert "slope" in summary


def test_config_mirror(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"random": "2,2,4,1", "seed": 3, "out": str(tmp_path / "c")}))
    assert run_cli("extract", "--config", cfg) == 0
    assert (tmp_path / "c" / "vertices.csv").exists()
    # explicit flags override config values
    assert run_cli("extract", "--config", cfg, "--out", tmp_path / "d") == 0
    assert (tmp_path / "d" / "vertices.csv").exists()


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "relucomplex", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "relucomplex" in proc.stdout


def test_thread_count_does_not_change_outputs(tmp_path):
    # --threads caps the BLAS pool before numpy loads; results must not move
    for n in ("1", "2"):
        proc = subprocess.run(
            [
                sys.executable, "-m", "relucomplex", "extract",
                "--random", "2,3,8,1", "--seed", "5",
                "--out", str(tmp_path / n), "--threads", n,
            ],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
    for artifact in ("vertices.csv", "edges.csv"):
        assert (tmp_path / "1" / artifact).read_bytes() == (
            tmp_path / "2" / artifact
        ).read_bytes()
