import json

import numpy as np

from phformation.cli import main
from phformation.trajectory import read_csv, read_json


def test_run_golden_scenario(tmp_path, capsys):
    code = main(["run", "--config", "triangle", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "verdict: no collision" in out
    report = json.loads((tmp_path / "report_proposed.json").read_text())
    assert report["collision"] is False
    assert report["min_distance_overall"] > 1.0
    assert (tmp_path / "report_proposed.txt").is_file()
    header, table = read_csv(tmp_path / "trajectory_proposed.csv")
    assert header[0] == "t"
    assert header[-1] == "HF"
    assert table.shape[1] == len(header)


def test_run_missing_config(tmp_path, capsys):
    missing = tmp_path / "nope.toml"
    code = main(["run", "--config", str(missing), "--out", str(tmp_path)])
    assert code == 1
    assert str(missing) in capsys.readouterr().err


def test_run_invalid_config_is_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[agents]\ncount = 1\n")
    code = main(["run", "--config", str(bad), "--out", str(tmp_path)])
    assert code == 1
    assert "count" in capsys.readouterr().err


def test_run_baseline_fail_on_collision(tmp_path, capsys):
    code = main(
        [
            "run",
            "--config",
            "triangle",
            "--controller",
            "baseline",
            "--fail-on-collision",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 3
    assert "verdict: collision" in capsys.readouterr().out


def test_run_json_format(tmp_path):
    code = main(
        ["run", "--config", "tight_triangle", "--format", "json", "--out", str(tmp_path)]
    )
    assert code == 0
    columns, table = read_json(tmp_path / "trajectory_proposed.json")
    assert columns[0] == "t"
    assert table.shape[1] == len(columns)


def test_run_outputs_are_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert main(
            ["run", "--config", "tight_triangle", "--out", str(tmp_path / sub)]
        ) == 0
    first = (tmp_path / "a" / "trajectory_proposed.csv").read_bytes()
    second = (tmp_path / "b" / "trajectory_proposed.csv").read_bytes()
    assert first == second


def test_compare_controllers(tmp_path, capsys):
    code = main(["compare", "--config", "triangle", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    payload = json.loads((tmp_path / "compare.json").read_text())
    assert payload["baseline"]["collision"] is True
    assert payload["baseline"]["min_distance_overall"] < 1.0
    assert payload["proposed"]["collision"] is False
    assert payload["proposed"]["min_distance_overall"] > 1.0
    assert "proposed" in out and "baseline" in out
    assert (tmp_path / "compare.txt").is_file()
    assert (tmp_path / "trajectory_baseline.csv").is_file()


def test_verify_all_suites(capsys):
    code = main(["verify", "--trials", "2"])
    assert code == 0
    out = capsys.readouterr().out
    for suite in ("rank", "gradient", "force", "rk4", "energy", "sweep"):
        assert f"suite {suite}: PASS" in out


def test_verify_single_suite_reports_count(capsys):
    code = main(["verify", "--suite", "rank", "--max-n", "12"])
    assert code == 0
    out = capsys.readouterr().out
    assert "suite rank: PASS (11 graphs checked" in out


def test_verify_sweep_is_seed_deterministic(capsys):
    main(["verify", "--suite", "sweep", "--trials", "2", "--seed", "7"])
    first = capsys.readouterr().out
    main(["verify", "--suite", "sweep", "--trials", "2", "--seed", "7"])
    second = capsys.readouterr().out
    assert first == second


def test_graph_csv_output(capsys):
    code = main(["graph", "--agents", "8"])
    assert code == 0
    out = capsys.readouterr().out
    edge_block, matrix_block = out.strip().split("\n\n")
    edge_lines = edge_block.splitlines()
    assert edge_lines[0] == "edge,tail,head"
    assert len(edge_lines) == 1 + 28
    assert edge_lines[1] == "E1,1,2"
    matrix_lines = matrix_block.splitlines()
    assert matrix_lines[0] == "node," + ",".join(f"E{k}" for k in range(1, 29))
    values = np.array(
        [[int(cell) for cell in line.split(",")[1:]] for line in matrix_lines[1:]]
    )
    expected_block = np.vstack([np.ones(7, dtype=int), -np.eye(7, dtype=int)])
    assert np.array_equal(values[:, :7], expected_block)


def test_graph_json_output(capsys):
    code = main(["graph", "--agents", "3", "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["edges"] == [[1, 2], [1, 3], [2, 3]]
    assert payload["incidence"] == [[1, 1, 0], [-1, 0, 1], [0, -1, -1]]


def test_graph_rejects_single_agent(capsys):
    assert main(["graph", "--agents", "1"]) == 1
    assert "agent_count" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    assert main(["graph"]) == 1  # missing required --agents
    assert main(["run", "--config", "triangle", "--format", "xml"]) == 1
    assert main([]) == 1
