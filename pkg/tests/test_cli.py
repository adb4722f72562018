import json

import pandas as pd
import pytest

from src.cli import build_parser, run
from src.config import settings


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def out(tmp_path):
    return str(tmp_path / "results")


def test_parser_lists_commands():
    parser = build_parser()
    args = parser.parse_args(["check", "--builtin", "nicholson2patch", "--reverify", "3"])
    assert args.command == "check" and args.reverify == 3


def test_check_fires_on_two_patch(out, capsys):
    assert run(["check", "--builtin", "nicholson2patch", "--out", out]) == 0
    assert "verdict: PERMANENT" in capsys.readouterr().out
    with open(f"{out}/nicholson2patch_check.json", encoding="utf-8") as f:
        report = json.load(f)
    assert report["verdict"]["outcome"] == "PERMANENT"


def test_check_without_verdict(out, capsys):
    assert run(["check", "--builtin", "example3.5", "--out", out]) == 3
    assert "blocked: β unbounded" in capsys.readouterr().out


def test_check_json_output(out, capsys):
    assert run(["check", "--builtin", "scalar-nicholson", "--out", out, "--json", "--grid", "50"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["grid"]["points"] == 50
    assert data["checks"]["H2"]["status"] == "certified"


def test_verify_exact_solution(out):
    assert run(["verify", "--builtin", "example3.4", "--out", out, "--grid", "200"]) == 0


def test_perturbed_system_fails_verification(out, capsys):
    assert run(["verify", "--builtin", "example3.4", "--perturb-d", "0.1", "--out", out, "--grid", "200"]) == 4
    assert "FAILED" in capsys.readouterr().out


def test_verify_needs_a_solution(out, capsys):
    assert run(["verify", "--builtin", "nicholson2patch", "--out", out]) == 1
    assert "--solution" in capsys.readouterr().err


def test_verify_zero_system(tmp_path, out):
    spec = _write(
        tmp_path / "zero.json",
        {"version": 1, "name": "zero", "n": 1, "d": [1.0], "solution": {"components": [0.0], "valid_from": 0.0}},
    )
    assert run(["verify", "--spec", spec, "--out", out, "--grid", "20"]) == 0


def test_verify_with_solution_file(tmp_path, out):
    solution = _write(tmp_path / "sol.json", {"components": [0.0], "valid_from": 0.0})
    spec = _write(tmp_path / "decay.json", {"version": 1, "name": "decay", "n": 1, "d": [2.0]})
    assert run(["verify", "--spec", spec, "--solution", solution, "--out", out, "--grid", "20"]) == 0


def test_malformed_spec_names_the_location(tmp_path, out, capsys):
    spec = _write(tmp_path / "bad.json", {"version": 1, "n": 0, "d": []})
    assert run(["check", "--spec", spec, "--out", out]) == 1
    err = capsys.readouterr().err
    assert "bad.json" in err and "$.n" in err


def test_invalid_json_is_a_usage_error(tmp_path, out, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run(["check", "--spec", str(path), "--out", out]) == 1
    assert "invalid JSON" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["permanence", "--builtin", "scalar-nicholson", "--ensemble", "0"],
        ["check"],
        ["check", "--builtin", "nicholson2patch", "--spec", "x.json"],
        ["check", "--builtin", "nosuchsystem"],
        ["simulate", "--builtin", "scalar-nicholson", "--step", "0.5"],
        ["check", "--builtin", "nicholson2patch", "--tcheck", "100", "--tmax", "10"],
        ["explode"],
    ],
)
def test_usage_errors(argv, out):
    assert run(argv + ["--out", out] if argv[0] != "explode" else argv) == 1


def test_simulate_writes_the_grid(out, capsys):
    argv = ["simulate", "--builtin", "scalar-nicholson", "--horizon", "5", "--step", "0.05", "--out", out]
    assert run(argv) == 0
    frame = pd.read_csv(f"{out}/scalar-nicholson_trajectory.csv")
    assert list(frame.columns) == ["t", "x1"]
    assert len(frame) == 101
    assert frame["t"].iloc[-1] == pytest.approx(5.0)
    with open(f"{out}/scalar-nicholson_summary.json", encoding="utf-8") as f:
        assert json.load(f)["rows"] == 101
    assert "trajectory:" in capsys.readouterr().out


def test_simulate_is_deterministic(tmp_path):
    texts = []
    for name in ("a", "b"):
        target = str(tmp_path / name)
        argv = ["simulate", "--builtin", "nicholson2patch", "--horizon", "10", "--initial", "0.5,2", "--out", target]
        assert run(argv) == 0
        texts.append((tmp_path / name / "nicholson2patch_trajectory.csv").read_bytes())
    assert texts[0] == texts[1]


def test_initial_segment_from_file(tmp_path, out):
    initial = _write(tmp_path / "phi.json", [1.5])
    argv = ["simulate", "--builtin", "scalar-nicholson", "--horizon", "2", "--initial", initial, "--out", out]
    assert run(argv) == 0
    frame = pd.read_csv(f"{out}/scalar-nicholson_trajectory.csv")
    assert frame["x1"].iloc[0] == pytest.approx(1.5)


def test_integration_failure_exit_code(out, monkeypatch):
    monkeypatch.setattr(settings.integrator, "max_steps", 10)
    assert run(["simulate", "--builtin", "scalar-nicholson", "--horizon", "5", "--out", out]) == 2


def test_exported_spec_reproduces_the_report(tmp_path):
    exported = str(tmp_path / "ex35.json")
    first, second = str(tmp_path / "first"), str(tmp_path / "second")
    assert run(["check", "--builtin", "example3.5", "--export-spec", exported, "--out", first]) == 3
    assert run(["check", "--spec", exported, "--out", second]) == 3
    a = (tmp_path / "first" / "example3.5_check.json").read_text(encoding="utf-8")
    b = (tmp_path / "second" / "example3.5_check.json").read_text(encoding="utf-8")
    assert a == b


def test_permanence_json(out, capsys):
    argv = ["permanence", "--builtin", "scalar-nicholson", "--ensemble", "3", "--horizon", "30"]
    argv += ["--step", "0.05", "--seed", "4", "--json", "--extinction", "--out", out]
    assert run(argv) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ensemble_size"] == 3 and data["seed"] == 4
    assert data["lower_bound_positive"]
    assert data["extinction"]["extinct"] is False
