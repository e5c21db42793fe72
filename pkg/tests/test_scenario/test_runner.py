import json
import pathlib
from typing import Any

import pytest
import yaml

from lorprod.scenario import (
    EXIT_OK,
    EXIT_SCENARIO,
    EXIT_TASK_FAILED,
    EXIT_UNWRITABLE,
    OUT_ENV_VAR,
    TaskKind,
    parse_scenario,
    run_scenario,
    select_task,
)


def _write(tmp_path: pathlib.Path, document: dict[str, Any]) -> pathlib.Path:
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(document))
    return path


@pytest.fixture
def flat_document() -> dict[str, Any]:
    return {
        "space": {"path": {"num_nodes": 11}},
        "grid": {"num_steps": 10, "hop_radius": 3},
        "tasks": [
            {"kind": "tau", "source": [0.0, 5], "target": [1.0, 5], "expected": 1.0},
            {"kind": "maximizer", "source": [0.0, 5], "target": [1.0, 5]},
        ],
        "seed": 1,
    }


def test_run_writes_report(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    out = tmp_path / "out"
    result = run_scenario(_write(tmp_path, flat_document), out=out)
    assert result.exit_code == EXIT_OK
    assert result.out_dir == out
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 1
    tau, maxi = report["tasks"]
    assert tau["passed"]
    assert tau["result"]["tau"] == pytest.approx(1.0)
    assert tau["artifacts"] == ["tau_table.csv"]
    assert maxi["result"]["character"] == "timelike"
    assert maxi["result"]["length"] == pytest.approx(1.0)
    header = (out / "tau_table.csv").read_text().splitlines()[0]
    assert header == "layer,node,tau"


def test_failed_task(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    flat_document["tasks"][0]["expected"] = 2.0
    result = run_scenario(_write(tmp_path, flat_document), out=tmp_path / "out")
    assert result.exit_code == EXIT_TASK_FAILED
    assert result.message == "failed tasks: tau"
    record = result.bundle.report["tasks"][0]["result"]
    assert record["relative_error"] == pytest.approx(0.5)


def test_non_gating_failure(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    flat_document["tasks"][0] |= {"expected": 2.0, "gating": False}
    result = run_scenario(_write(tmp_path, flat_document), out=tmp_path / "out")
    assert result.exit_code == EXIT_OK
    assert not result.bundle.report["tasks"][0]["passed"]


def test_computation_errors_fail_the_task(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    flat_document["tasks"] = [{"kind": "tcd", "cases": [{"start": [0.0, 0.5], "end": [0.5, 1.0], "region": [99]}]}]
    flat_document["density"] = {"g": 1.0, "times": 5}
    result = run_scenario(_write(tmp_path, flat_document), out=tmp_path / "out")
    assert result.exit_code == EXIT_SCENARIO
    assert "/tasks/0/cases/0/region" in result.message

    flat_document["tasks"][0]["cases"][0]["region"] = [0]
    flat_document["tasks"][0]["cases"][0]["end"] = [0.5, 2.0]
    result = run_scenario(_write(tmp_path, flat_document), out=tmp_path / "out")
    assert result.exit_code == EXIT_TASK_FAILED
    assert "DomainError" in result.bundle.report["tasks"][0]["result"]["error"]


def test_schema_error(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    flat_document["colour"] = "red"
    result = run_scenario(_write(tmp_path, flat_document), out=tmp_path / "out")
    assert result.exit_code == EXIT_SCENARIO
    assert result.out_dir is None
    assert result.message.startswith("/colour")
    assert not (tmp_path / "out").exists()


def test_unwritable_output(tmp_path: pathlib.Path, flat_document: dict[str, Any]) -> None:
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    result = run_scenario(_write(tmp_path, flat_document), out=blocker)
    assert result.exit_code == EXIT_UNWRITABLE
    assert result.message.startswith("cannot write to")
    assert result.bundle.report["tasks"]


def test_overrides_and_env(
    tmp_path: pathlib.Path,
    flat_document: dict[str, Any],
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path / "env"))
    result = run_scenario(_write(tmp_path, flat_document), seed=7, tol=0.5)
    assert result.out_dir == tmp_path / "env"
    assert result.bundle.report["seed"] == 7
    assert result.bundle.report["tolerance"] == 0.5
    assert (tmp_path / "env" / "report.json").exists()


def test_tcd_task(tmp_path: pathlib.Path) -> None:
    document = {
        "space": {"path": {"num_nodes": 2}},
        "density": {"g": 1.0, "times": 11},
        "tasks": [{"kind": "tcd", "cases": [{"start": [0.0, 0.25], "end": [0.5, 1.0]}]}],
    }
    out = tmp_path / "out"
    result = run_scenario(_write(tmp_path, document), out=out, seed=0)
    assert result.exit_code == EXIT_OK
    (case,) = result.bundle.report["tasks"][0]["result"]["cases"]
    assert case["decomposition_residual"] < 1e-12
    assert (out / "entropy_curve_case0.csv").exists()


def test_select_task(flat_document: dict[str, Any]) -> None:
    scenario = parse_scenario(flat_document)
    chosen = select_task(scenario, TaskKind.maximizer)
    assert [t.name for t in chosen.tasks] == ["maximizer"]
    fallback = select_task(scenario, TaskKind.hyperbolicity)
    assert fallback.tasks[0].name == "hyperbolicity"
    assert fallback.tasks[0].params == {}
    assert len(scenario.tasks) == 2
