import json
import pathlib
from typing import Any

import numpy as np
import pytest
import yaml

from lorprod.exceptions import ScenarioError
from lorprod.product import Event
from lorprod.scenario import (
    OUT_ENV_VAR,
    Settings,
    TaskKind,
    load_scenario,
    parse_scenario,
    resolve_out_dir,
)
from lorprod.space import BaseSpace, shortest_distance


@pytest.fixture
def document() -> dict[str, Any]:
    return {
        "space": {"path": {"num_nodes": 11}},
        "grid": {"num_steps": 10, "hop_radius": 3},
        "tasks": [{"kind": "tau", "source": [0.0, 5], "target": [1.0, 5]}],
        "seed": 1,
    }


def test_parse_minimal(document: dict[str, Any]) -> None:
    scenario = parse_scenario(document)
    assert scenario.space.num_nodes == 11
    assert scenario.seed == 1
    assert scenario.tolerance is None
    (task,) = scenario.tasks
    assert task.kind is TaskKind.tau
    assert task.name == "tau"
    assert task.gating
    assert task.pointer == "/tasks/0"
    assert task.get("source") == [0.0, 5]


def test_default_task_names(document: dict[str, Any]) -> None:
    document["tasks"] = [{"kind": "tau"}, {"kind": "tau"}, {"kind": "demo-bubble"}]
    names = [t.name for t in parse_scenario(document).tasks]
    assert names == ["tau", "tau_1", "demo-bubble"]
    assert not parse_scenario(document).tasks[2].gating


@pytest.mark.parametrize(
    ("change", "pointer"),
    [
        ({"colour": "red"}, "/colour: unknown field"),
        ({"seed": -1}, "/seed: expected a non-negative integer"),
        ({"seed": 1.5}, "/seed"),
        ({"tolerance": 0}, "/tolerance: expected a positive number"),
        ({"grid": [1, 2]}, "/grid: expected a mapping"),
        ({"density": 3}, "/density: expected a mapping"),
        ({"tasks": "tau"}, "/tasks: expected a list"),
        ({"tasks": [{"name": "x"}]}, "/tasks/0: a task is a mapping"),
        ({"tasks": [{"kind": "tau"}, {"kind": "spin"}]}, "/tasks/1/kind: unknown task 'spin'"),
        ({"tasks": [{"kind": "tau", "name": "a"}, {"kind": "maximizer", "name": "a"}]}, "/tasks/1/name"),
        ({"family": {"rho": {"form": "wobbly"}}}, "/family"),
        ({"family": {"rho": -1.0}}, "/family"),
        ({"space": {"path": {"num_nodes": 0}}}, "/space"),
        ({"space": {"nodes": ["a"]}}, "/space"),
        ({"space": 7}, "/space"),
    ],
)
def test_schema_errors(document: dict[str, Any], change: dict[str, Any], pointer: str) -> None:
    document |= change
    with pytest.raises(ScenarioError, match=f"^{pointer}"):
        parse_scenario(document)


def test_missing_space() -> None:
    with pytest.raises(ScenarioError, match="^/space: required field is missing"):
        parse_scenario({"tasks": []})
    with pytest.raises(ScenarioError, match="^/: a scenario is a mapping"):
        parse_scenario([1, 2])


def test_task_require(document: dict[str, Any]) -> None:
    task = parse_scenario(document).tasks[0]
    with pytest.raises(ScenarioError, match="/tasks/0: task 'tau' needs 'cases'"):
        task.require("cases")


def test_load_yaml_with_graph_file(tmp_path: pathlib.Path, triangle: BaseSpace) -> None:
    (tmp_path / "graph.json").write_text(json.dumps(triangle.to_dict()))
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump({"space": "graph.json", "tasks": [{"kind": "tau"}]}))
    scenario = load_scenario(path)
    assert scenario.space.nodes == triangle.nodes
    assert shortest_distance(scenario.space, "a", "c") == pytest.approx(2.0)


def test_load_errors(tmp_path: pathlib.Path) -> None:
    with pytest.raises(ScenarioError, match="cannot read scenario"):
        load_scenario(tmp_path / "absent.yaml")
    broken = tmp_path / "broken.yaml"
    broken.write_text("space: {path: [\n")
    with pytest.raises(ScenarioError, match="not valid JSON or YAML"):
        load_scenario(broken)
    missing_graph = tmp_path / "missing.yaml"
    missing_graph.write_text("space: nowhere.json\n")
    with pytest.raises(ScenarioError, match="^/space"):
        load_scenario(missing_graph)


def test_spacetime_and_dag(document: dict[str, Any]) -> None:
    scenario = parse_scenario(document)
    settings = Settings()
    st = scenario.spacetime(settings)
    assert st.num_layers == 10
    assert st.hop_radius == 3
    assert scenario.dag(settings) is scenario.dag(settings)


def test_explicit_grid_times(document: dict[str, Any]) -> None:
    document["grid"] = {"times": [0.0, 0.5, 1.0]}
    st = parse_scenario(document).spacetime(Settings(hop_radius=2))
    np.testing.assert_allclose(st.times, [0.0, 0.5, 1.0])
    assert st.hop_radius == 2

    document["grid"] = {"times": [0.5]}
    with pytest.raises(ScenarioError, match="^/grid"):
        parse_scenario(document).spacetime(Settings())


def test_node_and_event(document: dict[str, Any]) -> None:
    scenario = parse_scenario(document)
    st = scenario.spacetime(Settings())
    assert scenario.node("5", "/x") == 5
    assert scenario.event(st, [0.5, 5], "/x") == Event(5, 5)
    with pytest.raises(ScenarioError, match="^/x: 42 is not a node"):
        scenario.node(42, "/x")
    with pytest.raises(ScenarioError, match="not a grid time"):
        scenario.event(st, [0.55, 5], "/x")
    with pytest.raises(ScenarioError, match=r"\[time, node\]"):
        scenario.event(st, "start", "/x")


def test_density(document: dict[str, Any]) -> None:
    document["density"] = {"g": {"form": "exp_linear", "a": 1.0}, "times": 5}
    field = parse_scenario(document).density
    np.testing.assert_allclose(field.times, np.linspace(0.0, 1.0, 5))
    np.testing.assert_allclose(field.values[:, 0], np.exp(field.times))

    with pytest.raises(ScenarioError, match="^/density: the scenario has no density"):
        _ = parse_scenario({"space": {"path": {"num_nodes": 2}}}).density

    document["density"] = {"g": 0.0}
    with pytest.raises(ScenarioError, match="^/density"):
        _ = parse_scenario(document).density


def test_settings_replace() -> None:
    settings = Settings().replace(seed=4, tolerance=None)
    assert settings.seed == 4
    assert settings.tolerance == Settings().tolerance


def test_resolve_out_dir(monkeypatch: pytest.MonkeyPatch, tmp_path: pathlib.Path) -> None:
    monkeypatch.delenv(OUT_ENV_VAR, raising=False)
    assert resolve_out_dir(None, None) == pathlib.Path("lorprod_out")
    monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path / "env"))
    assert resolve_out_dir(None, None) == tmp_path / "env"
    assert resolve_out_dir(None, "field") == pathlib.Path("field")
    assert resolve_out_dir(tmp_path / "flag", "field") == tmp_path / "flag"
