"""Run a scenario's tasks and write the report bundle."""

import dataclasses
import json
import logging
import math
import os
import pathlib
from collections.abc import Mapping
from typing import Any

import numpy as np
from cogent3.core.table import Table

from lorprod.exceptions import ScenarioError
from lorprod.scenario._scenario import Scenario, TaskKind, TaskSpec, load_scenario
from lorprod.scenario._settings import Settings, resolve_out_dir
from lorprod.scenario._tasks import RunContext, run_task
from lorprod.util import process_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TASK_FAILED = 1
EXIT_SCENARIO = 2
EXIT_UNWRITABLE = 3


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple | np.ndarray):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclasses.dataclass
class ReportBundle:
    """report.json content with the CSV tables and JSON documents of the tasks."""

    report: dict[str, Any]
    tables: dict[str, Table] = dataclasses.field(default_factory=dict)
    documents: dict[str, dict[str, Any]] = dataclasses.field(default_factory=dict)

    @property
    def failed_tasks(self) -> list[str]:
        return [t["name"] for t in self.report.get("tasks", []) if t["gating"] and not t["passed"]]


@dataclasses.dataclass(slots=True, frozen=True)
class RunResult:
    exit_code: int
    bundle: ReportBundle
    out_dir: pathlib.Path | None
    message: str = ""


def select_task(scenario: Scenario, kind: TaskKind) -> Scenario:
    """The scenario reduced to its first task of a kind, or a default one."""
    chosen = next((t for t in scenario.tasks if t.kind is kind), None)
    if chosen is None:
        chosen = TaskSpec(kind, kind.value, {}, gating=True, pointer="/tasks/0")
    return dataclasses.replace(scenario, tasks=(chosen,), _dags={})


def execute(scenario: Scenario, settings: Settings, *, force: bool = False) -> ReportBundle:
    """Run every task in order and assemble the report bundle."""
    ctx = RunContext(settings, force)
    bundle = ReportBundle(
        report={
            "version": _version(),
            "seed": settings.seed,
            "tolerance": settings.tolerance,
            "tasks": [],
        },
    )
    for task in scenario.tasks:
        outcome = run_task(scenario, task, ctx)
        record = {
            "name": task.name,
            "kind": task.kind.value,
            "gating": task.gating,
            "passed": outcome.passed,
            "result": _jsonable(outcome.result),
            "artifacts": sorted([*outcome.tables, *outcome.documents]),
        }
        bundle.report["tasks"].append(record)
        bundle.tables.update(outcome.tables)
        bundle.documents.update({k: _jsonable(v) for k, v in outcome.documents.items()})
    return bundle


def _version() -> str:
    import lorprod

    return lorprod.__version__


def emit_plotdata(bundle: ReportBundle, out_dir: str | os.PathLike) -> list[pathlib.Path]:
    """Write report.json, one CSV per table and one JSON file per document.

    Raises
    ------
    OSError
        If the directory or a file cannot be written.
    """
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in sorted(bundle.tables.items()):
        path = out / name
        path.write_text(table.to_csv())
        written.append(path)
    for name, document in sorted(bundle.documents.items()):
        path = out / name
        path.write_text(json.dumps(document, indent=2) + "\n")
        written.append(path)
    path = out / "report.json"
    path.write_text(json.dumps(bundle.report, indent=2) + "\n")
    written.append(path)
    return written


def run_scenario(
    source: str | os.PathLike | Scenario,
    *,
    out: str | os.PathLike | None = None,
    seed: int | None = None,
    tol: float | None = None,
    force: bool = False,
    kind: TaskKind | None = None,
) -> RunResult:
    """Load, run and write a scenario, returning the process exit status.

    Parameters
    ----------
    source : str | os.PathLike | Scenario
        A scenario file or a parsed scenario.
    out : str | os.PathLike | None, optional
        Output directory, overriding the scenario and $LORPROD_OUT.
    seed : int | None, optional
        Overrides the scenario seed.
    tol : float | None, optional
        Overrides the scenario tolerance.
    force : bool, optional
        Attempt push-up on families that are not certified, by default False.
    kind : TaskKind | None, optional
        Run only the first task of this kind (or a default one).

    Returns
    -------
    RunResult
        Exit code 0 when every gating task passes, 1 when one fails, 2 for
        a scenario that does not follow the schema and 3 when the output
        cannot be written.
    """
    empty = ReportBundle(report={})
    try:
        scenario = source if isinstance(source, Scenario) else load_scenario(source)
        if kind is not None:
            scenario = select_task(scenario, kind)
        settings = Settings().replace(seed=scenario.seed, tolerance=scenario.tolerance)
        settings = settings.replace(seed=seed, tolerance=tol)
        settings = settings.replace(seed=process_seed(settings.seed))
        bundle = execute(scenario, settings, force=force)
    except ScenarioError as e:
        logger.error("invalid scenario: %s", e)  # noqa: TRY400
        return RunResult(EXIT_SCENARIO, empty, None, str(e))

    out_dir = resolve_out_dir(out, scenario.out)
    try:
        emit_plotdata(bundle, out_dir)
    except OSError as e:
        logger.error("cannot write to %s: %s", out_dir, e)  # noqa: TRY400
        return RunResult(EXIT_UNWRITABLE, bundle, out_dir, f"cannot write to {out_dir}: {e}")

    failed = bundle.failed_tasks
    if failed:
        return RunResult(EXIT_TASK_FAILED, bundle, out_dir, f"failed tasks: {', '.join(failed)}")
    return RunResult(EXIT_OK, bundle, out_dir)
