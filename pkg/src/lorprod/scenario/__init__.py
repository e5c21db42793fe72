"""Scenario documents, task runners and report writing."""

from lorprod.scenario._runner import (
    EXIT_OK,
    EXIT_SCENARIO,
    EXIT_TASK_FAILED,
    EXIT_UNWRITABLE,
    ReportBundle,
    RunResult,
    emit_plotdata,
    execute,
    run_scenario,
    select_task,
)
from lorprod.scenario._scenario import Scenario, TaskKind, TaskSpec, load_scenario, parse_scenario
from lorprod.scenario._settings import OUT_ENV_VAR, Settings, resolve_out_dir
from lorprod.scenario._tasks import RunContext, TaskOutcome, run_task

__all__ = [
    "EXIT_OK",
    "EXIT_SCENARIO",
    "EXIT_TASK_FAILED",
    "EXIT_UNWRITABLE",
    "OUT_ENV_VAR",
    "ReportBundle",
    "RunContext",
    "RunResult",
    "Scenario",
    "Settings",
    "TaskKind",
    "TaskOutcome",
    "TaskSpec",
    "emit_plotdata",
    "execute",
    "load_scenario",
    "parse_scenario",
    "resolve_out_dir",
    "run_scenario",
    "run_task",
    "select_task",
]
