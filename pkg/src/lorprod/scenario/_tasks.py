"""Runners for the scenario task kinds."""

import dataclasses
import logging
from collections.abc import Callable
from typing import Any

from cogent3.core.table import Table

from lorprod.causal import (
    CausalCharacter,
    build_causal_dag,
    causal_diamond,
    classify,
    lorentz_length,
    maximizer,
    separation_table,
    time_separation,
)
from lorprod.exceptions import (
    BracketError,
    HypothesisNotCertifiedError,
    LorprodError,
    ScenarioError,
    StraighteningError,
)
from lorprod.family import ConformalFamily, Verdict, verify_regularity
from lorprod.manifold import AuditVerdict, audit_maximizers, regularity_audit
from lorprod.ode import push_up
from lorprod.product import Divergence, Event, ProductCurve, ProductSpacetime, properness_diagnostic
from lorprod.scenario._scenario import Scenario, TaskKind, TaskSpec
from lorprod.scenario._settings import Settings
from lorprod.transport import WtcdCase, concavity_rigidity, entropy_decomposition, wtcd_probe

logger = logging.getLogger(__name__)


@dataclasses.dataclass(slots=True, frozen=True)
class RunContext:
    settings: Settings
    force: bool = False


@dataclasses.dataclass
class TaskOutcome:
    """A task's verdict, its JSON record and the artifacts it emits."""

    passed: bool
    result: dict[str, Any]
    tables: dict[str, Table] = dataclasses.field(default_factory=dict)
    documents: dict[str, dict[str, Any]] = dataclasses.field(default_factory=dict)


TaskRunner = Callable[[Scenario, TaskSpec, RunContext], TaskOutcome]
_RUNNERS: dict[TaskKind, TaskRunner] = {}


def _register(kind: TaskKind) -> Callable[[TaskRunner], TaskRunner]:
    def decorator(func: TaskRunner) -> TaskRunner:
        _RUNNERS[kind] = func
        return func

    return decorator


def _artifact(task: TaskSpec, stem: str, suffix: str) -> str:
    if task.name == task.kind.value:
        return f"{stem}.{suffix}"
    return f"{stem}_{task.name}.{suffix}"


def _event(scenario: Scenario, st: ProductSpacetime, task: TaskSpec, key: str, default: Event) -> Event:
    value = task.get(key)
    if value is None:
        return default
    return scenario.event(st, value, f"{task.pointer}/{key}")


def _end_events(scenario: Scenario, st: ProductSpacetime, task: TaskSpec) -> tuple[Event, Event]:
    node = scenario.space.nodes[0]
    source = _event(scenario, st, task, "source", Event(0, node))
    target = _event(scenario, st, task, "target", Event(st.num_layers, node))
    return source, target


def _window(task: TaskSpec, key: str = "window") -> tuple[float, float] | None:
    value = task.get(key)
    return None if value is None else (float(value[0]), float(value[1]))


@_register(TaskKind.tau)
def run_tau(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    dag = scenario.dag(ctx.settings)
    source, target = _end_events(scenario, dag.spacetime, task)
    sep = time_separation(dag, source, target)
    result: dict[str, Any] = {"source": list(source), "target": list(target), **sep.to_dict()}
    passed = sep.causal
    expected = task.get("expected")
    if expected is not None:
        rel_tol = float(task.get("rel_tol", ctx.settings.tolerance))
        error = abs(sep.tau - float(expected)) / max(abs(float(expected)), 1.0)
        result |= {"expected": float(expected), "relative_error": error, "rel_tol": rel_tol}
        passed = error <= rel_tol
    table = separation_table(dag, source).to_table().get_columns(["layer", "node", "tau"])
    return TaskOutcome(passed, result, tables={_artifact(task, "tau_table", "csv"): table})


@_register(TaskKind.maximizer)
def run_maximizer(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    dag = scenario.dag(ctx.settings)
    st = dag.spacetime
    source, target = _end_events(scenario, st, task)
    curve = maximizer(dag, source, target)
    character = classify(st, curve)
    length = lorentz_length(st, curve)
    tau = time_separation(dag, source, target).tau
    result = {
        "character": character.character.value,
        "length": length,
        "tau": tau,
        "curve": curve.to_dict(),
    }
    if length > 0:
        result["audit"] = regularity_audit(st, curve).to_dict()
    passed = character.is_causal and abs(length - tau) <= ctx.settings.tolerance * max(tau, 1.0)
    return TaskOutcome(passed, result)


def _witness_chain(scenario: Scenario, st: ProductSpacetime, task: TaskSpec) -> tuple[Event, Event, Event]:
    node = scenario.space.nodes[0]
    q = _event(scenario, st, task, "q", Event(0, node))
    p = _event(scenario, st, task, "p", Event(st.num_layers // 2, node))
    r = _event(scenario, st, task, "r", Event(st.num_layers, node))
    return q, p, r


@_register(TaskKind.pushup)
def run_pushup(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    dag = scenario.dag(ctx.settings)
    st = dag.spacetime
    q, p, r = _witness_chain(scenario, st, task)
    left = maximizer(dag, q, p)
    right = maximizer(dag, p, r)
    force = ctx.force or bool(task.get("force", False))
    straight = push_up(st, left, right, force=force, seed=ctx.settings.seed, tol=ctx.settings.bisection_tolerance)
    character = classify(st, straight.curve)
    endpoints_match = straight.curve.start == left.start and straight.curve.end == right.end
    passed = character.character is CausalCharacter.TIMELIKE and endpoints_match
    result = {"q": list(q), "p": list(p), "r": list(r), "character": character.character.value, **straight.to_dict()}
    return TaskOutcome(passed, result, tables={_artifact(task, "straighten_trace", "csv"): straight.trace_table()})


@_register(TaskKind.regularity)
def run_regularity(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    dag = scenario.dag(ctx.settings)
    summary = audit_maximizers(dag, num_pairs=int(task.get("num_pairs", 200)), seed=ctx.settings.seed)
    return TaskOutcome(
        summary.verdict is AuditVerdict.TIMELIKE,
        summary.to_dict(),
        tables={_artifact(task, "maximizer_audit", "csv"): summary.to_table()},
    )


@_register(TaskKind.hyperbolicity)
def run_hyperbolicity(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    st = scenario.spacetime(ctx.settings)
    result: dict[str, Any] = {"rays": [], "diamonds": []}
    tables = {}
    passed = True
    for i, ray in enumerate(task.get("rays", [])):
        pointer = f"{task.pointer}/rays/{i}"
        nodes = [scenario.node(x, pointer) for x in ray["nodes"]]
        time = float(ray.get("time", st.times[0]))
        report = properness_diagnostic(st, ProductCurve.from_samples([time] * len(nodes), nodes))
        result["rays"].append(report.to_dict())
        tables[_artifact(task, f"divergence_{i}", "csv")] = report.to_table()
        passed &= report.verdict is Divergence.DIVERGENT
    if task.get("diamonds"):
        dag = scenario.dag(ctx.settings)
        for i, pair in enumerate(task.get("diamonds")):
            pointer = f"{task.pointer}/diamonds/{i}"
            p = scenario.event(st, pair["p"], f"{pointer}/p")
            q = scenario.event(st, pair["q"], f"{pointer}/q")
            diamond = causal_diamond(dag, p, q)
            result["diamonds"].append({"size": len(diamond), "max_ratio": diamond.max_ratio, "bounded": diamond.bounded})
            passed &= diamond.bounded
    return TaskOutcome(passed, result, tables=tables)


@_register(TaskKind.verify_lip)
def run_verify_lip(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    report = verify_regularity(
        scenario.family,
        _window(task),
        seed=ctx.settings.seed,
        radius=task.get("radius"),
        tolerance=float(task.get("exponent_tol", 0.1)),
    )
    result = report.to_rich_dict()["init_kwargs"]
    return TaskOutcome(report.passed, result, tables={_artifact(task, "modulus", "csv"): report.to_table()})


@_register(TaskKind.tcd)
def run_tcd(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:  # noqa: ARG001
    field = scenario.density
    cases = []
    for i, item in enumerate(task.require("cases")):
        data = {"name": f"case{i}", **item}
        data["region"] = [scenario.node(x, f"{task.pointer}/cases/{i}/region") for x in data.get("region", field.space.nodes)]
        cases.append(WtcdCase.from_dict(data))
    report = wtcd_probe(
        field,
        cases,
        float(task.get("K", 0.0)),
        float(task.get("N", 1.0)),
        float(task.get("p", 0.5)),
        int(task.get("num_times", 21)),
    )
    result = report.to_dict()
    for case, record in zip(cases, result["cases"], strict=True):
        record["decomposition_residual"] = entropy_decomposition(field, case).residual
    tables = {f"entropy_curve_{c.case.name}.csv": c.entropy_table() for c in report.cases}
    return TaskOutcome(report.passed, result, tables=tables)


@_register(TaskKind.rigidity)
def run_rigidity(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:  # noqa: ARG001
    windows = task.get("windows")
    report = concavity_rigidity(
        scenario.density,
        float(task.get("K", 0.0)),
        float(task.get("N", 1.0)),
        None if windows is None else [(float(lo), float(hi)) for lo, hi in windows],
    )
    document = report.to_dict()
    result = {"passed": report.passed, "constancy": report.constancy, "exceptional_mass": report.exceptional_mass}
    return TaskOutcome(report.passed, result, documents={_artifact(task, "rigidity_report", "json"): document})


@_register(TaskKind.demo_bubble)
def run_demo_bubble(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    base = scenario.spacetime(ctx.settings)
    lo, hi = scenario.family.interval
    rho = {"form": "holder_bubble", "s0": float(task.get("s0", 0.5 * (lo + hi))), "w": task.get("w", 1.0)}
    bubble = ConformalFamily(scenario.space, rho, 1.0, (lo, hi))
    report = verify_regularity(bubble, seed=ctx.settings.seed)
    result: dict[str, Any] = {"regularity": report.verdict.value, "exponent": report.exponent}
    st = ProductSpacetime(bubble, base.times, base.hop_radius)
    dag = build_causal_dag(st, max_steps=ctx.settings.max_steps, max_wide_steps=ctx.settings.max_wide_steps)
    q, p, r = _witness_chain(scenario, st, task)
    try:
        straight = push_up(st, maximizer(dag, q, p), maximizer(dag, p, r), report=report, force=True)
    except (BracketError, StraighteningError, HypothesisNotCertifiedError) as e:
        result["push_up"] = f"{type(e).__name__}: {e}"
    else:
        result["push_up"] = classify(st, straight.curve).character.value
    try:
        audit = audit_maximizers(dag, num_pairs=int(task.get("num_pairs", 20)), seed=ctx.settings.seed)
        result["audit"] = audit.to_dict()
    except LorprodError as e:
        result["audit"] = f"{type(e).__name__}: {e}"
    return TaskOutcome(report.verdict is Verdict.FAIL, result)


def run_task(scenario: Scenario, task: TaskSpec, ctx: RunContext) -> TaskOutcome:
    """Run one task; errors raised by the computation become a failed outcome."""
    logger.info("task %s (%s) started", task.name, task.kind.value)
    try:
        outcome = _RUNNERS[task.kind](scenario, task, ctx)
    except ScenarioError:
        raise
    except (LorprodError, ValueError) as e:
        logger.warning("task %s failed: %s", task.name, e)
        return TaskOutcome(passed=False, result={"error": f"{type(e).__name__}: {e}"})
    logger.info("task %s finished: %s", task.name, "pass" if outcome.passed else "fail")
    return outcome
