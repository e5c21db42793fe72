"""Scenario documents: a base space, a family, a time grid and a task list."""

import dataclasses
import functools
import pathlib
from collections.abc import Mapping, Sequence
from enum import Enum, unique
from typing import Any

import numpy as np
import yaml

from lorprod.causal import CausalDAG, build_causal_dag
from lorprod.exceptions import LorprodError, ScenarioError
from lorprod.family import ConformalFamily, make_form
from lorprod.product import Event, ProductSpacetime
from lorprod.scenario._settings import Settings
from lorprod.space import BaseSpace, Node, load_space, path_space
from lorprod.transport import DensityField


@unique
class TaskKind(Enum):
    """Tasks a scenario can run."""

    tau = "tau"
    maximizer = "maximizer"
    pushup = "pushup"
    regularity = "regularity"
    hyperbolicity = "hyperbolicity"
    verify_lip = "verify-lip"
    tcd = "tcd"
    rigidity = "rigidity"
    demo_bubble = "demo-bubble"


# tasks that never fail a run unless asked to
_NON_GATING = frozenset({TaskKind.demo_bubble})


@dataclasses.dataclass(slots=True, frozen=True)
class TaskSpec:
    kind: TaskKind
    name: str
    params: Mapping[str, Any]
    gating: bool
    pointer: str

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    def require(self, key: str) -> Any:
        if key not in self.params:
            msg = f"{self.pointer}: task {self.name!r} needs {key!r}"
            raise ScenarioError(msg)
        return self.params[key]


def _pointer_error(pointer: str, problem: str) -> ScenarioError:
    return ScenarioError(f"{pointer or '/'}: {problem}")


@dataclasses.dataclass(frozen=True, eq=False)
class Scenario:
    """A validated scenario.

    Parameters
    ----------
    space : BaseSpace
        The base space.
    family_spec : Mapping[str, Any]
        Keyword arguments of ConformalFamily with rho and lapse as form specs.
    grid : Mapping[str, Any]
        {"times": [...]} or {"num_steps": n}, and an optional hop_radius.
    tasks : tuple[TaskSpec, ...]
        The tasks in run order.
    density_spec : Mapping[str, Any] | None
        {"g": form, "times": [...] or n, "lapse": h, "reference": [...]}.
    out : str | None
        Output directory.
    seed : int | None
        Sampling seed.
    tolerance : float | None
        Overrides the default tolerance.
    """

    space: BaseSpace
    family_spec: Mapping[str, Any]
    grid: Mapping[str, Any]
    tasks: tuple[TaskSpec, ...]
    density_spec: Mapping[str, Any] | None = None
    out: str | None = None
    seed: int | None = None
    tolerance: float | None = None
    _dags: dict[Settings, CausalDAG] = dataclasses.field(default_factory=dict, repr=False)

    @functools.cached_property
    def family(self) -> ConformalFamily:
        spec = dict(self.family_spec)
        try:
            return ConformalFamily(
                self.space,
                spec.pop("rho", 1.0),
                spec.pop("lapse", 1.0),
                tuple(spec.pop("interval", (0.0, 1.0))),  # type: ignore[arg-type]
                **spec,
            )
        except (LorprodError, ValueError, TypeError) as e:
            raise _pointer_error("/family", str(e)) from e

    def spacetime(self, settings: Settings) -> ProductSpacetime:
        grid = self.grid
        radius = int(grid.get("hop_radius", settings.hop_radius))
        try:
            if "times" in grid:
                return ProductSpacetime(self.family, grid["times"], radius)
            return ProductSpacetime.uniform(self.family, int(grid.get("num_steps", 100)), radius)
        except (LorprodError, ValueError, TypeError) as e:
            raise _pointer_error("/grid", str(e)) from e

    def dag(self, settings: Settings) -> CausalDAG:
        """The causal graph of the scenario spacetime, built once per settings."""
        if settings not in self._dags:
            self._dags[settings] = build_causal_dag(
                self.spacetime(settings),
                max_steps=settings.max_steps,
                max_wide_steps=settings.max_wide_steps,
            )
        return self._dags[settings]

    @functools.cached_property
    def density(self) -> DensityField:
        if self.density_spec is None:
            msg = "/density: the scenario has no density field"
            raise ScenarioError(msg)
        spec = self.density_spec
        try:
            times = spec.get("times", 21)
            if isinstance(times, int):
                lo, hi = spec.get("window", self.family.interval)
                times = np.linspace(lo, hi, times)
            form = make_form(spec.get("g", 1.0), self.space)
            values = np.array([form.values(float(s)) for s in times])
            return DensityField(self.space, times, values, spec.get("lapse", 1.0), spec.get("reference"))
        except (LorprodError, ValueError, TypeError) as e:
            raise _pointer_error("/density", str(e)) from e

    def node(self, value: Any, pointer: str) -> Node:
        """Resolve a node, accepting the string form of non-string nodes."""
        if self.space.has_node(value):
            return value
        for node in self.space.nodes:
            if str(node) == str(value):
                return node
        raise _pointer_error(pointer, f"{value!r} is not a node of the space")

    def event(self, st: ProductSpacetime, value: Any, pointer: str) -> Event:
        """Resolve [time, node] to a grid event."""
        if not isinstance(value, Sequence) or isinstance(value, str) or len(value) != 2:
            raise _pointer_error(pointer, f"an event is [time, node], got {value!r}")
        time, node = value
        try:
            layer = st.layer_of(float(time))
        except (ValueError, TypeError) as e:
            raise _pointer_error(pointer, str(e)) from e
        return Event(layer, self.node(node, pointer))


def _parse_space(value: Any, base: pathlib.Path | None) -> BaseSpace:
    if isinstance(value, str):
        path = pathlib.Path(value)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return load_space(path)
        except (OSError, ValueError) as e:
            raise _pointer_error("/space", str(e)) from e
    if not isinstance(value, Mapping):
        raise _pointer_error("/space", "expected a graph document, a path spec or a file name")
    try:
        if "path" in value:
            spec = value["path"]
            return path_space(int(spec["num_nodes"]), float(spec.get("length", 1.0)))
        return BaseSpace.from_dict(value)
    except (LorprodError, ValueError, KeyError, TypeError) as e:
        raise _pointer_error("/space", str(e)) from e


def _parse_tasks(value: Any) -> tuple[TaskSpec, ...]:
    if value is None:
        return ()
    if not isinstance(value, Sequence) or isinstance(value, str):
        raise _pointer_error("/tasks", "expected a list of tasks")
    tasks = []
    names: set[str] = set()
    for i, item in enumerate(value):
        pointer = f"/tasks/{i}"
        if not isinstance(item, Mapping) or "kind" not in item:
            raise _pointer_error(pointer, "a task is a mapping with a 'kind'")
        try:
            kind = TaskKind(item["kind"])
        except ValueError:
            choices = ", ".join(k.value for k in TaskKind)
            raise _pointer_error(f"{pointer}/kind", f"unknown task {item['kind']!r}; choose from {choices}") from None
        params = {k: v for k, v in item.items() if k not in ("kind", "name", "gating")}
        name = str(item.get("name", kind.value if kind.value not in names else f"{kind.value}_{i}"))
        if name in names:
            raise _pointer_error(f"{pointer}/name", f"duplicate task name {name!r}")
        names.add(name)
        gating = bool(item.get("gating", kind not in _NON_GATING))
        tasks.append(TaskSpec(kind, name, params, gating, pointer))
    return tuple(tasks)


def parse_scenario(data: Any, base: pathlib.Path | None = None) -> Scenario:
    """Validate a scenario document.

    Raises
    ------
    ScenarioError
        With a JSON pointer to the offending field.
    """
    if not isinstance(data, Mapping):
        raise _pointer_error("", "a scenario is a mapping")
    unknown = set(data) - {"space", "family", "grid", "tasks", "density", "out", "seed", "tolerance"}
    if unknown:
        raise _pointer_error(f"/{sorted(unknown)[0]}", "unknown field")
    if "space" not in data:
        raise _pointer_error("/space", "required field is missing")
    family = data.get("family", {})
    grid = data.get("grid", {})
    density = data.get("density")
    for pointer, value in (("/family", family), ("/grid", grid)):
        if not isinstance(value, Mapping):
            raise _pointer_error(pointer, "expected a mapping")
    if density is not None and not isinstance(density, Mapping):
        raise _pointer_error("/density", "expected a mapping")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise _pointer_error("/seed", f"expected a non-negative integer, got {seed!r}")
    tolerance = data.get("tolerance")
    if tolerance is not None and not (isinstance(tolerance, int | float) and tolerance > 0):
        raise _pointer_error("/tolerance", f"expected a positive number, got {tolerance!r}")

    scenario = Scenario(
        space=_parse_space(data["space"], base),
        family_spec=dict(family),
        grid=dict(grid),
        tasks=_parse_tasks(data.get("tasks")),
        density_spec=None if density is None else dict(density),
        out=data.get("out"),
        seed=seed,
        tolerance=None if tolerance is None else float(tolerance),
    )
    _ = scenario.family
    return scenario


def load_scenario(path: str | pathlib.Path) -> Scenario:
    """Read a JSON or YAML scenario file."""
    path = pathlib.Path(path)
    try:
        with path.open() as infile:
            data = yaml.safe_load(infile)
    except OSError as e:
        msg = f"cannot read scenario {str(path)!r}: {e}"
        raise ScenarioError(msg) from e
    except yaml.YAMLError as e:
        raise _pointer_error("", f"not valid JSON or YAML: {e}") from e
    return parse_scenario(data, path.parent)
