"""Analytic forms for weights, lapses and densities on I x X."""

import functools
import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from enum import Enum, unique
from typing import Any

import numpy as np

from lorprod.space import BaseSpace, Node


@unique
class FormType(Enum):
    """Named analytic forms f(s, x)."""

    constant = "constant"
    exp_linear = "exp_linear"
    affine = "affine"
    holder_bubble = "holder_bubble"
    geometric_depth = "geometric_depth"
    exp_square = "exp_square"
    power_affine = "power_affine"
    grid = "grid"

    @staticmethod
    @functools.cache
    def _descriptions() -> dict["FormType", str]:
        return {
            FormType.constant: "c everywhere.",
            FormType.exp_linear: "c * exp(a*s) * w(x).",
            FormType.affine: "b + a*s*w(x); must stay positive on the time interval.",
            FormType.holder_bubble: "exp(sqrt(|s - s0|) * w(x)); Hoelder but not Lipschitz in s at s0.",
            FormType.geometric_depth: "c * ratio**depth(x), depth counted in hops from a root node.",
            FormType.exp_square: "c * w(x) * exp(a*s**2).",
            FormType.power_affine: "w(x) * (b + a*s)**power; must stay positive on the time interval.",
            FormType.grid: "Tabulated values over time samples x nodes, linear in s.",
        }

    @property
    def description(self) -> str:
        """The description of the FormType."""
        return self._descriptions()[self]


def node_values(
    space: BaseSpace,
    values: Mapping[Any, float] | Sequence[float] | None,
    default: float = 1.0,
) -> np.ndarray:
    """Per-node values in node order.

    Mappings may be keyed by node or by the string form of the node, as
    happens with JSON documents. Missing nodes take the default.
    """
    if values is None:
        return np.full(space.num_nodes, default, dtype=float)
    if isinstance(values, Mapping):
        out = np.full(space.num_nodes, default, dtype=float)
        for key, value in values.items():
            node: Node = key
            if not space.has_node(node):
                matches = [n for n in space.nodes if str(n) == str(key)]
                if not matches:
                    msg = f"{key!r} is not a node of the space"
                    raise ValueError(msg)
                node = matches[0]
            out[space.index(node)] = float(value)
        return out
    out = np.asarray(values, dtype=float)
    if out.shape != (space.num_nodes,):
        msg = f"expected {space.num_nodes} node values, got shape {out.shape}"
        raise ValueError(msg)
    return out


class FieldForm(ABC):
    """Base class for positive functions f(s, x) on I x X.

    Attributes
    ----------
    time_independent : bool
        f does not depend on s.
    continuous_in_time : bool
        f is continuous in s.
    log_lipschitz : float | None
        A Lipschitz constant of log f in s, None when not known in closed form.
    """

    form_type: FormType
    time_independent: bool = False
    continuous_in_time: bool = True

    @abstractmethod
    def values(self, s: float) -> np.ndarray:
        """Values at time s for every node, in node order."""

    @abstractmethod
    def params(self) -> dict[str, Any]:
        """Parameters recreating this form with make_form."""

    @property
    def log_lipschitz(self) -> float | None:
        return None

    def at(self, s: float, index: int) -> float:
        return float(self.values(s)[index])

    def to_dict(self) -> dict[str, Any]:
        return {"form": self.form_type.value, **self.params()}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{self.__class__.__name__}({args})"


class ConstantForm(FieldForm):
    form_type = FormType.constant
    time_independent = True

    def __init__(self, space: BaseSpace, value: float = 1.0) -> None:
        self.value = float(value)
        self._values = np.full(space.num_nodes, self.value)

    def values(self, s: float) -> np.ndarray:  # noqa: ARG002
        return self._values

    def params(self) -> dict[str, Any]:
        return {"value": self.value}

    @property
    def log_lipschitz(self) -> float:
        return 0.0


class ExpLinearForm(FieldForm):
    form_type = FormType.exp_linear

    def __init__(
        self,
        space: BaseSpace,
        a: float = 1.0,
        c: float = 1.0,
        w: Mapping[Any, float] | Sequence[float] | None = None,
    ) -> None:
        self.a = float(a)
        self.c = float(c)
        self._w_param = w
        self._cw = self.c * node_values(space, w)
        self.time_independent = self.a == 0

    def values(self, s: float) -> np.ndarray:
        return math.exp(self.a * s) * self._cw

    def params(self) -> dict[str, Any]:
        return {"a": self.a, "c": self.c, "w": self._w_param}

    @property
    def log_lipschitz(self) -> float:
        return abs(self.a)


class AffineForm(FieldForm):
    form_type = FormType.affine

    def __init__(
        self,
        space: BaseSpace,
        a: float = 1.0,
        b: float = 1.0,
        w: Mapping[Any, float] | Sequence[float] | None = None,
    ) -> None:
        self.a = float(a)
        self.b = float(b)
        self._w_param = w
        self._aw = self.a * node_values(space, w)
        self.time_independent = self.a == 0

    def values(self, s: float) -> np.ndarray:
        return self.b + s * self._aw

    def params(self) -> dict[str, Any]:
        return {"a": self.a, "b": self.b, "w": self._w_param}


class HolderBubbleForm(FieldForm):
    form_type = FormType.holder_bubble

    def __init__(
        self,
        space: BaseSpace,
        s0: float = 0.0,
        w: Mapping[Any, float] | Sequence[float] | None = None,
    ) -> None:
        self.s0 = float(s0)
        self._w_param = w
        self._w = node_values(space, w)

    def values(self, s: float) -> np.ndarray:
        return np.exp(math.sqrt(abs(s - self.s0)) * self._w)

    def params(self) -> dict[str, Any]:
        return {"s0": self.s0, "w": self._w_param}

    @property
    def log_lipschitz(self) -> float:
        return math.inf


class GeometricDepthForm(FieldForm):
    form_type = FormType.geometric_depth
    time_independent = True

    def __init__(
        self,
        space: BaseSpace,
        root: Node,
        ratio: float = 2.0,
        c: float = 1.0,
    ) -> None:
        if not space.has_node(root):
            matches = [n for n in space.nodes if str(n) == str(root)]
            if not matches:
                msg = f"root {root!r} is not a node of the space"
                raise ValueError(msg)
            root = matches[0]
        self.root = root
        self.ratio = float(ratio)
        self.c = float(c)
        self._values = self.c * self.ratio ** space.depth(root)

    def values(self, s: float) -> np.ndarray:  # noqa: ARG002
        return self._values

    def params(self) -> dict[str, Any]:
        return {"root": self.root, "ratio": self.ratio, "c": self.c}

    @property
    def log_lipschitz(self) -> float:
        return 0.0


class ExpSquareForm(FieldForm):
    form_type = FormType.exp_square

    def __init__(
        self,
        space: BaseSpace,
        a: float = 1.0,
        c: float = 1.0,
        w: Mapping[Any, float] | Sequence[float] | None = None,
    ) -> None:
        self.a = float(a)
        self.c = float(c)
        self._w_param = w
        self._cw = self.c * node_values(space, w)
        self.time_independent = self.a == 0

    def values(self, s: float) -> np.ndarray:
        return math.exp(self.a * s * s) * self._cw

    def params(self) -> dict[str, Any]:
        return {"a": self.a, "c": self.c, "w": self._w_param}


class PowerAffineForm(FieldForm):
    form_type = FormType.power_affine

    def __init__(
        self,
        space: BaseSpace,
        a: float = 1.0,
        b: float = 1.0,
        power: float = 1.0,
        w: Mapping[Any, float] | Sequence[float] | None = None,
    ) -> None:
        self.a = float(a)
        self.b = float(b)
        self.power = float(power)
        self._w_param = w
        self._w = node_values(space, w)
        self.time_independent = self.a == 0

    def values(self, s: float) -> np.ndarray:
        base = self.b + self.a * s
        if base <= 0:
            return np.zeros_like(self._w)
        return self._w * base**self.power

    def params(self) -> dict[str, Any]:
        return {"a": self.a, "b": self.b, "power": self.power, "w": self._w_param}


class GridForm(FieldForm):
    form_type = FormType.grid

    def __init__(
        self,
        space: BaseSpace,
        grid: Sequence[Sequence[float]],
        times: Sequence[float] | None = None,
    ) -> None:
        table = np.asarray(grid, dtype=float)
        if table.ndim != 2 or table.shape[1] != space.num_nodes:
            msg = f"grid must have one column per node ({space.num_nodes})"
            raise ValueError(msg)
        if times is None:
            if table.shape[0] != 1:
                msg = "times are required for a grid with more than one row"
                raise ValueError(msg)
            times = [0.0]
        self.times = np.asarray(times, dtype=float)
        if self.times.shape != (table.shape[0],) or np.any(np.diff(self.times) <= 0):
            msg = "grid times must be strictly increasing with one per row"
            raise ValueError(msg)
        self.table = table
        self.time_independent = bool(np.all(table == table[0]))

    def values(self, s: float) -> np.ndarray:
        if len(self.times) == 1 or s <= self.times[0]:
            return self.table[0]
        if s >= self.times[-1]:
            return self.table[-1]
        k = int(np.searchsorted(self.times, s, side="right")) - 1
        lam = (s - self.times[k]) / (self.times[k + 1] - self.times[k])
        return (1 - lam) * self.table[k] + lam * self.table[k + 1]

    def params(self) -> dict[str, Any]:
        return {"grid": self.table.tolist(), "times": self.times.tolist()}


_FORM_CLASSES: dict[FormType, type[FieldForm]] = {
    FormType.constant: ConstantForm,
    FormType.exp_linear: ExpLinearForm,
    FormType.affine: AffineForm,
    FormType.holder_bubble: HolderBubbleForm,
    FormType.geometric_depth: GeometricDepthForm,
    FormType.exp_square: ExpSquareForm,
    FormType.power_affine: PowerAffineForm,
    FormType.grid: GridForm,
}


def make_form(spec: FieldForm | float | Mapping[str, Any], space: BaseSpace) -> FieldForm:
    """Resolve a form specification against a base space.

    Parameters
    ----------
    spec : FieldForm | float | Mapping[str, Any]
        A form instance, a constant, or a mapping such as
        {"form": "exp_linear", "a": 1.0} or {"grid": [[...]], "times": [...]}.
    space : BaseSpace
        The space whose nodes the form is evaluated on.

    Returns
    -------
    FieldForm
        The resolved form.

    Raises
    ------
    ValueError
        If the form name or its parameters cannot be resolved.

    """
    if isinstance(spec, FieldForm):
        return spec
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return ConstantForm(space, float(spec))
    if not isinstance(spec, Mapping):
        msg = f"Unknown form specification: {spec!r}."
        raise ValueError(msg)

    params = dict(spec)
    name = params.pop("form", "grid" if "grid" in params else None)
    try:
        form_type = FormType(name)
    except ValueError:
        msg = f"Unknown form: {name!r}."
        raise ValueError(msg) from None

    try:
        return _FORM_CLASSES[form_type](space, **params)
    except TypeError as e:
        msg = f"Invalid parameters for form {name!r}: {e}"
        raise ValueError(msg) from None
