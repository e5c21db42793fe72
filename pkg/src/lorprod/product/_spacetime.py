"""Discretised generalized Lorentzian products I x X."""

import dataclasses
from collections.abc import Iterable, Sequence
from enum import Enum, unique
from typing import Any, NamedTuple

import numpy as np

from lorprod.exceptions import InvalidPathError
from lorprod.family import ConformalFamily
from lorprod.space import BaseSpace, Node


class Event(NamedTuple):
    """A grid event: a time index and a node."""

    layer: int
    node: Node


class ProductSpacetime:
    """A conformal family sampled on a time grid with a hop radius.

    Parameters
    ----------
    family : ConformalFamily
        The metric family and lapse.
    times : Sequence[float]
        Strictly increasing time samples inside the family's interval.
    hop_radius : int, optional
        Causal steps may move at most this many graph hops per layer,
        by default 1.
    """

    def __init__(
        self,
        family: ConformalFamily,
        times: Sequence[float] | np.ndarray,
        hop_radius: int = 1,
    ) -> None:
        grid = np.array(times, dtype=float)
        if grid.ndim != 1 or len(grid) < 2:
            msg = "the time grid needs at least two samples"
            raise ValueError(msg)
        if np.any(np.diff(grid) <= 0):
            msg = "the time grid must be strictly increasing"
            raise ValueError(msg)
        family.check_time(float(grid[0]))
        family.check_time(float(grid[-1]))
        if int(hop_radius) != hop_radius or hop_radius < 1:
            msg = f"hop radius must be a positive integer, got {hop_radius}"
            raise ValueError(msg)
        self.family = family
        self.times = grid
        self.times.setflags(write=False)
        self.hop_radius = int(hop_radius)

    @classmethod
    def uniform(
        cls,
        family: ConformalFamily,
        num_steps: int,
        hop_radius: int = 1,
    ) -> "ProductSpacetime":
        """A uniform grid with num_steps steps over the family's interval."""
        return cls(family, np.linspace(*family.interval, num_steps + 1), hop_radius)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(layers={self.num_layers}, "
            f"nodes={self.space.num_nodes}, hop_radius={self.hop_radius})"
        )

    @property
    def space(self) -> BaseSpace:
        return self.family.space

    @property
    def num_layers(self) -> int:
        """The number of time steps M (there are M + 1 time samples)."""
        return len(self.times) - 1

    def event(self, layer: int, node: Node) -> Event:
        if not 0 <= layer <= self.num_layers:
            msg = f"layer {layer} outside 0..{self.num_layers}"
            raise ValueError(msg)
        self.space.index(node)
        return Event(int(layer), node)

    def layer_of(self, time: float) -> int:
        """Index of a grid time."""
        k = int(np.searchsorted(self.times, time))
        if k > self.num_layers or self.times[k] != time:
            msg = f"{time} is not a grid time"
            raise ValueError(msg)
        return k

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.to_dict(),
            "times": self.times.tolist(),
            "hop_radius": self.hop_radius,
        }


@unique
class Orientation(Enum):
    FUTURE = "future"
    PAST = "past"
    NONE = "none"


@dataclasses.dataclass(frozen=True, slots=True)
class ProductCurve:
    """A sampled curve (alpha, beta) in I x X.

    Consecutive nodes are joined by a d_s geodesic taken at the midpoint
    time of the step.

    Parameters
    ----------
    params : tuple[float, ...]
        Strictly increasing curve parameters t_k.
    times : tuple[float, ...]
        Time components s_k.
    nodes : tuple[Node, ...]
        Spatial components x_k.
    """

    params: tuple[float, ...]
    times: tuple[float, ...]
    nodes: tuple[Node, ...]

    def __post_init__(self) -> None:
        if not len(self.params) == len(self.times) == len(self.nodes):
            msg = "params, times and nodes must have the same length"
            raise InvalidPathError(msg)
        if not self.params:
            msg = "a curve needs at least one sample"
            raise InvalidPathError(msg)
        if any(b <= a for a, b in zip(self.params[:-1], self.params[1:], strict=True)):
            msg = "curve parameters must be strictly increasing"
            raise InvalidPathError(msg)

    @classmethod
    def from_samples(
        cls,
        times: Iterable[float],
        nodes: Iterable[Node],
        params: Iterable[float] | None = None,
    ) -> "ProductCurve":
        """Build a curve, using the sample index as parameter by default."""
        times = tuple(float(s) for s in times)
        nodes = tuple(nodes)
        if params is None:
            params = tuple(float(k) for k in range(len(times)))
        return cls(tuple(float(t) for t in params), times, nodes)

    @classmethod
    def from_events(
        cls,
        st: ProductSpacetime,
        events: Iterable[Event],
        params: Iterable[float] | None = None,
    ) -> "ProductCurve":
        """A curve through grid events, parametrised by time when future directed."""
        events = list(events)
        times = [float(st.times[e.layer]) for e in events]
        nodes = [e.node for e in events]
        if params is None and all(b > a for a, b in zip(times[:-1], times[1:], strict=True)):
            params = times
        return cls.from_samples(times, nodes, params)

    @property
    def num_steps(self) -> int:
        return len(self.times) - 1

    @property
    def start(self) -> tuple[float, Node]:
        return self.times[0], self.nodes[0]

    @property
    def end(self) -> tuple[float, Node]:
        return self.times[-1], self.nodes[-1]

    @property
    def orientation(self) -> Orientation:
        diffs = np.diff(self.times)
        if len(diffs) and np.all(diffs > 0):
            return Orientation.FUTURE
        if len(diffs) and np.all(diffs < 0):
            return Orientation.PAST
        return Orientation.NONE

    def concatenate(self, other: "ProductCurve") -> "ProductCurve":
        """Join other onto the end of this curve; the junction samples must agree."""
        if self.end != other.start:
            msg = f"curves do not meet: {self.end} != {other.start}"
            raise InvalidPathError(msg)
        shift = self.params[-1] - other.params[0]
        params = self.params + tuple(p + shift for p in other.params[1:])
        return ProductCurve(params, self.times + other.times[1:], self.nodes + other.nodes[1:])

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": list(self.params),
            "times": list(self.times),
            "nodes": list(self.nodes),
        }
