"""Time separation by longest paths over the causal DAG."""

import dataclasses
import logging
import math
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.causal._classify import classify
from lorprod.causal._dag import CausalDAG
from lorprod.exceptions import InvalidPathError, UndefinedLengthError, UnreachableError
from lorprod.product import Event, Orientation, ProductCurve

logger = logging.getLogger(__name__)

_MAX_CACHED_TABLES = 32
_DIAMOND_TOL = 1e-12


class TimeSeparationTable:
    """Longest-path values from one source event to every later event.

    Parameters
    ----------
    dag : CausalDAG
        The causal graph.
    source : Event
        The source event p.

    Notes
    -----
    Among equally long predecessors the one with the smallest node index
    is stored.
    """

    def __init__(self, dag: CausalDAG, source: Event) -> None:
        st = dag.spacetime
        space = st.space
        self.dag = dag
        self.source = st.event(source.layer, source.node)
        n = space.num_nodes
        m = st.num_layers
        i0 = self.source.layer
        x0 = space.index(self.source.node)

        tau = np.full((m + 1, n), -np.inf)
        pred = np.full((m + 1, n), -1, dtype=np.intp)
        strict = np.zeros((m + 1, n), dtype=bool)
        tau[i0, x0] = 0.0

        for i in range(i0, m):
            steps = dag.layers[i]
            live = np.isfinite(tau[i, steps.src])
            if not live.any():
                break
            src = steps.src[live]
            dst = steps.dst[live]
            cand = tau[i, src] + steps.increment[live]
            # group by dst, longest first, ties to the smallest src
            order = np.lexsort((src, -cand, dst))
            _, first = np.unique(dst[order], return_index=True)
            best = order[first]
            tau[i + 1, dst[best]] = cand[best]
            pred[i + 1, dst[best]] = src[best]

            from_strict = strict[i, src] | ((i == i0) & (src == x0))
            chained = steps.timelike[live] & from_strict
            strict[i + 1, dst[chained]] = True

        self._tau = tau
        self._pred = pred
        self._strict = strict
        logger.debug("time separation from %s: %d events reachable", self.source, int(np.isfinite(tau).sum()))

    def _locate(self, event: Event) -> tuple[int, int]:
        event = self.dag.spacetime.event(event.layer, event.node)
        return event.layer, self.dag.spacetime.space.index(event.node)

    def reachable(self, event: Event) -> bool:
        """Whether event is in the causal future of the source (source included)."""
        return bool(np.isfinite(self._tau[self._locate(event)]))

    def strict(self, event: Event) -> bool:
        """Whether an all-timelike chain of at least one step reaches event."""
        return bool(self._strict[self._locate(event)])

    def tau(self, event: Event) -> float | None:
        """The time separation, or None when event is not causally reachable."""
        value = self._tau[self._locate(event)]
        return float(value) if np.isfinite(value) else None

    def predecessor(self, event: Event) -> Event | None:
        i, x = self._locate(event)
        k = self._pred[i, x]
        if k < 0:
            return None
        return Event(i - 1, self.dag.spacetime.space.nodes[k])

    def reachable_mask(self) -> np.ndarray:
        return np.isfinite(self._tau)

    def to_table(self) -> Table:
        """Reachable events in layer order with their values and predecessors."""
        nodes = self.dag.spacetime.space.nodes
        layer, x = np.nonzero(np.isfinite(self._tau))
        k = self._pred[layer, x]
        data = {
            "layer": layer.tolist(),
            "node": [nodes[j] for j in x],
            "tau": self._tau[layer, x].tolist(),
            "pred": [nodes[j] if j >= 0 else "" for j in k],
        }
        return make_table(
            header=["layer", "node", "tau", "pred"],
            data=data,
            title=f"time separation from {tuple(self.source)}",
        )


def separation_table(dag: CausalDAG, source: Event) -> TimeSeparationTable:
    """The (cached) separation table for a source event."""
    key = Event(int(source.layer), source.node)
    table = dag._tables.get(key)
    if table is None:
        if len(dag._tables) >= _MAX_CACHED_TABLES:
            dag._tables.pop(next(iter(dag._tables)))
        table = TimeSeparationTable(dag, key)
        dag._tables[key] = table
    return table  # type: ignore[return-value]


@dataclasses.dataclass(slots=True, frozen=True)
class Separation:
    """Time separation of a pair of events with the causal relations."""

    tau: float
    causal: bool
    timelike: bool

    @property
    def tau_positive(self) -> bool:
        return self.tau > 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "tau": self.tau,
            "causal": self.causal,
            "timelike": self.timelike,
            "tau_positive": self.tau_positive,
        }


def time_separation(dag: CausalDAG, p: Event, q: Event) -> Separation:
    """tau(p, q) with p <= q and p << q.

    tau is 0 when q is not in the causal future of p.
    """
    table = separation_table(dag, p)
    value = table.tau(q)
    if value is None:
        return Separation(0.0, causal=False, timelike=False)
    return Separation(value, causal=True, timelike=table.strict(q))


def maximizer(dag: CausalDAG, p: Event, q: Event) -> ProductCurve:
    """A longest causal chain from p to q, parametrised by time.

    Raises
    ------
    UnreachableError
        If q is not in the causal future of p.
    """
    table = separation_table(dag, p)
    if not table.reachable(q):
        msg = f"{tuple(q)} is not in the causal future of {tuple(p)}"
        raise UnreachableError(msg)
    events = [Event(int(q.layer), q.node)]
    while events[-1] != table.source:
        events.append(table.predecessor(events[-1]))  # type: ignore[arg-type]
    events.reverse()
    return ProductCurve.from_events(dag.spacetime, events)


@dataclasses.dataclass(slots=True, frozen=True)
class CausalDiamond:
    """Events causally between p and q.

    Attributes
    ----------
    events : tuple[Event, ...]
        Members of J+(p) and J-(q), in layer then node order.
    max_ratio : float
        Largest ratio of the shortest 1/h-weighted length from p to a
        member over sqrt(2) times their time difference.
    """

    events: tuple[Event, ...]
    max_ratio: float

    @property
    def bounded(self) -> bool:
        return self.max_ratio <= 1 + _DIAMOND_TOL

    def __len__(self) -> int:
        return len(self.events)

    def to_table(self) -> Table:
        return make_table(
            header=["layer", "node"],
            data={"layer": [e.layer for e in self.events], "node": [e.node for e in self.events]},
            title="causal diamond",
        )


def causal_diamond(dag: CausalDAG, p: Event, q: Event) -> CausalDiamond:
    """The diamond J+(p) and J-(q) with its weighted-length bound check.

    Every causal chain from p has 1/h-weighted length at most sqrt(2)
    times its time extent; the check records the worst ratio seen.
    """
    st = dag.spacetime
    space = st.space
    forward = separation_table(dag, p).reachable_mask()
    iq, xq = q.layer, space.index(q.node)
    backward = np.zeros_like(forward)
    backward[iq, xq] = True
    for i in range(iq - 1, p.layer - 1, -1):
        steps = dag.layers[i]
        hit = backward[i + 1, steps.dst]
        backward[i, steps.src[hit]] = True
    member = forward & backward
    member[: p.layer] = False
    member[iq + 1 :] = False

    # shortest weighted length from p through admissible steps
    n = space.num_nodes
    shortest = np.full((st.num_layers + 1, n), np.inf)
    shortest[p.layer, space.index(p.node)] = 0.0
    for i in range(p.layer, iq):
        steps = dag.layers[i]
        ds = st.times[i + 1] - st.times[i]
        cost = shortest[i, steps.src] + np.sqrt(ds * ds + (steps.distance / steps.lapse) ** 2)
        np.minimum.at(shortest[i + 1], steps.dst, cost)

    ratio = 0.0
    s_p = st.times[p.layer]
    for i, x in zip(*np.nonzero(member), strict=True):
        if i == p.layer:
            continue
        ratio = max(ratio, shortest[i, x] / (math.sqrt(2) * (st.times[i] - s_p)))

    events = tuple(Event(int(i), space.nodes[x]) for i, x in zip(*np.nonzero(member), strict=True))
    return CausalDiamond(events, float(ratio))


@dataclasses.dataclass(slots=True, frozen=True)
class VariationalLength:
    """Partition sums of tau along a curve at increasing dyadic depth."""

    levels: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def estimate(self) -> float:
        return min(self.values)

    def to_table(self) -> Table:
        return make_table(
            header=["level", "value"],
            data={"level": list(self.levels), "value": list(self.values)},
            title="variational length",
        )


def variational_length(dag: CausalDAG, curve: ProductCurve, depth: int | None = None) -> VariationalLength:
    """Infimum over dyadic partitions of the sum of tau over consecutive points.

    Parameters
    ----------
    dag : CausalDAG
        The causal graph the curve's events live in.
    curve : ProductCurve
        A future directed causal curve through grid events.
    depth : int | None, optional
        Finest dyadic level, by default the level that uses every sample.

    Raises
    ------
    UndefinedLengthError
        If the curve is not causal.
    InvalidPathError
        If the curve is not future directed through grid times, or
        leaves the causal graph.
    """
    result = classify(dag.spacetime, curve)
    if not result.is_causal:
        msg = f"variational length is undefined for a non-causal curve: {result.reason}"
        raise UndefinedLengthError(msg)
    if curve.orientation is not Orientation.FUTURE:
        msg = "variational length needs a future directed curve"
        raise InvalidPathError(msg)

    st = dag.spacetime
    events = [st.event(st.layer_of(s), x) for s, x in zip(curve.times, curve.nodes, strict=True)]
    n = curve.num_steps
    full = math.ceil(math.log2(n)) if n > 1 else 0
    depth = full if depth is None else min(depth, full)

    cache: dict[tuple[int, int], float] = {}

    def pair(a: int, b: int) -> float:
        if (a, b) not in cache:
            value = separation_table(dag, events[a]).tau(events[b])
            if value is None:
                msg = f"curve leaves the causal graph between samples {a} and {b}"
                raise InvalidPathError(msg)
            cache[a, b] = value
        return cache[a, b]

    levels = []
    values = []
    for level in range(depth + 1):
        points = sorted({(j * n) // 2**level for j in range(2**level + 1)})
        total = 0.0
        for a, b in zip(points[:-1], points[1:], strict=True):
            total += pair(a, b)
        levels.append(level)
        values.append(total)
    return VariationalLength(tuple(levels), tuple(values))
