"""Finite weighted graphs standing in for the spatial length space."""

import dataclasses
import functools
import math
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from typing import TYPE_CHECKING, Any

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from lorprod.exceptions import DomainError, InvalidPathError, UnreachableError

if TYPE_CHECKING:
    from cogent3.evolve.fast_distance import DistanceMatrix

Node = Hashable
WeightLike = Mapping[Node, float] | Sequence[float] | np.ndarray | Callable[[Node], float]


class BaseSpace:
    """An immutable connected graph with positive edge lengths.

    Parameters
    ----------
    nodes : Iterable[Node]
        Node identifiers. Declaration order is kept and defines the node
        order used for tie-breaking.
    edges : Iterable[tuple[Node, Node, float]]
        Unordered node pairs with their base length.

    Notes
    -----
    Shortest paths are computed with Dijkstra's algorithm on a sparse
    matrix. Base distances and hop neighbourhoods are cached.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[tuple[Node, Node, float]],
    ) -> None:
        self._nodes: tuple[Node, ...] = tuple(nodes)
        if not self._nodes:
            msg = "A base space needs at least one node"
            raise ValueError(msg)
        self._index = {node: i for i, node in enumerate(self._nodes)}
        if len(self._index) != len(self._nodes):
            msg = "Node identifiers must be distinct"
            raise ValueError(msg)

        graph = nx.Graph()
        graph.add_nodes_from(self._nodes)
        for u, v, length in edges:
            if u not in self._index or v not in self._index:
                msg = f"Edge ({u!r}, {v!r}) references an unknown node"
                raise ValueError(msg)
            if u == v:
                msg = f"Self loop at {u!r} is not allowed"
                raise ValueError(msg)
            if graph.has_edge(u, v):
                msg = f"Duplicate edge ({u!r}, {v!r})"
                raise ValueError(msg)
            length = float(length)
            if not length > 0:
                msg = f"Edge ({u!r}, {v!r}) has nonpositive length {length}"
                raise ValueError(msg)
            graph.add_edge(u, v, length=length)

        if not nx.is_connected(graph):
            msg = "The base space must be connected"
            raise ValueError(msg)

        self._graph = nx.freeze(graph)
        eu, ev, el = [], [], []
        for u, v, length in graph.edges(data="length"):
            eu.append(self._index[u])
            ev.append(self._index[v])
            el.append(length)
        self._eu = np.array(eu, dtype=np.intp)
        self._ev = np.array(ev, dtype=np.intp)
        self._length = np.array(el, dtype=float)
        self._hops: dict[int, tuple[np.ndarray, ...]] = {}

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BaseSpace":
        """Build a space from {"nodes": [...], "edges": [[u, v, len], ...]}."""
        try:
            nodes = data["nodes"]
            edges = [(u, v, length) for u, v, length in data["edges"]]
        except (KeyError, TypeError, ValueError) as e:
            msg = "A graph document needs 'nodes' and 'edges' as [u, v, len] triples"
            raise ValueError(msg) from e
        return cls(nodes, edges)

    def to_dict(self) -> dict[str, Any]:
        return {"nodes": list(self._nodes), "edges": [list(e) for e in self.iter_edges()]}

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self._nodes

    @property
    def num_nodes(self) -> int:
        return len(self._nodes)

    @property
    def num_edges(self) -> int:
        return len(self._length)

    @property
    def graph(self) -> nx.Graph:
        """A frozen networkx view of the space."""
        return self._graph

    def iter_edges(self) -> Iterable[tuple[Node, Node, float]]:
        for u, v, length in zip(self._eu, self._ev, self._length, strict=True):
            yield self._nodes[u], self._nodes[v], float(length)

    def index(self, node: Node) -> int:
        """Position of a node in declaration order."""
        try:
            return self._index[node]
        except KeyError:
            msg = f"{node!r} is not a node of this space"
            raise ValueError(msg) from None

    def has_node(self, node: Node) -> bool:
        return node in self._index

    def edge_length(self, u: Node, v: Node) -> float:
        """Base length of the edge joining u and v, 0 when u == v."""
        if u == v:
            self.index(u)
            return 0.0
        data = self._graph.get_edge_data(u, v)
        if data is None:
            msg = f"{u!r} and {v!r} are not adjacent"
            raise InvalidPathError(msg)
        return float(data["length"])

    def weight_array(self, weight: WeightLike) -> np.ndarray:
        """Node weights as an array in node order, checked to be positive."""
        if callable(weight):
            values = np.array([weight(node) for node in self._nodes], dtype=float)
        elif isinstance(weight, Mapping):
            try:
                values = np.array([weight[node] for node in self._nodes], dtype=float)
            except KeyError as e:
                msg = f"weight missing for node {e.args[0]!r}"
                raise DomainError(msg) from None
        else:
            values = np.asarray(weight, dtype=float)
            if values.shape != (self.num_nodes,):
                msg = f"expected {self.num_nodes} weights, got shape {values.shape}"
                raise DomainError(msg)
        if not np.all(values > 0) or not np.all(np.isfinite(values)):
            msg = "conformal weights must be finite and positive"
            raise DomainError(msg)
        return values

    def edge_costs(self, weights: np.ndarray) -> np.ndarray:
        """Per-edge costs under node weights (trapezoidal endpoint mean)."""
        return self._length * 0.5 * (weights[self._eu] + weights[self._ev])

    def conformal_matrix(
        self,
        weights: np.ndarray | None = None,
        *,
        sources: np.ndarray | None = None,
        limit: float = np.inf,
    ) -> np.ndarray:
        """Shortest-path distances under node weights.

        Parameters
        ----------
        weights : np.ndarray | None, optional
            Positive node weights in node order, by default None (base metric).
        sources : np.ndarray | None, optional
            Rows to compute, by default None (all nodes).
        limit : float, optional
            Distances beyond limit are reported as inf, by default inf.

        Returns
        -------
        np.ndarray
            Distances from each source to every node.
        """
        costs = self._length if weights is None else self.edge_costs(weights)
        n = self.num_nodes
        matrix = csr_matrix((costs, (self._eu, self._ev)), shape=(n, n))
        return dijkstra(matrix, directed=False, indices=sources, limit=limit)

    @functools.cached_property
    def _base_matrix(self) -> np.ndarray:
        return self.conformal_matrix()

    def base_distances(self) -> np.ndarray:
        """All-pairs base distances (read-only)."""
        return self._base_matrix

    def hop_neighbours(self, radius: int) -> tuple[np.ndarray, ...]:
        """Sorted node indices within radius hops of each node (itself included)."""
        if radius < 0:
            msg = f"hop radius must be non-negative, got {radius}"
            raise ValueError(msg)
        if radius not in self._hops:
            hood = []
            for node in self._nodes:
                near = nx.single_source_shortest_path_length(self._graph, node, cutoff=radius)
                hood.append(np.array(sorted(self._index[n] for n in near), dtype=np.intp))
            self._hops[radius] = tuple(hood)
        return self._hops[radius]

    def depth(self, root: Node) -> np.ndarray:
        """Hop count from root to every node, in node order."""
        hops = nx.single_source_shortest_path_length(self._graph, root)
        return np.array([hops[node] for node in self._nodes], dtype=float)


def path_space(num_nodes: int, length: float = 1.0) -> BaseSpace:
    """A path graph with nodes 0..num_nodes-1 spread evenly over [0, length].

    Parameters
    ----------
    num_nodes : int
        Number of nodes, at least 2.
    length : float, optional
        Total length of the path, by default 1.0.

    Returns
    -------
    BaseSpace
        The path graph. Node i sits at coordinate i * length / (num_nodes - 1).
    """
    if num_nodes < 2:
        msg = "a path space needs at least two nodes"
        raise ValueError(msg)
    spacing = length / (num_nodes - 1)
    return BaseSpace(
        range(num_nodes),
        ((i, i + 1, spacing) for i in range(num_nodes - 1)),
    )


def shortest_distance(space: BaseSpace, x: Node, y: Node) -> float:
    """Base shortest-path distance between two nodes."""
    value = float(space.base_distances()[space.index(x), space.index(y)])
    if math.isinf(value):  # pragma: no cover
        msg = f"{y!r} is unreachable from {x!r}"
        raise UnreachableError(msg)
    return value


def conformal_distance(space: BaseSpace, weight: WeightLike, x: Node, y: Node) -> float:
    """Shortest-path distance after conformal reweighting.

    Parameters
    ----------
    space : BaseSpace
        The base space.
    weight : WeightLike
        Positive node weights, as a mapping, an array in node order or a
        callable on nodes.
    x, y : Node
        End points.

    Returns
    -------
    float
        The length of the cheapest path when each edge costs its base length
        times the mean of its endpoint weights.
    """
    weights = space.weight_array(weight)
    row = space.conformal_matrix(weights, sources=np.array([space.index(x)]))
    return float(row[0, space.index(y)])


@dataclasses.dataclass(frozen=True, slots=True)
class SpacePath:
    """A path through the base space with an optional parametrisation.

    Parameters
    ----------
    nodes : tuple[Node, ...]
        Consecutive nodes must be adjacent or equal (a stationary segment).
    durations : tuple[float, ...] | None
        Parameter length of each segment. When omitted the path is
        parametrised by base arc length and stationary segments take unit
        duration.
    """

    nodes: tuple[Node, ...]
    durations: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.nodes:
            msg = "a path needs at least one node"
            raise InvalidPathError(msg)
        if self.durations is not None:
            if len(self.durations) != len(self.nodes) - 1:
                msg = "durations must have one entry per segment"
                raise InvalidPathError(msg)
            if any(not d > 0 for d in self.durations):
                msg = "segment durations must be positive"
                raise InvalidPathError(msg)

    @property
    def num_segments(self) -> int:
        return len(self.nodes) - 1

    def segment_lengths(self, space: BaseSpace) -> np.ndarray:
        return np.array(
            [space.edge_length(u, v) for u, v in zip(self.nodes[:-1], self.nodes[1:], strict=True)],
            dtype=float,
        )

    def segment_durations(self, space: BaseSpace) -> np.ndarray:
        if self.durations is not None:
            return np.array(self.durations, dtype=float)
        lengths = self.segment_lengths(space)
        return np.where(lengths > 0, lengths, 1.0)

    def breakpoints(self, space: BaseSpace) -> np.ndarray:
        """Parameter values at the nodes, starting at 0."""
        return np.concatenate(([0.0], np.cumsum(self.segment_durations(space))))

    def speeds(self, space: BaseSpace) -> np.ndarray:
        """Base speed on each segment."""
        return self.segment_lengths(space) / self.segment_durations(space)

    def rescaled(self, space: BaseSpace, factor: float) -> "SpacePath":
        """The path composed with t -> factor * t."""
        if not factor > 0:
            msg = "reparametrisation factor must be positive"
            raise ValueError(msg)
        durations = self.segment_durations(space) / factor
        return SpacePath(self.nodes, tuple(float(d) for d in durations))


def path_length(space: BaseSpace, path: SpacePath) -> float:
    """Sum of the base lengths of the traversed edges."""
    return float(path.segment_lengths(space).sum())


def distance_matrix(space: BaseSpace, weight: WeightLike | None = None) -> "DistanceMatrix":
    """Pairwise (conformal) distances as a cogent3 DistanceMatrix.

    Parameters
    ----------
    space : BaseSpace
        The base space.
    weight : WeightLike | None, optional
        Conformal weights, by default None (base metric).

    Returns
    -------
    DistanceMatrix
        Distances keyed by the string form of the node identifiers.
    """
    from cogent3.evolve.fast_distance import DistanceMatrix

    if weight is None:
        dists = space.base_distances()
    else:
        dists = space.conformal_matrix(space.weight_array(weight))
    names = [str(node) for node in space.nodes]
    pairwise = {
        (names[i], names[j]): float(dists[i, j])
        for i in range(len(names))
        for j in range(len(names))
        if i != j
    }
    return DistanceMatrix(pairwise)
